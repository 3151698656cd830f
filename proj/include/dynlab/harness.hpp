#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dynlab/chain.hpp"
#include "dynlab/paths.hpp"
#include "dynlab/report.hpp"
#include "dynlab/twisted.hpp"

namespace dynlab {

struct Tolerances {
    double exact = 1e-10;
    double z = 4.0;
};

/// Off-diagonal isomorphism identity in normalised form:
///   E_twist[z_x zbar_y F(|z|^2)] = E_twist[mu_{x,y}(F(l + |z|^2))],
/// both sides by independent weighted sampling. The first row compares the
/// two estimates; when `exact` is given (or F is exponential/constant, where
/// it is computed) each side is also compared with it.
std::vector<VerificationReport> verify_star(const DualPair& dp, int x, int y, const FieldFunctional& f,
                                            std::size_t count, std::uint64_t seed, const Tolerances& tol = {},
                                            std::optional<double> exact = std::nullopt);

/// The same identity for F = exp(-<chi, .>_m) by closed forms: the Gaussian moment route
/// (partition ratio times the inverse of -M_m L + M_{chi m}) against the
/// path route (Phi(chi) times G_chi).
VerificationReport verify_star_exact(const DualPair& dp, int x, int y, const ChiMeasure& chi,
                                     const Tolerances& tol = {});

/// Diagonal identity: E_Q[rho_x F(rho)] = E_Q (x) mu_{x,x}[F(l + rho)], rho = |z|^2.
std::vector<VerificationReport> verify_starstar(const DualPair& dp, int x, const FieldFunctional& f,
                                                std::size_t count, std::uint64_t seed, const Tolerances& tol = {},
                                                std::optional<double> exact = std::nullopt);

VerificationReport verify_starstar_exact(const DualPair& dp, int x, const ChiMeasure& chi, const Tolerances& tol = {});

/// Weighted-sample estimates of E_Q[f] for nonnegative test functionals and
/// the complete-monotonicity sweeps of Phi, Phi^(1/2), Phi^(1/3).
std::vector<VerificationReport> verify_positivity(const DualPair& dp, std::size_t count, std::uint64_t seed,
                                                  const Tolerances& tol = {});

/// Permanental moments on X and on the trace chain on `subset` agree for
/// every tuple (tuples are states of X lying in the subset).
VerificationReport verify_trace(const DualPair& dp, std::span<const int> subset,
                                std::span<const std::vector<int>> tuples, const Tolerances& tol = {});

/// ||(-L_Y)^{-1} - V|_{YxY}||_inf for the Schur-complement trace.
VerificationReport trace_potential_report(const DualPair& dp, std::span<const int> subset, const Tolerances& tol = {});

/// All ordered pairs (and singletons) of states of `subset`.
std::vector<std::vector<int>> pair_tuples(std::span<const int> subset);

/// Worked example: the deterministic chain 1 -> 2 -> ... -> N -> killed.
std::vector<VerificationReport> example_suite(int n, std::size_t count, std::uint64_t seed,
                                              const Tolerances& tol = {});

/// Closed-form mass gap for the N-chain from the tridiagonal spectrum,
/// 1 - cos(pi/(N+1)).
double n_chain_mass_gap(int n);
/// The value printed for the worked example, 2 sin^2(pi/(2N)).
double n_chain_mass_gap_printed(int n);

}  // namespace dynlab
