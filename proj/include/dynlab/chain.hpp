#pragma once

#include <span>
#include <vector>

#include "dynlab/types.hpp"

namespace dynlab {

/// Finite killed chain: holding rates `q`, substochastic jump matrix `pi`,
/// initial law `mu`.
struct ChainSpec {
    Vec q;
    Mat pi;
    Vec mu;

    int size() const { return static_cast<int>(q.size()); }
};

/// Throws InvalidInput unless the spec describes a transient chain whose
/// reference measure m = mu V is strictly positive. With
/// `require_probability` the initial law must sum to one.
void validate(const ChainSpec& spec, bool require_probability = true);

/// Spectral radius of a square matrix (dense eigensolver).
double spectral_radius(const Mat& a);

/// Largest eigenvalue modulus estimate by power iteration on a nonnegative
/// matrix; used to cross-check `spectral_radius`.
double power_iteration_radius(const Mat& a, int iterations = 2000);

/// A chain together with its m-dual and the derived potential-theoretic data.
/// Generator sign: L = M_q (Pi - I), so V = (-L)^{-1} is entrywise >= 0.
struct DualPair {
    ChainSpec spec;
    Mat L;
    Mat L_hat;
    Mat pi_hat;
    Mat V;
    Vec m;
    Vec mu_hat;
    /// Symmetric part (L + L_hat)/2 in the m-inner product.
    Mat A;
    /// Skew part (L - L_hat)/2.
    Mat skew;
    /// kappa = q (1 - Pi 1): killing rate out of each state.
    Vec exit_rate;

    int size() const { return spec.size(); }
    const Vec& q() const { return spec.q; }
    const Mat& pi() const { return spec.pi; }
};

DualPair build_dual(const ChainSpec& spec);

/// The dual of the dual, started from mu_hat. Returns the original generator.
DualPair dual_of(const DualPair& dp);

struct EnergyReport {
    double mass_gap = 0.0;
    Mat conductances;
    /// Weight of |z_x|^2 in the energy, per unit of m_x.
    Vec killing;
};

EnergyReport energy_report(const DualPair& dp);

/// Re <-L z, zbar>_m evaluated directly.
double energy(const DualPair& dp, const CVec& z);

/// 1/2 sum C_xy |z_x - z_y|^2 + <killing, |z|^2>_m.
double energy_from_report(const EnergyReport& report, const DualPair& dp, const CVec& z);

/// Trace of the chain on the states `subset` (Schur complement of the
/// generator). The reference measure of the result is m restricted to the
/// subset; its initial law is the entrance law of the subset.
DualPair trace_chain(const DualPair& dp, std::span<const int> subset);

/// Chain on {0..n-1} that moves deterministically i -> i+1 at unit rate and
/// is killed from n-1, started at 0.
ChainSpec n_chain(int n);

}  // namespace dynlab
