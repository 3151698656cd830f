#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "dynlab/chain.hpp"
#include "dynlab/estimators.hpp"
#include "dynlab/rng.hpp"
#include "dynlab/types.hpp"

namespace dynlab {

/// Pointwise damping chi >= 0; it acts on fields through <chi, rho>_m.
class ChiMeasure {
public:
    explicit ChiMeasure(Vec chi);
    static ChiMeasure zero(int n) { return ChiMeasure(Vec::Zero(n)); }

    const Vec& values() const { return chi_; }
    int size() const { return static_cast<int>(chi_.size()); }

private:
    Vec chi_;
};

/// det(-M_m L + M_{chi m})^{-1}.
double partition(const DualPair& dp, const ChiMeasure& chi);

/// G_chi(x,y) = ((-L + M_chi)^{-1})_{xy} / m_y.
Mat green(const DualPair& dp, const ChiMeasure& chi);

/// Phi(s) = det(I + V M_s)^{-1}, the Laplace transform of Q in the pairing
/// <s, rho>_m.
double mgf(const DualPair& dp, const Vec& s);

/// Complex Gaussian field with density proportional to exp(<L z, zbar>_m),
/// represented as the symmetric base field exp(<A z, zbar>_m) carrying the
/// unit-modulus weight exp(<(L - A) z, zbar>_m).
struct TwistedModel {
    DualPair dp;
    /// E[z_x conj(z_y)] under the base field, (-M_m A)^{-1}.
    Mat base_cov;
    /// Lower Cholesky factor of base_cov.
    Mat base_factor;
    /// M_m (L - A); real skew-symmetric.
    Mat skew_form;

    static TwistedModel make(const DualPair& dp);

    /// exp(<(L - A) z, zbar>_m).
    Complex weight(const CVec& z) const;
    /// E_base[w] = det(-M_m A) / det(-M_m L).
    double exact_weight_mean() const;
};

struct WeightedFieldSample {
    CVec z;
    Complex w;
};

std::vector<WeightedFieldSample> sample_twisted(const TwistedModel& model, std::size_t count, std::uint64_t seed);

/// Integrand for twisted expectations. `aux` is an independent stream private
/// to the calling block (used e.g. to pair each field with a path). Must be
/// safe to call concurrently.
using TwistedIntegrand = std::function<void(const CVec& z, Rng& aux, std::span<Complex> out)>;

/// Self-normalised estimates of E_twist[f_j] for `outputs` integrands.
RatioAccumulator estimate_twisted(const TwistedModel& model, std::size_t outputs, const TwistedIntegrand& f,
                                  std::size_t count, std::uint64_t seed, Exec exec = Exec::parallel);

struct CmViolation {
    double exponent;
    Vec base;
    std::vector<int> directions;
    double signed_difference;
};

struct CmReport {
    std::size_t checked = 0;
    std::vector<CmViolation> violations;

    bool clean() const { return violations.empty(); }
};

/// For f = Phi^a with a in `exponents`, checks that every mixed forward
/// difference of order k <= max_order with step h has sign (-1)^k at each
/// base point, up to `slack`.
CmReport complete_monotonicity_check(const DualPair& dp, std::span<const Vec> grid, double h, int max_order,
                                     std::span<const double> exponents, double slack = 1e-12);

/// Every point of levels^n.
std::vector<Vec> lattice_grid(int n, std::span<const double> levels);

struct TraceCheck {
    double finite_difference;
    double trace;
};

/// d/dt log det(I + R_s M_{t e_u}) at t = 0 by extrapolated central
/// differences, against Tr(R_s M_{e_u}) = R_s(u,u), R_s = (-L + M_s)^{-1}.
TraceCheck mgf_trace_check(const DualPair& dp, const Vec& s, int u);

/// Candidate moment E_Q[rho_x1 ... rho_xk] = per(G_0[points, points]).
double q_moment(const DualPair& dp, std::span<const int> points);

/// The same moment from the Laplace transform: (-1)^k d^k Phi / prod m,
/// mixed central differences with Richardson extrapolation.
double mgf_moment(const DualPair& dp, std::span<const int> points);

}  // namespace dynlab
