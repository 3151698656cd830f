#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dynlab/report.hpp"
#include "dynlab/types.hpp"

namespace dynlab {

enum class OperatorKind { symmetric_nonneg, skew, general };

/// A Hilbert-space operator restricted to a finite orthonormal basis.
class TruncatedOperator {
public:
    /// Checks symmetry / skewness to 1e-12 (relative to the largest entry) and,
    /// for symmetric_nonneg, that the smallest eigenvalue is >= -1e-12.
    TruncatedOperator(Mat mat, OperatorKind kind);

    const Mat& mat() const { return mat_; }
    OperatorKind kind() const { return kind_; }
    int dim() const { return static_cast<int>(mat_.rows()); }

private:
    Mat mat_;
    OperatorKind kind_;
};

/// det_2(I + T) = prod (1 + lambda_i) exp(-lambda_i) over the eigenvalues of T.
/// Returns 0 when some eigenvalue equals -1.
double det2(const Mat& t);
inline double det2(const TruncatedOperator& t) { return det2(t.mat()); }

/// det(I + T1 + T2 + T1 T2) against det(I + T1) det(I + T2), relative.
VerificationReport det_multiplicativity(const Mat& t1, const Mat& t2, double tol = 1e-10);

/// Monte Carlo checks of the Gaussian-space identities, with phi1, phi2
/// independent standard Gaussian vectors and psi = phi1 + i phi2:
///  (a) E exp(i <B phi1, phi2>) = det_2(I + B)^{-1}
///  (b) E exp(-1/2 <(C - B) psi, psibar>) = det_2(I + C + B)^{-1} exp(-Tr C)
///  (c) E[psi(f1) psibar(f2) e^{..}] / E[e^{..}] = 2 <(I + C + B)^{-1} f1, f2>
///  (d) the Wick-ordered version of (b): det_2(I + C + B)^{-1}
/// Each yields a real-part row and an imaginary-part row.
std::vector<VerificationReport> gaussian_char_identities(const TruncatedOperator& c, const TruncatedOperator& b,
                                                         const Vec& f1, const Vec& f2, std::size_t count,
                                                         std::uint64_t seed, double z_threshold = 4.0,
                                                         Exec exec = Exec::parallel);

struct FourierCoefficient {
    int k;
    Complex value;
};

/// Drift b on the circle given by finitely many Fourier coefficients;
/// b_hat(-k) = conj(b_hat(k)) so b is real.
struct CircleDriftModel {
    double epsilon = 1.0;
    std::vector<FourierCoefficient> b_hat;

    void validate() const;
    int bandwidth() const;
    Complex coefficient(int k) const;
};

/// Partial sums of a nonnegative series at K/2^j, j = levels-1..0, with the
/// increments between successive levels.
struct HsReport {
    std::vector<int> cutoffs;
    std::vector<double> partial_sums;
    std::vector<double> increments;
    /// Last increment (sum at K minus sum at K/2).
    double tail_increment = 0.0;
    bool convergent = true;
    /// Frobenius norm of the truncated matrix, when one is built.
    double matrix_hs = 0.0;
};

struct CircleOperator {
    TruncatedOperator b;
    HsReport hs;
    double skew_residual = 0.0;
};

/// sum_{|k|,|l|<=K} k^2/(k^2+eps) |b_hat(l-k)|^2 / (l^2+eps).
double circle_hs_partial_sum(const CircleDriftModel& model, int cutoff);

/// Matrix of B = (-A)^{-1}(L - L_hat)/2 in the real H^1 basis
/// {1/sqrt(eps), sqrt2 cos k, sqrt2 sin k scaled by 1/sqrt(k^2+eps)}, |k| <= K,
/// with A = d^2 - eps and L - L_hat = b d/dtheta + b'/2.
CircleOperator circle_B_matrix(const CircleDriftModel& model, int cutoff);

/// Symbol a_k + i b_k of a Levy generator on the circle for k = 1..K; the
/// k = 0 term vanishes (b odd), negative k mirror positive ones.
struct LevyModel {
    std::vector<double> a;
    std::vector<double> b;

    void validate() const;
};

/// Two-sided sums 2 sum_{k<=K} (b_k/a_k)^2 at halving cutoffs. Flagged
/// divergent when the increments do not shrink as the cutoff doubles.
HsReport levy_hs_check(const LevyModel& model);

struct PointMass {
    double position;
    double weight;
};

struct EtaKernel {
    double k_xy = 0.0;
    double v_chi_xy = 0.0;
    /// V_chi(x,y) at cutoff K/2, for a convergence reading.
    double v_chi_half = 0.0;
};

/// Real H^1 basis functions at theta (length 2K+1).
Vec circle_basis(double epsilon, int cutoff, double theta);

/// K(x,y) = <eta_x, eta_y>_H and V_chi(x,y) = <(I - B + C)^{-1} eta_x, eta_y>_H
/// with C = sum p_j eta_{u_j} (x) eta_{u_j}.
EtaKernel eta_kernel(const CircleDriftModel& model, int cutoff, double x, double y, std::span<const PointMass> chi);

}  // namespace dynlab
