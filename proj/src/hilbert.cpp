#include "dynlab/hilbert.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include <fmt/core.h>

#include "dynlab/blocks.hpp"
#include "dynlab/estimators.hpp"
#include "dynlab/rng.hpp"

namespace dynlab {

namespace {

constexpr double kind_tol = 1e-12;

double det_plus_identity(const Mat& t)
{
    return Eigen::PartialPivLU<Mat>(Mat::Identity(t.rows(), t.cols()) + t).determinant();
}

HsReport series_report(const std::vector<int>& cutoffs, const std::vector<double>& sums)
{
    HsReport r;
    r.cutoffs = cutoffs;
    r.partial_sums = sums;
    for (std::size_t i = 1; i < sums.size(); ++i) {
        r.increments.push_back(sums[i] - sums[i - 1]);
    }
    if (!r.increments.empty()) {
        r.tail_increment = r.increments.back();
    }
    if (r.increments.size() >= 2) {
        const double last = r.increments.back(), prev = r.increments[r.increments.size() - 2];
        r.convergent = last <= 1e-15 || last <= 0.75 * prev;
    }
    return r;
}

// Cutoffs K/2^j (ascending) that stay >= floor.
std::vector<int> halving_cutoffs(int cutoff, int floor, int levels = 4)
{
    std::vector<int> out;
    for (int c = cutoff, j = 0; j < levels && c >= std::max(floor, 1); c /= 2, ++j) {
        out.push_back(c);
    }
    std::reverse(out.begin(), out.end());
    return out;
}

}  // namespace

TruncatedOperator::TruncatedOperator(Mat mat, OperatorKind kind) : mat_(std::move(mat)), kind_(kind)
{
    if (mat_.rows() != mat_.cols()) {
        throw InvalidInput("truncated operator must be square");
    }
    const double scale = std::max(1.0, mat_.cwiseAbs().maxCoeff());
    if (kind_ == OperatorKind::symmetric_nonneg) {
        if ((mat_ - mat_.transpose()).cwiseAbs().maxCoeff() > kind_tol * scale) {
            throw InvalidInput("operator tagged symmetric is not symmetric");
        }
        if (mat_.size() > 0) {
            const Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (mat_ + mat_.transpose()), Eigen::EigenvaluesOnly);
            if (es.eigenvalues().minCoeff() < -kind_tol * scale) {
                throw InvalidInput("operator tagged nonnegative has a negative eigenvalue");
            }
        }
    } else if (kind_ == OperatorKind::skew) {
        if ((mat_ + mat_.transpose()).cwiseAbs().maxCoeff() > kind_tol * scale) {
            throw InvalidInput("operator tagged skew is not skew-symmetric");
        }
    }
}

double det2(const Mat& t)
{
    if (t.rows() != t.cols()) {
        throw InvalidInput("det2 needs a square matrix");
    }
    if (t.size() == 0) {
        return 1.0;
    }
    const Eigen::EigenSolver<Mat> es(t, false);
    if (es.info() != Eigen::Success) {
        throw NumericalError("eigensolver failed in det2");
    }
    Complex product(1.0, 0.0);
    for (const Complex& lambda : es.eigenvalues()) {
        const Complex shifted = 1.0 + lambda;
        if (std::abs(shifted) < 1e-14) {
            return 0.0;
        }
        product *= shifted * std::exp(-lambda);
    }
    // Real input: eigenvalues come in conjugate pairs, so the product is real.
    if (std::abs(product.imag()) > 1e-8 * std::abs(product)) {
        throw NumericalError("det2 eigenvalues are not conjugate-paired");
    }
    return product.real();
}

VerificationReport det_multiplicativity(const Mat& t1, const Mat& t2, double tol)
{
    const double lhs = det_plus_identity(t1 + t2 + t1 * t2);
    const double rhs = det_plus_identity(t1) * det_plus_identity(t2);
    return VerificationReport::exact_relative("det multiplicativity", lhs, rhs, tol);
}

namespace {

struct IdentityAcc {
    RatioAccumulator plain{3};
    RatioAccumulator tilted{1};

    void merge(const IdentityAcc& o)
    {
        plain.merge(o.plain);
        tilted.merge(o.tilted);
    }
};

}  // namespace

std::vector<VerificationReport> gaussian_char_identities(const TruncatedOperator& c, const TruncatedOperator& b,
                                                         const Vec& f1, const Vec& f2, std::size_t count,
                                                         std::uint64_t seed, double z_threshold, Exec exec)
{
    if (c.kind() != OperatorKind::symmetric_nonneg) {
        throw InvalidInput("C must be symmetric nonnegative");
    }
    if (b.kind() != OperatorKind::skew) {
        throw InvalidInput("B must be skew-symmetric");
    }
    const int n = c.dim();
    if (b.dim() != n || f1.size() != n || f2.size() != n) {
        throw InvalidInput("dimension mismatch in gaussian_char_identities");
    }
    if (count < 2) {
        throw InvalidInput("gaussian_char_identities needs count >= 2");
    }
    const CMat c_minus_b = (c.mat() - b.mat()).cast<Complex>();
    const double trace_c = c.mat().trace();
    const CVec cf1 = f1.cast<Complex>(), cf2 = f2.cast<Complex>();

    const auto kernel = [&](std::size_t blk, std::size_t begin, std::size_t end) {
        Rng rng = make_rng(seed, Stream::identities, blk);
        std::normal_distribution<double> normal;
        Vec phi1(n), phi2(n);
        CVec psi(n);
        IdentityAcc acc;
        std::array<Complex, 3> plain{};
        for (std::size_t i = begin; i < end; ++i) {
            for (int k = 0; k < n; ++k) {
                phi1(k) = normal(rng);
                phi2(k) = normal(rng);
            }
            psi.real() = phi1;
            psi.imag() = phi2;
            const double bilinear = phi2.dot(b.mat() * phi1);
            const Complex exponent = -0.5 * psi.dot(c_minus_b * psi);
            const Complex tilt = std::exp(exponent);
            plain[0] = std::exp(Complex(0.0, bilinear));
            plain[1] = tilt;
            plain[2] = std::exp(exponent + trace_c);
            acc.plain.add(1.0, plain);
            const Complex pair = cf1.dot(psi) * std::conj(cf2.dot(psi));
            // cf.dot(psi) conjugates cf, which is real.
            acc.tilted.add(tilt, std::span<const Complex>(&pair, 1));
        }
        return acc;
    };
    const IdentityAcc acc = run_blocks<IdentityAcc>(count, exec, kernel);

    const Mat cb = c.mat() + b.mat();
    const Mat resolvent = Eigen::PartialPivLU<Mat>(Mat::Identity(n, n) + cb).inverse();
    const double target_a = 1.0 / det2(b.mat());
    const double target_b = std::exp(-trace_c) / det2(cb);
    const double target_c = 2.0 * f2.dot(resolvent * f1);
    const double target_d = 1.0 / det2(cb);

    std::vector<VerificationReport> rows;
    const auto add = [&](const char* name, const ComplexEstimate& est, double target) {
        rows.push_back(VerificationReport::mc_against(fmt::format("gauss {} real", name), est.real(), target, z_threshold));
        rows.push_back(VerificationReport::mc_against(fmt::format("gauss {} imag", name), est.imag(), 0.0, z_threshold));
    };
    add("(a) E exp(i<B phi1,phi2>)", acc.plain.ratio(0), target_a);
    add("(b) E exp(-<(C-B)psi,psibar>/2)", acc.plain.ratio(1), target_b);
    add("(c) resolvent correlation", acc.tilted.ratio(0), target_c);
    add("(d) Wick-ordered normalisation", acc.plain.ratio(2), target_d);
    return rows;
}

void CircleDriftModel::validate() const
{
    if (!(epsilon > 0.0)) {
        throw InvalidInput("circle drift needs epsilon > 0");
    }
    std::map<int, Complex> coeffs;
    for (const auto& c : b_hat) {
        if (!coeffs.emplace(c.k, c.value).second) {
            throw InvalidInput(fmt::format("duplicate Fourier coefficient for k = {}", c.k));
        }
    }
    for (const auto& [k, v] : coeffs) {
        const auto it = coeffs.find(-k);
        const Complex mirror = it == coeffs.end() ? Complex{} : it->second;
        if (std::abs(mirror - std::conj(v)) > 1e-12 * std::max(1.0, std::abs(v))) {
            throw InvalidInput(fmt::format("b_hat({}) is not the conjugate of b_hat({}): b must be real", -k, k));
        }
    }
}

int CircleDriftModel::bandwidth() const
{
    int w = 0;
    for (const auto& c : b_hat) {
        if (c.value != Complex{}) {
            w = std::max(w, std::abs(c.k));
        }
    }
    return w;
}

Complex CircleDriftModel::coefficient(int k) const
{
    for (const auto& c : b_hat) {
        if (c.k == k) {
            return c.value;
        }
    }
    return {};
}

double circle_hs_partial_sum(const CircleDriftModel& model, int cutoff)
{
    model.validate();
    const double eps = model.epsilon;
    double sum = 0.0;
    for (int k = -cutoff; k <= cutoff; ++k) {
        const double kk = static_cast<double>(k) * k;
        for (const auto& c : model.b_hat) {
            const int l = k + c.k;
            if (std::abs(l) > cutoff) {
                continue;
            }
            const double ll = static_cast<double>(l) * l;
            sum += kk / (kk + eps) * std::norm(c.value) / (ll + eps);
        }
    }
    return sum;
}

CircleOperator circle_B_matrix(const CircleDriftModel& model, int cutoff)
{
    model.validate();
    if (cutoff < model.bandwidth() || cutoff < 0) {
        throw InvalidInput(fmt::format("cutoff {} is below the drift bandwidth {}", cutoff, model.bandwidth()));
    }
    const int dim = 2 * cutoff + 1;
    const double eps = model.epsilon;
    const auto idx = [cutoff](int k) { return k + cutoff; };

    // <D e_k, e_l>_{L^2} for the H-normalised exponentials, D = (b d + b'/2)/2.
    CMat exp_basis = CMat::Zero(dim, dim);
    for (int k = -cutoff; k <= cutoff; ++k) {
        for (const auto& c : model.b_hat) {
            const int l = k + c.k;
            if (std::abs(l) > cutoff) {
                continue;
            }
            const double norm = std::sqrt((k * k + eps) * (static_cast<double>(l) * l + eps));
            exp_basis(idx(l), idx(k)) = Complex(0.0, 0.25) * c.value * static_cast<double>(k + l) / norm;
        }
    }

    CMat u = CMat::Zero(dim, dim);
    const double r = std::numbers::sqrt2 / 2.0;
    u(idx(0), 0) = 1.0;
    for (int k = 1; k <= cutoff; ++k) {
        u(idx(k), 2 * k - 1) = r;
        u(idx(-k), 2 * k - 1) = r;
        u(idx(k), 2 * k) = Complex(0.0, -r);
        u(idx(-k), 2 * k) = Complex(0.0, r);
    }
    const CMat real_basis = u.adjoint() * exp_basis * u;
    const double scale = std::max(1.0, real_basis.cwiseAbs().maxCoeff());
    if (real_basis.imag().cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw NumericalError("circle operator is not real in the real basis");
    }
    Mat b = real_basis.real();
    const double skew_residual = (b + b.transpose()).cwiseAbs().maxCoeff();
    if (skew_residual > 1e-10) {
        throw NumericalError(fmt::format("circle operator skewness residual {}", skew_residual));
    }

    std::vector<int> cutoffs = halving_cutoffs(cutoff, model.bandwidth());
    std::vector<double> sums;
    for (const int c : cutoffs) {
        sums.push_back(circle_hs_partial_sum(model, c));
    }
    HsReport hs = series_report(cutoffs, sums);
    hs.matrix_hs = b.norm();
    return {TruncatedOperator(std::move(b), OperatorKind::skew), std::move(hs), skew_residual};
}

void LevyModel::validate() const
{
    if (a.size() != b.size()) {
        throw InvalidInput(fmt::format("Levy model has {} a-coefficients and {} b-coefficients", a.size(), b.size()));
    }
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (!(a[k] > 0.0)) {
            throw InvalidInput(fmt::format("a_{} = {} must be positive", k + 1, a[k]));
        }
    }
}

HsReport levy_hs_check(const LevyModel& model)
{
    model.validate();
    const int cutoff = static_cast<int>(model.a.size());
    std::vector<double> prefix(cutoff + 1, 0.0);
    for (int k = 1; k <= cutoff; ++k) {
        const double ratio = model.b[k - 1] / model.a[k - 1];
        prefix[k] = prefix[k - 1] + 2.0 * ratio * ratio;
    }
    const auto cutoffs = halving_cutoffs(cutoff, 1);
    std::vector<double> sums;
    for (const int c : cutoffs) {
        sums.push_back(prefix[c]);
    }
    return series_report(cutoffs, sums);
}

Vec circle_basis(double epsilon, int cutoff, double theta)
{
    Vec e(2 * cutoff + 1);
    e(0) = 1.0 / std::sqrt(epsilon);
    for (int k = 1; k <= cutoff; ++k) {
        const double s = std::numbers::sqrt2 / std::sqrt(k * k + epsilon);
        e(2 * k - 1) = s * std::cos(k * theta);
        e(2 * k) = s * std::sin(k * theta);
    }
    return e;
}

namespace {

double v_chi(const CircleDriftModel& model, int cutoff, double x, double y, std::span<const PointMass> chi)
{
    const Mat b = circle_B_matrix(model, cutoff).b.mat();
    const int dim = 2 * cutoff + 1;
    Mat op = Mat::Identity(dim, dim) - b;
    for (const auto& p : chi) {
        if (!(p.weight >= 0.0)) {
            throw InvalidInput("point masses must be nonnegative");
        }
        const Vec v = circle_basis(model.epsilon, cutoff, p.position);
        op += p.weight * v * v.transpose();
    }
    const Vec ex = circle_basis(model.epsilon, cutoff, x);
    const Vec ey = circle_basis(model.epsilon, cutoff, y);
    return ey.dot(Eigen::PartialPivLU<Mat>(op).solve(ex));
}

}  // namespace

EtaKernel eta_kernel(const CircleDriftModel& model, int cutoff, double x, double y, std::span<const PointMass> chi)
{
    EtaKernel r;
    r.k_xy = circle_basis(model.epsilon, cutoff, x).dot(circle_basis(model.epsilon, cutoff, y));
    r.v_chi_xy = v_chi(model, cutoff, x, y, chi);
    const int half = std::max(cutoff / 2, model.bandwidth());
    r.v_chi_half = v_chi(model, half, x, y, chi);
    return r;
}

}  // namespace dynlab
