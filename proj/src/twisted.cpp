#include "dynlab/twisted.hpp"

#include <cmath>
#include <random>

#include <fmt/core.h>

#include "dynlab/blocks.hpp"
#include "dynlab/permanent.hpp"

namespace dynlab {

namespace {

double det_lu(const Mat& a)
{
    const Eigen::PartialPivLU<Mat> lu(a);
    const double d = lu.determinant();
    if (!std::isfinite(d) || d == 0.0) {
        throw NumericalError("singular matrix in determinant evaluation");
    }
    return d;
}

void check_size(const DualPair& dp, Eigen::Index size, const char* what)
{
    if (size != dp.size()) {
        throw InvalidInput(fmt::format("{} has {} entries, chain has {} states", what, size, dp.size()));
    }
}

// Richardson extrapolation of a central-difference estimate whose error is a
// series in h^2.
template <class F>
double extrapolate(const F& estimate, double h, int levels)
{
    std::vector<double> row(levels);
    for (int i = 0; i < levels; ++i) {
        row[i] = estimate(h / std::pow(2.0, i));
    }
    for (int j = 1; j < levels; ++j) {
        const double factor = std::pow(4.0, j);
        for (int i = levels - 1; i >= j; --i) {
            row[i] = (factor * row[i] - row[i - 1]) / (factor - 1.0);
        }
    }
    return row[levels - 1];
}

}  // namespace

ChiMeasure::ChiMeasure(Vec chi) : chi_(std::move(chi))
{
    for (Eigen::Index i = 0; i < chi_.size(); ++i) {
        if (!(chi_(i) >= 0.0) || !std::isfinite(chi_(i))) {
            throw InvalidInput(fmt::format("chi[{}] = {} must be finite and nonnegative", i, chi_(i)));
        }
    }
}

double partition(const DualPair& dp, const ChiMeasure& chi)
{
    check_size(dp, chi.size(), "chi");
    const Mat p = -(dp.m.asDiagonal() * dp.L) + Mat(chi.values().cwiseProduct(dp.m).asDiagonal());
    return 1.0 / det_lu(p);
}

Mat green(const DualPair& dp, const ChiMeasure& chi)
{
    check_size(dp, chi.size(), "chi");
    const Mat op = -dp.L + Mat(chi.values().asDiagonal());
    const Eigen::PartialPivLU<Mat> lu(op);
    return lu.inverse() * dp.m.cwiseInverse().asDiagonal();
}

double mgf(const DualPair& dp, const Vec& s)
{
    check_size(dp, s.size(), "s");
    const int n = dp.size();
    return 1.0 / det_lu(Mat::Identity(n, n) + dp.V * s.asDiagonal());
}

TwistedModel TwistedModel::make(const DualPair& dp)
{
    TwistedModel tm;
    tm.dp = dp;
    Mat precision = -(dp.m.asDiagonal() * dp.A);
    precision = 0.5 * (precision + precision.transpose()).eval();
    const Eigen::LLT<Mat> pllt(precision);
    if (pllt.info() != Eigen::Success) {
        throw InvalidInput("symmetric part of -M_m L is not positive definite");
    }
    tm.base_cov = pllt.solve(Mat::Identity(dp.size(), dp.size()));
    tm.base_cov = 0.5 * (tm.base_cov + tm.base_cov.transpose()).eval();
    const Eigen::LLT<Mat> cllt(tm.base_cov);
    if (cllt.info() != Eigen::Success) {
        throw InvalidInput("base covariance is not positive definite");
    }
    tm.base_factor = cllt.matrixL();
    const Mat form = dp.m.asDiagonal() * (dp.L - dp.A);
    tm.skew_form = 0.5 * (form - form.transpose());
    return tm;
}

Complex TwistedModel::weight(const CVec& z) const
{
    // z^H S z is purely imaginary for real skew S: 2i sum_{x<y} S_xy Im(conj(z_x) z_y).
    double phase = 0.0;
    const auto n = z.size();
    for (Eigen::Index x = 0; x < n; ++x) {
        for (Eigen::Index y = x + 1; y < n; ++y) {
            phase += skew_form(x, y) * (std::conj(z(x)) * z(y)).imag();
        }
    }
    phase *= 2.0;
    return {std::cos(phase), std::sin(phase)};
}

double TwistedModel::exact_weight_mean() const
{
    return det_lu(-(dp.m.asDiagonal() * dp.A)) / det_lu(-(dp.m.asDiagonal() * dp.L));
}

namespace {

struct FieldDraw {
    std::normal_distribution<double> normal;
    Vec re, im;

    explicit FieldDraw(int n) : re(n), im(n) {}

    void draw(const TwistedModel& tm, Rng& rng, CVec& z)
    {
        for (Eigen::Index i = 0; i < re.size(); ++i) {
            re(i) = normal(rng);
            im(i) = normal(rng);
        }
        const double scale = std::sqrt(0.5);
        z.real() = scale * (tm.base_factor * re);
        z.imag() = scale * (tm.base_factor * im);
    }
};

}  // namespace

std::vector<WeightedFieldSample> sample_twisted(const TwistedModel& model, std::size_t count, std::uint64_t seed)
{
    if (count < 1) {
        throw InvalidInput("sample_twisted needs count >= 1");
    }
    std::vector<WeightedFieldSample> out(count);
    const BlockPlan plan(count);
    const int n = model.dp.size();
    for (std::size_t b = 0; b < plan.blocks(); ++b) {
        Rng rng = make_rng(seed, Stream::gaussian, b);
        FieldDraw draw(n);
        for (std::size_t i = plan.begin(b); i < plan.end(b); ++i) {
            out[i].z.resize(n);
            draw.draw(model, rng, out[i].z);
            out[i].w = model.weight(out[i].z);
        }
    }
    return out;
}

RatioAccumulator estimate_twisted(const TwistedModel& model, std::size_t outputs, const TwistedIntegrand& f,
                                  std::size_t count, std::uint64_t seed, Exec exec)
{
    if (count < 1) {
        throw InvalidInput("estimate_twisted needs count >= 1");
    }
    const int n = model.dp.size();
    const auto kernel = [&](std::size_t b, std::size_t begin, std::size_t end) {
        Rng rng = make_rng(seed, Stream::gaussian, b);
        Rng aux = make_rng(seed, Stream::paths, b);
        FieldDraw draw(n);
        CVec z(n);
        std::vector<Complex> values(outputs);
        RatioAccumulator acc(outputs);
        for (std::size_t i = begin; i < end; ++i) {
            draw.draw(model, rng, z);
            f(z, aux, values);
            acc.add(model.weight(z), values);
        }
        return acc;
    };
    return run_blocks<RatioAccumulator>(count, exec, kernel);
}

std::vector<Vec> lattice_grid(int n, std::span<const double> levels)
{
    std::vector<Vec> grid;
    std::vector<std::size_t> idx(n, 0);
    const std::size_t k = levels.size();
    if (k == 0 || n < 1) {
        return grid;
    }
    while (true) {
        Vec p(n);
        for (int i = 0; i < n; ++i) {
            p(i) = levels[idx[i]];
        }
        grid.push_back(std::move(p));
        int i = 0;
        while (i < n && ++idx[i] == k) {
            idx[i++] = 0;
        }
        if (i == n) {
            break;
        }
    }
    return grid;
}

CmReport complete_monotonicity_check(const DualPair& dp, std::span<const Vec> grid, double h, int max_order,
                                     std::span<const double> exponents, double slack)
{
    if (!(h > 0.0) || max_order < 1 || max_order > 5) {
        throw InvalidInput("complete_monotonicity_check needs h > 0 and 1 <= max_order <= 5");
    }
    const int n = dp.size();
    CmReport report;
    for (const Vec& base : grid) {
        check_size(dp, base.size(), "grid point");
        if (base.minCoeff() < 0.0) {
            throw InvalidInput("grid points must be nonnegative");
        }
        for (int order = 1; order <= max_order; ++order) {
            // Nondecreasing direction sequences: each multiset of order `order`.
            std::vector<int> dirs(order, 0);
            while (true) {
                const unsigned corners = 1U << order;
                std::vector<double> phi(corners);
                for (unsigned mask = 0; mask < corners; ++mask) {
                    Vec s = base;
                    for (int i = 0; i < order; ++i) {
                        if (mask >> i & 1U) {
                            s(dirs[i]) += h;
                        }
                    }
                    phi[mask] = mgf(dp, s);
                }
                for (const double a : exponents) {
                    double diff = 0.0;
                    for (unsigned mask = 0; mask < corners; ++mask) {
                        const int missing = order - std::popcount(mask);
                        const double v = std::pow(phi[mask], a);
                        diff += (missing & 1) ? -v : v;
                    }
                    const double signed_diff = (order & 1) ? -diff : diff;
                    ++report.checked;
                    if (signed_diff < -slack) {
                        report.violations.push_back({a, base, dirs, signed_diff});
                    }
                }
                int i = order - 1;
                while (i >= 0 && dirs[i] == n - 1) {
                    --i;
                }
                if (i < 0) {
                    break;
                }
                const int next = dirs[i] + 1;
                for (int j = i; j < order; ++j) {
                    dirs[j] = next;
                }
            }
        }
    }
    return report;
}

TraceCheck mgf_trace_check(const DualPair& dp, const Vec& s, int u)
{
    check_size(dp, s.size(), "s");
    const int n = dp.size();
    const Mat resolvent = Eigen::PartialPivLU<Mat>(-dp.L + Mat(s.asDiagonal())).inverse();
    const auto log_det = [&](double t) {
        Mat a = Mat::Identity(n, n);
        a.col(u) += t * resolvent.col(u);
        return std::log(det_lu(a));
    };
    const double fd = extrapolate([&](double t) { return (log_det(t) - log_det(-t)) / (2.0 * t); }, 1e-2, 4);
    return {fd, resolvent(u, u)};
}

double q_moment(const DualPair& dp, std::span<const int> points)
{
    const auto k = static_cast<Eigen::Index>(points.size());
    if (k < 1 || k > 8) {
        throw InvalidInput("q_moment needs between 1 and 8 points");
    }
    const Mat g = green(dp, ChiMeasure::zero(dp.size()));
    Mat sub(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        for (Eigen::Index j = 0; j < k; ++j) {
            sub(i, j) = g(points[i], points[j]);
        }
    }
    return permanent(sub, Exec::serial);
}

double mgf_moment(const DualPair& dp, std::span<const int> points)
{
    const int k = static_cast<int>(points.size());
    if (k < 1 || k > 6) {
        throw InvalidInput("mgf_moment needs between 1 and 6 points");
    }
    const int n = dp.size();
    double mass = 1.0;
    for (const int x : points) {
        if (x < 0 || x >= n) {
            throw InvalidInput("mgf_moment point out of range");
        }
        mass *= dp.m(x);
    }
    // Steps are measured against V_xx, the scale on which Phi varies in s_x.
    // Phi is analytic near 0, so small negative arguments are fine here.
    const auto mixed = [&](double h) {
        double sum = 0.0, width = 1.0;
        for (int i = 0; i < k; ++i) {
            width *= 2.0 * h / dp.V(points[i], points[i]);
        }
        for (unsigned mask = 0; mask < (1U << k); ++mask) {
            Vec s = Vec::Zero(n);
            int sign = 1;
            for (int i = 0; i < k; ++i) {
                const bool up = mask >> i & 1U;
                const double step = h / dp.V(points[i], points[i]);
                s(points[i]) += up ? step : -step;
                sign *= up ? 1 : -1;
            }
            sum += sign / det_lu(Mat::Identity(n, n) + dp.V * s.asDiagonal());
        }
        return sum / width;
    };
    const double derivative = extrapolate(mixed, 0.05, 4);
    return ((k & 1) ? -derivative : derivative) / mass;
}

}  // namespace dynlab
