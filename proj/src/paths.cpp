#include "dynlab/paths.hpp"

#include <array>
#include <cmath>
#include <random>

#include <boost/math/quadrature/gauss.hpp>
#include <fmt/core.h>

#include "dynlab/blocks.hpp"

namespace dynlab {

namespace {

constexpr double quad_rel_tol = 1e-8;
constexpr int quad_max_halvings = 10;

// Composite 8-point Gauss-Legendre over [0, tau], doubling the panel count
// until successive values agree to quad_rel_tol.
template <class G>
double sojourn_integral(const G& g, double tau)
{
    using rule = boost::math::quadrature::gauss<double, 8>;
    const auto& nodes = rule::abscissa();
    const auto& weights = rule::weights();
    const auto composite = [&](int panels) {
        const double width = tau / panels;
        double sum = 0.0;
        for (int p = 0; p < panels; ++p) {
            const double mid = (p + 0.5) * width, half = 0.5 * width;
            for (std::size_t i = 0; i < nodes.size(); ++i) {
                sum += weights[i] * (g(mid - half * nodes[i]) + g(mid + half * nodes[i])) * half;
            }
        }
        return sum;
    };
    double previous = composite(1);
    for (int level = 1, panels = 2; level <= quad_max_halvings; ++level, panels *= 2) {
        const double current = composite(panels);
        if (std::abs(current - previous) <= quad_rel_tol * std::abs(current)) {
            return current;
        }
        previous = current;
    }
    return previous;
}

}  // namespace

double PathRecord::lifetime() const
{
    double t = 0.0;
    for (const auto& v : visits) {
        t += v.duration;
    }
    return t;
}

FieldFunctional FieldFunctional::constant(double c)
{
    FieldFunctional f;
    f.eval = [c](std::span<const double>) { return c; };
    f.constant_value = c;
    return f;
}

FieldFunctional FieldFunctional::exponential(const Vec& chi, const Vec& m)
{
    FieldFunctional f;
    Vec rate = chi.cwiseProduct(m);
    f.eval = [rate](std::span<const double> l) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < rate.size(); ++i) {
            s += rate(i) * l[i];
        }
        return std::exp(-s);
    };
    f.exp_rate = std::move(rate);
    return f;
}

FieldFunctional FieldFunctional::general(std::function<double(std::span<const double>)> fn)
{
    FieldFunctional f;
    f.eval = std::move(fn);
    return f;
}

PathRecord sample_path(const DualPair& dp, int start, Rng& rng)
{
    const int n = dp.size();
    if (start < 0 || start >= n) {
        throw InvalidInput(fmt::format("start state {} out of range", start));
    }
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    PathRecord path;
    int x = start;
    while (true) {
        std::exponential_distribution<double> hold(dp.q()(x));
        path.visits.push_back({x, hold(rng)});
        double u = unit(rng);
        int next = -1;
        for (int y = 0; y < n; ++y) {
            u -= dp.pi()(x, y);
            if (u < 0.0) {
                next = y;
                break;
            }
        }
        if (next < 0) {
            break;
        }
        x = next;
    }
    path.killed = true;
    return path;
}

PathRecord sample_path(const DualPair& dp, int start, std::uint64_t seed)
{
    Rng rng = make_rng(seed, Stream::paths);
    return sample_path(dp, start, rng);
}

Vec occupation(const DualPair& dp, const PathRecord& path)
{
    Vec l = Vec::Zero(dp.size());
    for (const auto& v : path.visits) {
        l(v.state) += v.duration;
    }
    return l.cwiseQuotient(dp.m);
}

double bridge_contribution(const DualPair& dp, const PathRecord& path, int y, const FieldFunctional& f,
                           std::span<const double> shift)
{
    const int n = dp.size();
    std::vector<double> l(shift.begin(), shift.end());
    if (static_cast<int>(l.size()) != n) {
        throw InvalidInput("bridge_contribution shift has the wrong size");
    }
    const double my = dp.m(y);
    double total = 0.0;
    std::vector<double> probe(n);
    for (const auto& v : path.visits) {
        if (v.state == y) {
            if (f.constant_value) {
                total += *f.constant_value * v.duration / my;
            } else if (f.exp_rate) {
                const Vec& rate = *f.exp_rate;
                double c = 0.0;
                for (int u = 0; u < n; ++u) {
                    c += rate(u) * l[u];
                }
                const double a = rate(y) / my;
                const double integral = a > 0.0 ? -std::expm1(-a * v.duration) / a : v.duration;
                total += std::exp(-c) * integral / my;
            } else {
                const double base = l[y];
                const auto g = [&](double u) {
                    probe = l;
                    probe[y] = base + u / my;
                    return f(probe);
                };
                total += sojourn_integral(g, v.duration) / my;
            }
        }
        l[v.state] += v.duration / dp.m(v.state);
    }
    return total;
}

Estimate bridge_estimate(const DualPair& dp, int x, int y, const FieldFunctional& f, std::size_t count,
                         std::uint64_t seed, Exec exec)
{
    if (count < 1) {
        throw InvalidInput("bridge_estimate needs count >= 1");
    }
    if (y < 0 || y >= dp.size()) {
        throw InvalidInput(fmt::format("target state {} out of range", y));
    }
    const std::vector<double> zero(dp.size(), 0.0);
    const auto kernel = [&](std::size_t b, std::size_t begin, std::size_t end) {
        Rng rng = make_rng(seed, Stream::paths, b);
        MeanAccumulator acc(1);
        for (std::size_t i = begin; i < end; ++i) {
            const PathRecord path = sample_path(dp, x, rng);
            const double h = bridge_contribution(dp, path, y, f, zero);
            acc.add(std::span<const double>(&h, 1));
        }
        return acc;
    };
    return run_blocks<MeanAccumulator>(count, exec, kernel).result(0);
}

Estimate lifetime_estimate(const DualPair& dp, int x, std::size_t count, std::uint64_t seed, Exec exec)
{
    const auto kernel = [&](std::size_t b, std::size_t begin, std::size_t end) {
        Rng rng = make_rng(seed, Stream::paths, b);
        MeanAccumulator acc(1);
        for (std::size_t i = begin; i < end; ++i) {
            const double t = sample_path(dp, x, rng).lifetime();
            acc.add(std::span<const double>(&t, 1));
        }
        return acc;
    };
    return run_blocks<MeanAccumulator>(count, exec, kernel).result(0);
}

std::vector<Estimate> occupation_estimate(const DualPair& dp, int x, std::size_t count, std::uint64_t seed, Exec exec)
{
    const int n = dp.size();
    const auto kernel = [&](std::size_t b, std::size_t begin, std::size_t end) {
        Rng rng = make_rng(seed, Stream::paths, b);
        MeanAccumulator acc(n);
        for (std::size_t i = begin; i < end; ++i) {
            const Vec l = occupation(dp, sample_path(dp, x, rng));
            acc.add(std::span<const double>(l.data(), n));
        }
        return acc;
    };
    const auto acc = run_blocks<MeanAccumulator>(count, exec, kernel);
    std::vector<Estimate> out;
    for (int y = 0; y < n; ++y) {
        out.push_back(acc.result(y));
    }
    return out;
}

}  // namespace dynlab
