#include "dynlab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <fmt/core.h>

#include "dynlab/rng.hpp"

namespace dynlab {

namespace {

std::vector<double> squared_field(const CVec& z)
{
    std::vector<double> rho(static_cast<std::size_t>(z.size()));
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        rho[i] = std::norm(z(i));
    }
    return rho;
}

// E_twist[z_x zbar_y exp(-<chi,|z|^2>_m)] through the Gaussian moment formula.
double gaussian_route(const DualPair& dp, int x, int y, const ChiMeasure& chi)
{
    const Mat p = -(dp.m.asDiagonal() * dp.L) + Mat(chi.values().cwiseProduct(dp.m).asDiagonal());
    const Mat cov = Eigen::PartialPivLU<Mat>(p).inverse();
    return partition(dp, chi) / partition(dp, ChiMeasure::zero(dp.size())) * cov(x, y);
}

// E_twist[exp(-<chi,|z|^2>_m)] mu_{x,y}(exp(-<chi,l>_m)) through Phi and G_chi.
double path_route(const DualPair& dp, int x, int y, const ChiMeasure& chi)
{
    return mgf(dp, chi.values()) * green(dp, chi)(x, y);
}

std::optional<double> closed_form(const DualPair& dp, int x, int y, const FieldFunctional& f)
{
    if (f.constant_value) {
        return *f.constant_value * green(dp, ChiMeasure::zero(dp.size()))(x, y);
    }
    if (f.exp_rate) {
        return gaussian_route(dp, x, y, ChiMeasure(f.exp_rate->cwiseQuotient(dp.m)));
    }
    return std::nullopt;
}

void check_state(const DualPair& dp, int x)
{
    if (x < 0 || x >= dp.size()) {
        throw InvalidInput(fmt::format("state {} out of range", x));
    }
}

std::vector<VerificationReport> isomorphism_rows(const std::string& name, const DualPair& dp, int x, int y,
                                                 const FieldFunctional& f, std::size_t count, std::uint64_t seed,
                                                 const Tolerances& tol, std::optional<double> exact)
{
    check_state(dp, x);
    check_state(dp, y);
    const TwistedModel tm = TwistedModel::make(dp);
    const auto field_side = estimate_twisted(
        tm, 1,
        [&](const CVec& z, Rng&, std::span<Complex> out) {
            const auto rho = squared_field(z);
            out[0] = z(x) * std::conj(z(y)) * f(rho);
        },
        count, splitmix64(seed ^ 0x5111));
    const auto path_side = estimate_twisted(
        tm, 1,
        [&](const CVec& z, Rng& aux, std::span<Complex> out) {
            const auto rho = squared_field(z);
            const PathRecord path = sample_path(dp, x, aux);
            out[0] = bridge_contribution(dp, path, y, f, rho);
        },
        count, splitmix64(seed ^ 0x5222));

    const Estimate lhs = field_side.ratio(0).real();
    const Estimate rhs = path_side.ratio(0).real();
    std::vector<VerificationReport> rows;
    rows.push_back(VerificationReport::mc(name, lhs, rhs, tol.z));
    if (!exact) {
        exact = closed_form(dp, x, y, f);
    }
    if (exact) {
        rows.push_back(VerificationReport::mc_against(name + " field~exact", lhs, *exact, tol.z));
        rows.push_back(VerificationReport::mc_against(name + " path~exact", rhs, *exact, tol.z));
    }
    return rows;
}

}  // namespace

std::vector<VerificationReport> verify_star(const DualPair& dp, int x, int y, const FieldFunctional& f,
                                            std::size_t count, std::uint64_t seed, const Tolerances& tol,
                                            std::optional<double> exact)
{
    return isomorphism_rows(fmt::format("star({},{})", x, y), dp, x, y, f, count, seed, tol, exact);
}

VerificationReport verify_star_exact(const DualPair& dp, int x, int y, const ChiMeasure& chi, const Tolerances& tol)
{
    check_state(dp, x);
    check_state(dp, y);
    return VerificationReport::exact_relative(fmt::format("star-exact({},{})", x, y), gaussian_route(dp, x, y, chi),
                                              path_route(dp, x, y, chi), tol.exact);
}

std::vector<VerificationReport> verify_starstar(const DualPair& dp, int x, const FieldFunctional& f,
                                                std::size_t count, std::uint64_t seed, const Tolerances& tol,
                                                std::optional<double> exact)
{
    return isomorphism_rows(fmt::format("starstar({})", x), dp, x, x, f, count, seed, tol, exact);
}

VerificationReport verify_starstar_exact(const DualPair& dp, int x, const ChiMeasure& chi, const Tolerances& tol)
{
    check_state(dp, x);
    return VerificationReport::exact_relative(fmt::format("starstar-exact({})", x), gaussian_route(dp, x, x, chi),
                                              path_route(dp, x, x, chi), tol.exact);
}

std::vector<VerificationReport> verify_positivity(const DualPair& dp, std::size_t count, std::uint64_t seed,
                                                  const Tolerances& tol)
{
    const int n = dp.size();
    const TwistedModel tm = TwistedModel::make(dp);
    const Mat g = green(dp, ChiMeasure::zero(n));
    const Vec scale = g.diagonal();

    std::vector<ChiMeasure> chis{ChiMeasure(Vec::Constant(n, 0.5)), ChiMeasure(Vec::LinSpaced(n, 0.1, 2.0))};
    {
        Vec c = Vec::Zero(n);
        c(0) = 2.0;
        chis.emplace_back(c);
    }
    const std::vector<double> bump_centres{0.5, 1.0, 2.0};
    const int last = n - 1;
    const std::size_t outputs = 1 + chis.size() + bump_centres.size() + 1;

    const auto acc = estimate_twisted(
        tm, outputs,
        [&](const CVec& z, Rng&, std::span<Complex> out) {
            const auto rho = squared_field(z);
            std::size_t k = 0;
            out[k++] = 1.0;
            for (const auto& chi : chis) {
                double s = 0.0;
                for (int u = 0; u < n; ++u) {
                    s += chi.values()(u) * dp.m(u) * rho[u];
                }
                out[k++] = std::exp(-s);
            }
            for (const double c : bump_centres) {
                double d2 = 0.0;
                for (int u = 0; u < n; ++u) {
                    const double w = 0.5 * scale(u);
                    d2 += std::pow((rho[u] - c * scale(u)) / w, 2);
                }
                out[k++] = std::exp(-0.5 * d2);
            }
            out[k++] = rho[0] * rho[last];
        },
        count, splitmix64(seed ^ 0x9051));

    std::vector<VerificationReport> rows;
    std::size_t k = 0;
    rows.push_back(VerificationReport::exact("Q total mass", acc.ratio(k++).value.real(), 1.0, tol.exact));
    for (std::size_t c = 0; c < chis.size(); ++c, ++k) {
        const auto est = acc.ratio(k);
        rows.push_back(VerificationReport::mc_against(fmt::format("Q laplace chi{}", c), est.real(),
                                                      mgf(dp, chis[c].values()), tol.z));
        rows.push_back(VerificationReport::mc_against(fmt::format("Q laplace chi{} imag", c), est.imag(), 0.0, tol.z));
    }
    for (std::size_t c = 0; c < bump_centres.size(); ++c, ++k) {
        const auto est = acc.ratio(k);
        rows.push_back(VerificationReport::lower_bound(fmt::format("Q bump {}", bump_centres[c]), est.real(), 0.0, tol.z));
        rows.push_back(VerificationReport::mc_against(fmt::format("Q bump {} imag", bump_centres[c]), est.imag(), 0.0, tol.z));
    }
    {
        const std::vector<int> pts{0, last};
        const auto est = acc.ratio(k++);
        rows.push_back(VerificationReport::mc_against(fmt::format("Q moment rho{} rho{}", 0, last), est.real(),
                                                      q_moment(dp, pts), tol.z));
        rows.push_back(VerificationReport::lower_bound(fmt::format("Q moment rho{} rho{} >= 0", 0, last), est.real(),
                                                       0.0, tol.z));
    }

    const std::vector<double> levels = n <= 6 ? std::vector<double>{0.0, 1.0, 2.0} : std::vector<double>{0.0, 2.0};
    const auto grid = lattice_grid(n, levels);
    const int order = n <= 6 ? 4 : 3;
    for (const double p : {1.0, 2.0, 3.0}) {
        const double a = 1.0 / p;
        const auto cm = complete_monotonicity_check(dp, grid, 1e-2, order, std::span<const double>(&a, 1));
        rows.push_back(VerificationReport::exact(fmt::format("Phi^(1/{}) complete monotonicity violations", p),
                                                 static_cast<double>(cm.violations.size()), 0.0, 0.0));
    }
    apply_bonferroni(rows);
    return rows;
}

VerificationReport verify_trace(const DualPair& dp, std::span<const int> subset, std::span<const std::vector<int>> tuples,
                                const Tolerances& tol)
{
    const DualPair traced = trace_chain(dp, subset);
    std::vector<int> sorted(subset.begin(), subset.end());
    std::sort(sorted.begin(), sorted.end());
    double worst = 0.0, value = 0.0, value_y = 0.0;
    for (const auto& tuple : tuples) {
        std::vector<int> mapped;
        for (const int x : tuple) {
            const auto it = std::lower_bound(sorted.begin(), sorted.end(), x);
            if (it == sorted.end() || *it != x) {
                throw InvalidInput(fmt::format("tuple state {} is not in the trace subset", x));
            }
            mapped.push_back(static_cast<int>(it - sorted.begin()));
        }
        const double on_x = q_moment(dp, tuple), on_y = q_moment(traced, mapped);
        if (std::abs(on_x - on_y) >= worst) {
            worst = std::abs(on_x - on_y);
            value = on_x;
            value_y = on_y;
        }
    }
    auto r = VerificationReport::exact(fmt::format("trace moments |Y|={}", subset.size()), value, value_y, tol.exact);
    r.z = worst;
    r.pass = worst <= tol.exact;
    return r;
}

VerificationReport trace_potential_report(const DualPair& dp, std::span<const int> subset, const Tolerances& tol)
{
    const DualPair traced = trace_chain(dp, subset);
    std::vector<int> sorted(subset.begin(), subset.end());
    std::sort(sorted.begin(), sorted.end());
    const Mat restricted = dp.V(sorted, sorted);
    const double residual = (traced.V - restricted).cwiseAbs().maxCoeff();
    auto r = VerificationReport::exact(fmt::format("trace potential |Y|={}", subset.size()), residual, 0.0, tol.exact);
    return r;
}

std::vector<std::vector<int>> pair_tuples(std::span<const int> subset)
{
    std::vector<std::vector<int>> out;
    for (const int a : subset) {
        out.push_back({a});
        for (const int b : subset) {
            out.push_back({a, b});
        }
    }
    return out;
}

double n_chain_mass_gap(int n)
{
    return 1.0 - std::cos(std::numbers::pi / (n + 1));
}

double n_chain_mass_gap_printed(int n)
{
    const double s = std::sin(std::numbers::pi / (2.0 * n));
    return 2.0 * s * s;
}

std::vector<VerificationReport> example_suite(int n, std::size_t count, std::uint64_t seed, const Tolerances& tol)
{
    const DualPair dp = build_dual(n_chain(n));
    std::vector<VerificationReport> rows;

    // (a) Phi(s) = prod (1 + s_i)^{-1}
    {
        Rng rng = make_rng(seed, Stream::models);
        std::uniform_real_distribution<double> unit(0.0, 2.0);
        double worst = 0.0;
        for (int trial = 0; trial < 8; ++trial) {
            Vec s(n);
            for (int i = 0; i < n; ++i) {
                s(i) = unit(rng);
            }
            const double product = 1.0 / (Vec::Ones(n) + s).prod();
            worst = std::max(worst, std::abs(mgf(dp, s) - product) / product);
        }
        auto r = VerificationReport::exact("N-chain Phi factorisation", worst, 0.0, tol.exact);
        rows.push_back(r);
    }

    // (b) Q marginals are unit exponentials: E_Q[rho_x^k] = k!
    {
        const TwistedModel tm = TwistedModel::make(dp);
        const auto acc = estimate_twisted(
            tm, static_cast<std::size_t>(3 * n),
            [&](const CVec& z, Rng&, std::span<Complex> out) {
                for (int x = 0; x < n; ++x) {
                    const double rho = std::norm(z(x));
                    out[3 * x] = rho;
                    out[3 * x + 1] = rho * rho;
                    out[3 * x + 2] = rho * rho * rho;
                }
            },
            count, splitmix64(seed ^ 0xb0b));
        for (int x = 0; x < n; ++x) {
            for (int k = 1; k <= 3; ++k) {
                rows.push_back(VerificationReport::mc_against(fmt::format("N-chain E_Q[rho{}^{}]", x, k),
                                                              acc.ratio(3 * x + k - 1).real(), std::tgamma(k + 1.0),
                                                              tol.z));
            }
        }
    }

    // (c) under mu_{x,x} only l^x moves, and it is a unit exponential
    for (int x = 0; x < n; ++x) {
        for (int k = 1; k <= 3; ++k) {
            const auto f = FieldFunctional::general([x, k](std::span<const double> l) { return std::pow(l[x], k); });
            const auto est = bridge_estimate(dp, x, x, f, count, splitmix64(seed ^ (0xc000 + 16 * x + k)));
            rows.push_back(VerificationReport::mc_against(fmt::format("N-chain mu_xx[(l^{})^{}]", x, k), est,
                                                          std::tgamma(k + 1.0), tol.z));
        }
        const auto others = FieldFunctional::general([x](std::span<const double> l) {
            double s = 0.0;
            for (std::size_t u = 0; u < l.size(); ++u) {
                s += static_cast<int>(u) == x ? 0.0 : l[u];
            }
            return s;
        });
        const auto est = bridge_estimate(dp, x, x, others, count, splitmix64(seed ^ (0xd000 + x)));
        rows.push_back(VerificationReport::exact(fmt::format("N-chain mu_xx other local times ({})", x), est.value, 0.0,
                                                 tol.exact));
    }

    // (d) mass gap
    {
        const double gap = energy_report(dp).mass_gap;
        rows.push_back(VerificationReport::exact_relative("N-chain mass gap vs 1-cos(pi/(N+1))", gap,
                                                          n_chain_mass_gap(n), 1e-9));
        rows.push_back(VerificationReport::info("N-chain mass gap vs 2sin^2(pi/2N)", gap, n_chain_mass_gap_printed(n)));
    }

    // (e) diagonal identity with F = 1 and exponential F
    {
        const ChiMeasure half(Vec::Constant(n, 0.5));
        for (int x = 0; x < n; ++x) {
            rows.push_back(verify_starstar_exact(dp, x, ChiMeasure::zero(n), tol));
            rows.push_back(verify_starstar_exact(dp, x, half, tol));
        }
        const int mid = n / 2;
        for (auto& r : verify_starstar(dp, mid, FieldFunctional::constant(1.0), count, splitmix64(seed ^ 0xe1), tol)) {
            r.name = "N-chain F=1 " + r.name;
            rows.push_back(r);
        }
        for (auto& r : verify_starstar(dp, mid, FieldFunctional::exponential(half.values(), dp.m), count,
                                       splitmix64(seed ^ 0xe2), tol)) {
            r.name = "N-chain F=exp " + r.name;
            rows.push_back(r);
        }
    }
    apply_bonferroni(rows);
    return rows;
}

}  // namespace dynlab
