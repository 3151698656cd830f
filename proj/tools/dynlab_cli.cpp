#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "CLI11.hpp"

#include "dynlab/chain.hpp"
#include "dynlab/harness.hpp"
#include "dynlab/hilbert.hpp"
#include "dynlab/io.hpp"
#include "dynlab/permanent.hpp"
#include "dynlab/random_models.hpp"
#include "dynlab/report.hpp"
#include "dynlab/twisted.hpp"

using namespace dynlab;

namespace {

constexpr int exit_parse = 2;
constexpr int exit_numerical = 3;

struct RunConfig {
    std::string input;
    std::uint64_t seed = 1;
    std::size_t samples = 100000;
    std::string out;
    std::optional<double> tol;
    double z = 4.0;
    double tail_tol = 0.0;
    int n = 5;
    int dim = 6;
    int cutoff = 128;
    std::vector<int> subset;
    bool timing = false;
};

Tolerances tolerances(const RunConfig& cfg)
{
    Tolerances t;
    if (cfg.tol) {
        t.exact = *cfg.tol;
    }
    t.z = cfg.z;
    return t;
}

const std::string& require_input(const RunConfig& cfg)
{
    if (cfg.input.empty()) {
        throw InvalidInput("--input is required for this command");
    }
    return cfg.input;
}

// Shortest round-trip form, always with a decimal point or exponent.
std::string number(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    std::string s(buf, res.ptr);
    if (s.find_first_of(".eni") == std::string::npos) {
        s += ".0";
    }
    return s;
}

std::vector<VerificationReport> verify_iso(const RunConfig& cfg)
{
    const DualPair dp = build_dual(load_chain_spec(require_input(cfg)));
    const Tolerances tol = tolerances(cfg);
    const int n = dp.size();
    const ChiMeasure chi(random_vector(n, splitmix64(cfg.seed ^ 0x1), 0.0, 1.0).cwiseAbs());
    std::vector<VerificationReport> rows;
    for (int x = 0; x < n; ++x) {
        for (int y = 0; y < n; ++y) {
            rows.push_back(verify_star_exact(dp, x, y, chi, tol));
        }
        rows.push_back(verify_starstar_exact(dp, x, chi, tol));
    }
    const auto exp_f = FieldFunctional::exponential(chi.values(), dp.m);
    const auto resolvent_f = FieldFunctional::general([](std::span<const double> rho) {
        double v = 1.0;
        for (double r : rho) {
            v /= 1.0 + r;
        }
        return v;
    });
    auto append = [&rows](std::vector<VerificationReport> more) {
        rows.insert(rows.end(), more.begin(), more.end());
    };
    append(verify_star(dp, 0, n - 1, exp_f, cfg.samples, splitmix64(cfg.seed ^ 0x2), tol));
    append(verify_star(dp, n - 1, 0, resolvent_f, cfg.samples, splitmix64(cfg.seed ^ 0x3), tol));
    append(verify_starstar(dp, 0, FieldFunctional::constant(1.0), cfg.samples, splitmix64(cfg.seed ^ 0x4), tol));
    append(verify_starstar(dp, 0, resolvent_f, cfg.samples, splitmix64(cfg.seed ^ 0x5), tol));
    apply_bonferroni(rows);
    return rows;
}

std::vector<VerificationReport> verify_q(const RunConfig& cfg)
{
    const DualPair dp = build_dual(load_chain_spec(require_input(cfg)));
    const Tolerances tol = tolerances(cfg);
    std::vector<VerificationReport> rows = verify_positivity(dp, cfg.samples, cfg.seed, tol);
    const int n = dp.size();
    const double moment_tol = cfg.tol.value_or(1e-6);
    for (int x = 0; x < n; ++x) {
        for (int y = x; y < n; ++y) {
            const std::vector<int> pts{x, y};
            rows.push_back(VerificationReport::exact_relative(fmt::format("moment {} {}", x, y), q_moment(dp, pts),
                                                              mgf_moment(dp, pts), moment_tol));
        }
    }
    return rows;
}

std::vector<VerificationReport> mass_gap(const RunConfig& cfg)
{
    const DualPair dp = build_dual(load_chain_spec(require_input(cfg)));
    const EnergyReport er = energy_report(dp);
    std::cout << number(er.mass_gap) << '\n';
    std::vector<VerificationReport> rows;
    rows.push_back(VerificationReport::info("mass gap", er.mass_gap, er.mass_gap));
    rows.push_back(VerificationReport::exact("killing nonnegative", std::min(0.0, er.killing.minCoeff()), 0.0,
                                             cfg.tol.value_or(1e-12)));
    return rows;
}

std::vector<VerificationReport> mgf_check(const RunConfig& cfg)
{
    const DualPair dp = build_dual(load_chain_spec(require_input(cfg)));
    const int n = dp.size();
    const double tol = cfg.tol.value_or(1e-12);
    std::vector<VerificationReport> rows;
    rows.push_back(VerificationReport::exact("potential", (dp.V * (-dp.L) - Mat::Identity(n, n)).cwiseAbs().maxCoeff(),
                                             0.0, cfg.tol.value_or(1e-10)));
    for (int t = 0; t < 5; ++t) {
        const Vec s = random_vector(n, splitmix64(cfg.seed + static_cast<std::uint64_t>(t)), 0.0, 2.0);
        const double ratio = partition(dp, ChiMeasure(s)) / partition(dp, ChiMeasure::zero(n));
        rows.push_back(VerificationReport::exact_relative(fmt::format("mgf {}", t), mgf(dp, s), ratio, tol));
    }
    const Vec s = random_vector(n, splitmix64(cfg.seed ^ 0x77), 0.0, 1.0);
    for (int u = 0; u < n; ++u) {
        const TraceCheck tc = mgf_trace_check(dp, s, u);
        rows.push_back(VerificationReport::exact(fmt::format("trace {}", u), tc.finite_difference, tc.trace,
                                                 cfg.tol.value_or(1e-8)));
    }
    const std::vector<double> levels{0.0, 0.5, 2.0};
    const std::vector<double> exponents{1.0, 0.5, 1.0 / 3.0};
    const int order = n <= 5 ? 4 : 3;
    const auto grid = lattice_grid(n, n <= 6 ? std::span<const double>(levels) : std::span<const double>(levels).first(2));
    const CmReport cm = complete_monotonicity_check(dp, grid, 0.25, order, exponents);
    rows.push_back(VerificationReport::exact(fmt::format("monotone order {} ({} checks)", order, cm.checked),
                                             static_cast<double>(cm.violations.size()), 0.0, 0.0));
    return rows;
}

std::vector<VerificationReport> example_chain(const RunConfig& cfg)
{
    return example_suite(cfg.n, cfg.samples, cfg.seed, tolerances(cfg));
}

std::vector<VerificationReport> trace_check(const RunConfig& cfg)
{
    const DualPair dp = build_dual(load_chain_spec(require_input(cfg)));
    if (cfg.subset.empty()) {
        throw InvalidInput("--subset is required for trace-check");
    }
    const Tolerances tol = tolerances(cfg);
    std::vector<VerificationReport> rows;
    rows.push_back(trace_potential_report(dp, cfg.subset, tol));
    rows.push_back(verify_trace(dp, cfg.subset, pair_tuples(cfg.subset), tol));
    return rows;
}

std::vector<VerificationReport> det2_check(const RunConfig& cfg)
{
    const int d = cfg.dim;
    if (d < 1 || d > 64) {
        throw InvalidInput("--dim must be in [1, 64]");
    }
    const double tol = cfg.tol.value_or(1e-10);
    const Mat t = random_matrix(d, splitmix64(cfg.seed ^ 0x10), 0.5);
    const Mat t2 = random_matrix(d, splitmix64(cfg.seed ^ 0x11), 0.5);
    const Mat b = random_skew(d, splitmix64(cfg.seed ^ 0x12), 0.5);
    const Mat c = random_psd(d, splitmix64(cfg.seed ^ 0x13), 0.5);
    const Mat id = Mat::Identity(d, d);
    std::vector<VerificationReport> rows;
    rows.push_back(VerificationReport::exact_relative("det2 vs det exp(-tr)", det2(t),
                                                      (id + t).determinant() * std::exp(-t.trace()), tol));
    rows.push_back(det_multiplicativity(t, t2, tol));
    rows.push_back(VerificationReport::exact_relative("det2 skew", det2(b),
                                                      std::sqrt((id + b * b.transpose()).determinant()), tol));
    rows.push_back(VerificationReport::exact_relative("det2 skew reflection", det2(b), det2(Mat(-b)), tol));
    const auto mc = gaussian_char_identities(TruncatedOperator(c, OperatorKind::symmetric_nonneg),
                                             TruncatedOperator(b, OperatorKind::skew),
                                             random_vector(d, splitmix64(cfg.seed ^ 0x14)),
                                             random_vector(d, splitmix64(cfg.seed ^ 0x15)), cfg.samples,
                                             splitmix64(cfg.seed ^ 0x16), cfg.z);
    rows.insert(rows.end(), mc.begin(), mc.end());
    apply_bonferroni(rows);
    return rows;
}

void hs_rows(std::vector<VerificationReport>& rows, const std::string& name, const HsReport& hs, double tail_tol)
{
    for (std::size_t i = 0; i < hs.cutoffs.size(); ++i) {
        rows.push_back(VerificationReport::info(fmt::format("{} partial sum K={}", name, hs.cutoffs[i]),
                                                hs.partial_sums[i], hs.partial_sums[i]));
    }
    const std::size_t last = hs.partial_sums.size() - 1;
    const double prev = last > 0 ? hs.partial_sums[last - 1] : 0.0;
    rows.push_back(VerificationReport::exact(fmt::format("{} tail increment", name), hs.partial_sums[last], prev,
                                             tail_tol));
    rows.push_back(VerificationReport::exact(fmt::format("{} convergent", name), hs.convergent ? 1.0 : 0.0, 1.0, 0.0));
}

std::vector<VerificationReport> circle_check(const RunConfig& cfg)
{
    const CircleDriftModel model = load_circle_model(require_input(cfg));
    const CircleOperator op = circle_B_matrix(model, cfg.cutoff);
    std::vector<VerificationReport> rows;
    hs_rows(rows, "circle", op.hs, cfg.tail_tol > 0.0 ? cfg.tail_tol : 1e-3);
    rows.push_back(VerificationReport::exact("skew residual", op.skew_residual, 0.0, cfg.tol.value_or(1e-10)));
    rows.push_back(VerificationReport::info("matrix HS norm", op.hs.matrix_hs, op.hs.matrix_hs));
    return rows;
}

std::vector<VerificationReport> levy_check(const RunConfig& cfg)
{
    const LevyModel model = load_levy_model(require_input(cfg));
    std::vector<VerificationReport> rows;
    hs_rows(rows, "levy", levy_hs_check(model), cfg.tail_tol > 0.0 ? cfg.tail_tol : 1e-2);
    return rows;
}

using Command = std::vector<VerificationReport> (*)(const RunConfig&);

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Numerical checks for isomorphism identities of killed Markov chains"};
    app.require_subcommand(1);
    RunConfig cfg;

    const std::vector<std::pair<std::string, std::pair<std::string, Command>>> commands{
        {"verify-iso", {"off-diagonal and diagonal isomorphism identities on a chain spec", verify_iso}},
        {"verify-q", {"positivity and permanental moments of the squared field", verify_q}},
        {"mass-gap", {"print the mass gap of a chain spec", mass_gap}},
        {"mgf-check", {"Laplace transform, trace formula and complete monotonicity", mgf_check}},
        {"example-chain", {"deterministic N-state chain suite", example_chain}},
        {"trace-check", {"trace chain on a subset of states", trace_check}},
        {"det2-check", {"regularised determinants and Gaussian identities on random operators", det2_check}},
        {"circle-check", {"Hilbert-Schmidt series of a circle drift", circle_check}},
        {"levy-check", {"Hilbert-Schmidt series of a Levy symbol", levy_check}},
    };
    Command selected = nullptr;
    for (const auto& [name, entry] : commands) {
        CLI::App* sub = app.add_subcommand(name, entry.first);
        sub->add_option("--input", cfg.input, "chain spec or model file");
        sub->add_option("--seed", cfg.seed, "top-level seed")->check(CLI::PositiveNumber);
        sub->add_option("--samples", cfg.samples, "Monte Carlo sample count")->check(CLI::PositiveNumber);
        sub->add_option("--out", cfg.out, "CSV report path (stdout when omitted)");
        sub->add_option("--tol", cfg.tol, "tolerance for exact rows");
        sub->add_option("--z", cfg.z, "z-score threshold for Monte Carlo rows")->check(CLI::PositiveNumber);
        sub->add_flag("--timing", cfg.timing, "write wall times in the seconds column");
        if (name == "example-chain") {
            sub->add_option("--n", cfg.n, "number of states")->check(CLI::Range(1, 64));
        }
        if (name == "det2-check") {
            sub->add_option("--dim", cfg.dim, "operator dimension");
        }
        if (name == "circle-check") {
            sub->add_option("--cutoff", cfg.cutoff, "largest frequency K")->check(CLI::PositiveNumber);
        }
        if (name == "circle-check" || name == "levy-check") {
            sub->add_option("--tail-tol", cfg.tail_tol, "bound on the last partial-sum increment");
        }
        if (name == "trace-check") {
            sub->add_option("--subset", cfg.subset, "states kept by the trace (0-based)")->delimiter(',');
        }
        sub->callback([&selected, cmd = entry.second] { selected = cmd; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_parse;
    }

    std::vector<VerificationReport> rows;
    try {
        rows = cfg.timing ? timed([&] { return selected(cfg); }) : selected(cfg);
    } catch (const ParseError& e) {
        std::cerr << e.what() << '\n';
        return exit_parse;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return exit_numerical;
    } catch (const InvalidInput& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return exit_parse;
    }

    if (cfg.out.empty()) {
        write_csv(std::cout, rows, cfg.timing);
    } else {
        std::ofstream os(cfg.out, std::ios::binary);
        if (!os) {
            std::cerr << "cannot write " << cfg.out << '\n';
            return exit_parse;
        }
        write_csv(os, rows, cfg.timing);
        std::cout << fmt::format("{} rows, {} failed -> {}\n", rows.size(), failure_count(rows), cfg.out);
    }
    return exit_code(rows);
}
