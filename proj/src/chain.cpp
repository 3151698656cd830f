#include "dynlab/chain.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include <fmt/core.h>

namespace dynlab {

namespace {

constexpr double row_tol = 1e-12;

// States from which some state in `targets` is reachable along the support of
// `pi` (reverse breadth-first search).
std::vector<bool> can_reach(const Mat& pi, const std::vector<bool>& targets)
{
    const auto n = pi.rows();
    std::vector<bool> seen(targets);
    std::deque<Eigen::Index> queue;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (seen[i]) {
            queue.push_back(i);
        }
    }
    while (!queue.empty()) {
        const auto y = queue.front();
        queue.pop_front();
        for (Eigen::Index x = 0; x < n; ++x) {
            if (!seen[x] && pi(x, y) > 0.0) {
                seen[x] = true;
                queue.push_back(x);
            }
        }
    }
    return seen;
}

std::vector<bool> reachable_from(const Mat& pi, const std::vector<bool>& sources)
{
    const auto n = pi.rows();
    std::vector<bool> seen(sources);
    std::deque<Eigen::Index> queue;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (seen[i]) {
            queue.push_back(i);
        }
    }
    while (!queue.empty()) {
        const auto x = queue.front();
        queue.pop_front();
        for (Eigen::Index y = 0; y < n; ++y) {
            if (!seen[y] && pi(x, y) > 0.0) {
                seen[y] = true;
                queue.push_back(y);
            }
        }
    }
    return seen;
}

DualPair assemble(const ChainSpec& spec)
{
    const int n = spec.size();
    DualPair dp;
    dp.spec = spec;
    dp.L = spec.q.asDiagonal() * (spec.pi - Mat::Identity(n, n));

    const Eigen::FullPivLU<Mat> lu(-dp.L);
    if (!lu.isInvertible()) {
        throw InvalidInput("I - Pi is singular: the chain is not transient");
    }
    dp.V = lu.inverse();
    dp.m = dp.V.transpose() * spec.mu;
    const double m_scale = dp.m.cwiseAbs().maxCoeff();
    for (int x = 0; x < n; ++x) {
        if (!(dp.m(x) > 1e-14 * m_scale)) {
            throw InvalidInput(fmt::format("reference measure vanishes at state {}", x));
        }
    }

    const Vec m_inv = dp.m.cwiseInverse();
    dp.L_hat = m_inv.asDiagonal() * dp.L.transpose() * dp.m.asDiagonal();
    const Vec qm = spec.q.cwiseProduct(dp.m);
    dp.pi_hat = qm.cwiseInverse().asDiagonal() * spec.pi.transpose() * qm.asDiagonal();
    dp.A = 0.5 * (dp.L + dp.L_hat);
    dp.skew = 0.5 * (dp.L - dp.L_hat);
    dp.exit_rate = spec.q.cwiseProduct((Vec::Ones(n) - spec.pi.rowwise().sum()).cwiseMax(0.0));
    dp.mu_hat = dp.m.cwiseProduct(dp.exit_rate);
    return dp;
}

}  // namespace

double spectral_radius(const Mat& a)
{
    if (a.size() == 0) {
        return 0.0;
    }
    const Eigen::EigenSolver<Mat> es(a, false);
    if (es.info() != Eigen::Success) {
        throw NumericalError("eigensolver failed in spectral_radius");
    }
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

double power_iteration_radius(const Mat& a, int iterations)
{
    // Shifted to (I + a)/2 so a periodic support cannot make the iteration
    // oscillate; the dominant eigenvalue of a nonnegative matrix is real.
    const auto n = a.rows();
    const Mat shifted = 0.5 * (Mat::Identity(n, n) + a);
    Vec x = Vec::Ones(n) / static_cast<double>(n);
    double ratio = 0.0;
    for (int k = 0; k < iterations; ++k) {
        const Vec y = shifted * x;
        const double norm = y.lpNorm<1>();
        if (norm == 0.0) {
            return 0.0;
        }
        ratio = norm / x.lpNorm<1>();
        x = y / norm;
    }
    return 2.0 * ratio - 1.0;
}

void validate(const ChainSpec& spec, bool require_probability)
{
    const auto n = spec.q.size();
    if (n < 1) {
        throw InvalidInput("chain needs at least one state");
    }
    if (spec.pi.rows() != n || spec.pi.cols() != n) {
        throw InvalidInput(fmt::format("pi is {}x{}, expected {}x{}", spec.pi.rows(), spec.pi.cols(), n, n));
    }
    if (spec.mu.size() != n) {
        throw InvalidInput(fmt::format("mu has {} entries, expected {}", spec.mu.size(), n));
    }
    for (Eigen::Index x = 0; x < n; ++x) {
        if (!(spec.q(x) > 0.0) || !std::isfinite(spec.q(x))) {
            throw InvalidInput(fmt::format("q[{}] = {} is not a positive rate", x, spec.q(x)));
        }
        if (!(spec.mu(x) >= 0.0)) {
            throw InvalidInput(fmt::format("mu[{}] = {} is negative", x, spec.mu(x)));
        }
        double row = 0.0;
        for (Eigen::Index y = 0; y < n; ++y) {
            const double p = spec.pi(x, y);
            if (!(p >= 0.0 && p <= 1.0)) {
                throw InvalidInput(fmt::format("pi[{}][{}] = {} is outside [0,1]", x, y, p));
            }
            row += p;
        }
        if (row > 1.0 + row_tol) {
            throw InvalidInput(fmt::format("row {} of pi sums to {} > 1", x, row));
        }
    }
    const double mass = spec.mu.sum();
    if (require_probability ? std::abs(mass - 1.0) > 1e-9 : (mass <= 0.0 || mass > 1.0 + 1e-9)) {
        throw InvalidInput(fmt::format("mu has total mass {}", mass));
    }

    std::vector<bool> killing(n), support(n);
    for (Eigen::Index x = 0; x < n; ++x) {
        killing[x] = spec.pi.row(x).sum() < 1.0 - row_tol;
        support[x] = spec.mu(x) > 0.0;
    }
    const auto transient = can_reach(spec.pi, killing);
    const auto reached = reachable_from(spec.pi, support);
    for (Eigen::Index x = 0; x < n; ++x) {
        if (!transient[x]) {
            throw InvalidInput(fmt::format("no killing is reachable from state {}", x));
        }
        if (!reached[x]) {
            throw InvalidInput(fmt::format("state {} is not reachable from the initial law", x));
        }
    }

    const double radius = spectral_radius(spec.pi);
    if (!(radius < 1.0)) {
        throw InvalidInput(fmt::format("spectral radius of pi is {} >= 1", radius));
    }
    if (std::abs(power_iteration_radius(spec.pi) - radius) > 0.05) {
        throw NumericalError("power iteration and eigensolver disagree on the spectral radius of pi");
    }
}

DualPair build_dual(const ChainSpec& spec)
{
    validate(spec);
    return assemble(spec);
}

DualPair dual_of(const DualPair& dp)
{
    ChainSpec dual{dp.q(), dp.pi_hat, dp.mu_hat};
    validate(dual);
    return assemble(dual);
}

EnergyReport energy_report(const DualPair& dp)
{
    const int n = dp.size();
    const Vec sq = dp.m.cwiseSqrt();
    Mat sym = sq.asDiagonal() * (-dp.A) * sq.cwiseInverse().asDiagonal();
    sym = 0.5 * (sym + sym.transpose()).eval();
    const Eigen::SelfAdjointEigenSolver<Mat> es(sym, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
        throw NumericalError("symmetric eigensolver failed in energy_report");
    }

    EnergyReport r;
    r.mass_gap = es.eigenvalues().minCoeff();
    if (!(r.mass_gap > 0.0)) {
        throw NumericalError(fmt::format("mass gap {} is not positive", r.mass_gap));
    }
    const Vec mq = dp.m.cwiseProduct(dp.q());
    const Mat flux = mq.asDiagonal() * dp.pi();
    r.conductances = 0.5 * (flux + flux.transpose());
    r.killing = 0.5 * dp.q().cwiseProduct(2.0 * Vec::Ones(n) - dp.pi().rowwise().sum() - dp.pi_hat.rowwise().sum());
    return r;
}

double energy(const DualPair& dp, const CVec& z)
{
    const CVec lz = -(dp.L.cast<Complex>() * z);
    Complex e{};
    for (int x = 0; x < dp.size(); ++x) {
        e += lz(x) * std::conj(z(x)) * dp.m(x);
    }
    return e.real();
}

double energy_from_report(const EnergyReport& report, const DualPair& dp, const CVec& z)
{
    const int n = dp.size();
    double e = 0.0;
    for (int x = 0; x < n; ++x) {
        for (int y = 0; y < n; ++y) {
            e += 0.5 * report.conductances(x, y) * std::norm(z(x) - z(y));
        }
        e += report.killing(x) * dp.m(x) * std::norm(z(x));
    }
    return e;
}

DualPair trace_chain(const DualPair& dp, std::span<const int> subset)
{
    const int n = dp.size();
    if (subset.empty()) {
        throw InvalidInput("trace_chain needs a nonempty subset");
    }
    std::vector<int> keep(subset.begin(), subset.end());
    std::sort(keep.begin(), keep.end());
    if (std::adjacent_find(keep.begin(), keep.end()) != keep.end() || keep.front() < 0 || keep.back() >= n) {
        throw InvalidInput("trace_chain subset must hold distinct valid states");
    }
    if (static_cast<int>(keep.size()) == n) {
        return dp;
    }
    std::vector<int> drop;
    for (int x = 0, k = 0; x < n; ++x) {
        if (k < static_cast<int>(keep.size()) && keep[k] == x) {
            ++k;
        } else {
            drop.push_back(x);
        }
    }

    const auto ny = static_cast<Eigen::Index>(keep.size());
    const Mat l_yy = dp.L(keep, keep), l_yc = dp.L(keep, drop), l_cy = dp.L(drop, keep), l_cc = dp.L(drop, drop);
    const Eigen::FullPivLU<Mat> lu(l_cc);
    if (!lu.isInvertible()) {
        throw NumericalError("generator block on the complement is singular");
    }
    const Mat l_trace = l_yy - l_yc * lu.solve(l_cy);

    ChainSpec spec;
    spec.q = -l_trace.diagonal();
    spec.pi = Mat::Zero(ny, ny);
    const double scale = spec.q.maxCoeff();
    for (Eigen::Index x = 0; x < ny; ++x) {
        for (Eigen::Index y = 0; y < ny; ++y) {
            if (x != y) {
                const double rate = l_trace(x, y);
                spec.pi(x, y) = rate > 1e-14 * scale ? std::min(1.0, rate / spec.q(x)) : 0.0;
            }
        }
    }
    const Vec m_keep = dp.m(keep);
    spec.mu = ((-l_trace).transpose() * m_keep).cwiseMax(0.0);
    validate(spec, false);
    return assemble(spec);
}

ChainSpec n_chain(int n)
{
    if (n < 1) {
        throw InvalidInput("n_chain needs n >= 1");
    }
    ChainSpec spec;
    spec.q = Vec::Ones(n);
    spec.pi = Mat::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i) {
        spec.pi(i, i + 1) = 1.0;
    }
    spec.mu = Vec::Zero(n);
    spec.mu(0) = 1.0;
    return spec;
}

}  // namespace dynlab
