#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "dynlab/chain.hpp"
#include "dynlab/estimators.hpp"
#include "dynlab/rng.hpp"

namespace dynlab {

struct Visit {
    int state;
    double duration;
};

/// One killed trajectory: the successive states with their holding times.
struct PathRecord {
    std::vector<Visit> visits;
    bool killed = true;

    double lifetime() const;
};

/// A function of a nonnegative field (indexed by state). When built by
/// `exponential`, bridge integrals use the closed form instead of quadrature.
struct FieldFunctional {
    std::function<double(std::span<const double>)> eval;
    /// F(l) = exp(-<rate, l>) with rate_u = chi_u m_u.
    std::optional<Vec> exp_rate;
    std::optional<double> constant_value;

    double operator()(std::span<const double> field) const { return eval(field); }

    static FieldFunctional constant(double c);
    /// exp(-<chi, l>_m).
    static FieldFunctional exponential(const Vec& chi, const Vec& m);
    static FieldFunctional general(std::function<double(std::span<const double>)> f);
};

PathRecord sample_path(const DualPair& dp, int start, Rng& rng);
PathRecord sample_path(const DualPair& dp, int start, std::uint64_t seed);

/// l^x = (time spent at x) / m_x.
Vec occupation(const DualPair& dp, const PathRecord& path);

/// Contribution of one path to mu_{x,y}(F(shift + l)):
/// integral over the path of F(shift + l_t) dl_t^y.
double bridge_contribution(const DualPair& dp, const PathRecord& path, int y, const FieldFunctional& f,
                           std::span<const double> shift);

/// Unbiased estimate of mu_{x,y}(F(l)) = E_x(int_0^zeta F(l_t) dl_t^y).
Estimate bridge_estimate(const DualPair& dp, int x, int y, const FieldFunctional& f, std::size_t count,
                         std::uint64_t seed, Exec exec = Exec::parallel);

/// Sample mean of the lifetime started from x (E_x zeta = sum_y V_xy).
Estimate lifetime_estimate(const DualPair& dp, int x, std::size_t count, std::uint64_t seed,
                           Exec exec = Exec::parallel);

/// Sample mean of the total occupation field from x (E_x l^y = G_0(x,y)).
std::vector<Estimate> occupation_estimate(const DualPair& dp, int x, std::size_t count, std::uint64_t seed,
                                          Exec exec = Exec::parallel);

}  // namespace dynlab
