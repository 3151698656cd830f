#include "dynlab/report.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include <fmt/core.h>

namespace dynlab {

const char* mode_name(Mode mode)
{
    switch (mode) {
    case Mode::exact:
        return "exact";
    case Mode::mc:
        return "mc";
    case Mode::mc_bound:
        return "mc-bound";
    case Mode::info:
        return "info";
    }
    return "?";
}

VerificationReport VerificationReport::exact(std::string name, double lhs, double rhs, double tol)
{
    VerificationReport r;
    r.name = std::move(name);
    r.mode = Mode::exact;
    r.lhs = lhs;
    r.rhs = rhs;
    r.z = std::abs(lhs - rhs);
    r.threshold = tol;
    r.pass = r.z <= tol;
    return r;
}

VerificationReport VerificationReport::exact_relative(std::string name, double lhs, double rhs, double tol)
{
    auto r = exact(std::move(name), lhs, rhs, tol);
    r.z = std::abs(lhs - rhs) / std::max(std::abs(rhs), 1e-300);
    r.pass = r.z <= tol;
    return r;
}

VerificationReport VerificationReport::mc(std::string name, const Estimate& lhs, const Estimate& rhs, double threshold)
{
    VerificationReport r;
    r.name = std::move(name);
    r.mode = Mode::mc;
    r.lhs = lhs.value;
    r.rhs = rhs.value;
    r.se_lhs = lhs.se;
    r.se_rhs = rhs.se;
    const double se = std::hypot(lhs.se, rhs.se);
    const double diff = lhs.value - rhs.value;
    r.z = se > 0.0 ? diff / se : (diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff));
    r.rethreshold(threshold);
    return r;
}

VerificationReport VerificationReport::mc_against(std::string name, const Estimate& lhs, double exact_rhs, double threshold)
{
    return mc(std::move(name), lhs, Estimate{exact_rhs, 0.0, 0}, threshold);
}

VerificationReport VerificationReport::lower_bound(std::string name, const Estimate& lhs, double bound, double threshold)
{
    auto r = mc(std::move(name), lhs, Estimate{bound, 0.0, 0}, threshold);
    r.mode = Mode::mc_bound;
    r.rethreshold(threshold);
    return r;
}

VerificationReport VerificationReport::info(std::string name, double lhs, double rhs)
{
    VerificationReport r;
    r.name = std::move(name);
    r.mode = Mode::info;
    r.lhs = lhs;
    r.rhs = rhs;
    r.z = lhs - rhs;
    r.pass = true;
    return r;
}

void VerificationReport::rethreshold(double z_threshold)
{
    if (mode == Mode::mc) {
        threshold = z_threshold;
        pass = std::abs(z) <= z_threshold;
    } else if (mode == Mode::mc_bound) {
        threshold = z_threshold;
        pass = z >= -z_threshold;
    }
}

void apply_bonferroni(std::vector<VerificationReport>& reports)
{
    const auto tests = static_cast<std::size_t>(std::count_if(reports.begin(), reports.end(), [](const auto& r) {
        return r.mode == Mode::mc || r.mode == Mode::mc_bound;
    }));
    const double t = bonferroni_threshold(tests);
    for (auto& r : reports) {
        if ((r.mode == Mode::mc || r.mode == Mode::mc_bound) && r.threshold < t) {
            r.rethreshold(t);
        }
    }
}

std::size_t failure_count(std::span<const VerificationReport> reports)
{
    return static_cast<std::size_t>(std::count_if(reports.begin(), reports.end(), [](const auto& r) { return !r.pass; }));
}

int exit_code(std::span<const VerificationReport> reports)
{
    return static_cast<int>(std::min<std::size_t>(failure_count(reports), 125));
}

void write_csv(std::ostream& os, std::span<const VerificationReport> reports, bool timing)
{
    os << csv_header << '\n';
    for (const auto& r : reports) {
        os << fmt::format("{},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{},{:.6f}\n", r.name, mode_name(r.mode), r.lhs,
                          r.rhs, r.se_lhs, r.se_rhs, r.z, r.pass ? "PASS" : "FAIL", timing ? r.seconds : 0.0);
    }
}

std::string to_csv(std::span<const VerificationReport> reports, bool timing)
{
    std::ostringstream os;
    write_csv(os, reports, timing);
    return os.str();
}

}  // namespace dynlab
