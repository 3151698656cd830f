#pragma once

#include <chrono>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "dynlab/estimators.hpp"

namespace dynlab {

enum class Mode {
    exact,     ///< z holds |lhs - rhs| (or its relative version); pass iff <= tolerance
    mc,        ///< two-sided z-score; pass iff |z| <= threshold
    mc_bound,  ///< one-sided: lhs must not fall below rhs by more than threshold SEs
    info,      ///< logged only, always passes
};

const char* mode_name(Mode mode);

struct VerificationReport {
    std::string name;
    Mode mode = Mode::exact;
    double lhs = 0.0;
    double rhs = 0.0;
    double se_lhs = 0.0;
    double se_rhs = 0.0;
    double z = 0.0;
    bool pass = false;
    double seconds = 0.0;
    /// Tolerance (exact) or z threshold (mc) the pass flag was computed with.
    double threshold = 0.0;

    static VerificationReport exact(std::string name, double lhs, double rhs, double tol);
    /// Relative residual |lhs - rhs| / max(|rhs|, 1e-300).
    static VerificationReport exact_relative(std::string name, double lhs, double rhs, double tol);
    static VerificationReport mc(std::string name, const Estimate& lhs, const Estimate& rhs, double threshold = 4.0);
    static VerificationReport mc_against(std::string name, const Estimate& lhs, double exact_rhs, double threshold = 4.0);
    static VerificationReport lower_bound(std::string name, const Estimate& lhs, double bound, double threshold = 4.0);
    static VerificationReport info(std::string name, double lhs, double rhs);

    /// Recompute `pass` for MC rows under a new z threshold.
    void rethreshold(double z_threshold);
};

/// Raise the z threshold of every MC row to the Bonferroni level of the suite.
void apply_bonferroni(std::vector<VerificationReport>& reports);

std::size_t failure_count(std::span<const VerificationReport> reports);

/// Number of failed rows capped at 125.
int exit_code(std::span<const VerificationReport> reports);

inline constexpr const char* csv_header = "name,mode,lhs,rhs,se_lhs,se_rhs,z,pass,seconds";

/// CSV with the fixed column set. With `timing` false the seconds column is
/// written as 0 so identical runs give identical files.
void write_csv(std::ostream& os, std::span<const VerificationReport> reports, bool timing);
std::string to_csv(std::span<const VerificationReport> reports, bool timing);

/// Runs `make()` and stamps the wall time on the report(s) it returns.
template <class F>
auto timed(F&& make)
{
    const auto t0 = std::chrono::steady_clock::now();
    auto result = make();
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if constexpr (std::is_same_v<decltype(result), VerificationReport>) {
        result.seconds = s;
    } else {
        for (auto& r : result) {
            r.seconds = s / static_cast<double>(result.empty() ? 1 : result.size());
        }
    }
    return result;
}

}  // namespace dynlab
