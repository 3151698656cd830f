#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "dynlab/types.hpp"

namespace dynlab {

struct Estimate {
    double value = 0.0;
    double se = 0.0;
    std::size_t count = 0;
};

struct ComplexEstimate {
    Complex value{};
    double se_re = 0.0;
    double se_im = 0.0;
    std::size_t count = 0;

    Estimate real() const { return {value.real(), se_re, count}; }
    Estimate imag() const { return {value.imag(), se_im, count}; }
};

/// Streaming mean/covariance of a fixed-size real vector (Welford updates,
/// Chan et al. merge so block partials combine associatively).
template <int D>
class MomentAccumulator {
public:
    using Point = Eigen::Matrix<double, D, 1>;
    using Cov = Eigen::Matrix<double, D, D>;

    void add(const Point& x)
    {
        ++n_;
        const Point delta = x - mean_;
        mean_ += delta / static_cast<double>(n_);
        m2_.noalias() += delta * (x - mean_).transpose();
    }

    void merge(const MomentAccumulator& o)
    {
        if (o.n_ == 0) {
            return;
        }
        if (n_ == 0) {
            *this = o;
            return;
        }
        const double na = static_cast<double>(n_), nb = static_cast<double>(o.n_);
        const double n = na + nb;
        const Point delta = o.mean_ - mean_;
        mean_ += delta * (nb / n);
        m2_ += o.m2_ + delta * delta.transpose() * (na * nb / n);
        n_ += o.n_;
    }

    std::size_t count() const { return n_; }
    const Point& mean() const { return mean_; }
    Cov covariance() const
    {
        return n_ > 1 ? Cov(m2_ / static_cast<double>(n_ - 1)) : Cov(Cov::Zero());
    }

private:
    std::size_t n_ = 0;
    Point mean_ = Point::Zero();
    Cov m2_ = Cov::Zero();
};

/// Plain sample means of several real outputs.
class MeanAccumulator {
public:
    MeanAccumulator() = default;
    explicit MeanAccumulator(std::size_t outputs) : acc_(outputs) {}

    void add(std::span<const double> values);
    void merge(const MeanAccumulator& o);

    std::size_t outputs() const { return acc_.size(); }
    Estimate result(std::size_t j) const;

private:
    std::vector<MomentAccumulator<1>> acc_;
};

/// Self-normalised importance-sampling estimator for several complex outputs
/// sharing one complex weight: E[w f_j] / E[w], with delta-method standard
/// errors for the real and imaginary parts.
class RatioAccumulator {
public:
    RatioAccumulator() = default;
    explicit RatioAccumulator(std::size_t outputs) : acc_(outputs) {}

    void add(Complex weight, std::span<const Complex> values);
    void merge(const RatioAccumulator& o);

    std::size_t outputs() const { return acc_.size(); }
    ComplexEstimate ratio(std::size_t j) const;
    /// Mean weight E[w] with its standard error.
    ComplexEstimate weight_mean() const;

private:
    std::vector<MomentAccumulator<4>> acc_;
};

/// Two-sided z threshold for a family of `tests` comparisons:
/// max(4, Bonferroni quantile at family level 0.05).
double bonferroni_threshold(std::size_t tests);

}  // namespace dynlab
