#include "dynlab/estimators.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/normal.hpp>

namespace dynlab {

void MeanAccumulator::add(std::span<const double> values)
{
    for (std::size_t j = 0; j < acc_.size(); ++j) {
        acc_[j].add(Eigen::Matrix<double, 1, 1>(values[j]));
    }
}

void MeanAccumulator::merge(const MeanAccumulator& o)
{
    if (acc_.empty()) {
        *this = o;
        return;
    }
    for (std::size_t j = 0; j < acc_.size(); ++j) {
        acc_[j].merge(o.acc_[j]);
    }
}

Estimate MeanAccumulator::result(std::size_t j) const
{
    const auto& a = acc_.at(j);
    const double n = static_cast<double>(a.count());
    return {a.mean()(0), n > 0 ? std::sqrt(a.covariance()(0, 0) / n) : 0.0, a.count()};
}

void RatioAccumulator::add(Complex weight, std::span<const Complex> values)
{
    for (std::size_t j = 0; j < acc_.size(); ++j) {
        const Complex num = weight * values[j];
        acc_[j].add(Eigen::Vector4d(num.real(), num.imag(), weight.real(), weight.imag()));
    }
}

void RatioAccumulator::merge(const RatioAccumulator& o)
{
    if (acc_.empty()) {
        *this = o;
        return;
    }
    for (std::size_t j = 0; j < acc_.size(); ++j) {
        acc_[j].merge(o.acc_[j]);
    }
}

ComplexEstimate RatioAccumulator::ratio(std::size_t j) const
{
    const auto& a = acc_.at(j);
    const Eigen::Vector4d& mu = a.mean();
    const Complex num(mu(0), mu(1)), den(mu(2), mu(3));
    const Complex r = num / den;
    // dR = (dnum - R dden) / den
    const Complex c = 1.0 / den, cr = c * r;
    const Eigen::Vector4d g_re(c.real(), -c.imag(), -cr.real(), cr.imag());
    const Eigen::Vector4d g_im(c.imag(), c.real(), -cr.imag(), -cr.real());
    const Eigen::Matrix4d cov = a.covariance();
    const double n = static_cast<double>(a.count());
    const double v_re = std::max(0.0, g_re.dot(cov * g_re)) / n;
    const double v_im = std::max(0.0, g_im.dot(cov * g_im)) / n;
    return {r, std::sqrt(v_re), std::sqrt(v_im), a.count()};
}

ComplexEstimate RatioAccumulator::weight_mean() const
{
    const auto& a = acc_.at(0);
    const Eigen::Matrix4d cov = a.covariance();
    const double n = static_cast<double>(a.count());
    return {Complex(a.mean()(2), a.mean()(3)), std::sqrt(cov(2, 2) / n), std::sqrt(cov(3, 3) / n),
            a.count()};
}

double bonferroni_threshold(std::size_t tests)
{
    if (tests <= 1) {
        return 4.0;
    }
    const boost::math::normal standard;
    const double q = boost::math::quantile(boost::math::complement(standard, 0.05 / (2.0 * static_cast<double>(tests))));
    return std::max(4.0, q);
}

}  // namespace dynlab
