#ifndef POLYDYN_SUMMATION_HPP
#define POLYDYN_SUMMATION_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace polydyn {

/// Kahan-Babuska (Neumaier) compensated accumulator.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) comp_ += (sum_ - t) + x;
        else comp_ += (x - t) + sum_;
        sum_ = t;
    }

    CompensatedSum& operator+=(double x) {
        add(x);
        return *this;
    }

    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// log(sum_i weight_i * exp(exponent_i)), summed in ascending order of the
/// terms with compensated accumulation, so the result depends only on the
/// multiset of terms and not on how they were produced.
inline double log_sum_exp(std::span<const double> exponents, std::span<const double> weights) {
    double top = -std::numeric_limits<double>::infinity();
    for (double e : exponents) top = std::max(top, e);
    if (!std::isfinite(top)) return top;
    std::vector<double> terms(exponents.size());
    for (std::size_t i = 0; i < exponents.size(); ++i)
        terms[i] = weights[i] * std::exp(exponents[i] - top);
    std::sort(terms.begin(), terms.end());
    CompensatedSum acc;
    for (double t : terms) acc.add(t);
    return top + std::log(acc.value());
}

/// Deterministic compensated sum of an arbitrary sequence (ascending order).
inline double ordered_sum(std::vector<double> terms) {
    std::sort(terms.begin(), terms.end());
    CompensatedSum acc;
    for (double t : terms) acc.add(t);
    return acc.value();
}

} // namespace polydyn

#endif // POLYDYN_SUMMATION_HPP
