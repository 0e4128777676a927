#pragma once

#include <cmath>
#include <span>

namespace fracsum {

/// Neumaier's variant of Kahan summation.
class CompensatedSum
{
public:
    void add(double x) noexcept
    {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }

    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double compensated_sum(std::span<const double> xs) noexcept
{
    CompensatedSum acc;
    for (double x : xs)
        acc.add(x);
    return acc.value();
}

/// (e^x - 1) / x, continuous at x = 0.
inline double expm1_ratio(double x) noexcept
{
    if (x == 0.0)
        return 1.0;
    return std::expm1(x) / x;
}

} // namespace fracsum
