#pragma once

#include <cmath>

namespace dcorr {

// Neumaier's variant of Kahan summation. Error stays O(eps) in the sum
// magnitude instead of growing with the term count.
class CompensatedSum {
public:
    void add(double v) noexcept
    {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }

    void add(const CompensatedSum& other) noexcept
    {
        add(other.sum_);
        add(other.comp_);
    }

    CompensatedSum& operator+=(double v) noexcept
    {
        add(v);
        return *this;
    }

    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

} // namespace dcorr
