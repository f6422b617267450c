#pragma once

#include <cmath>

namespace wl1 {

/// Neumaier (improved Kahan-Babuska) summation.
template <typename Scalar>
class CompensatedSum {
  public:
    constexpr CompensatedSum() = default;
    constexpr explicit CompensatedSum(Scalar init) : sum_(init) {}

    constexpr void add(Scalar v) {
        const Scalar t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }

    constexpr void add(const CompensatedSum &other) {
        add(other.sum_);
        add(other.comp_);
    }

    constexpr CompensatedSum &operator+=(Scalar v) {
        add(v);
        return *this;
    }
    constexpr CompensatedSum &operator-=(Scalar v) {
        add(-v);
        return *this;
    }
    constexpr CompensatedSum &operator+=(const CompensatedSum &other) {
        add(other);
        return *this;
    }

    constexpr Scalar value() const { return sum_ + comp_; }

  private:
    Scalar sum_{0};
    Scalar comp_{0};
};

} // namespace wl1
