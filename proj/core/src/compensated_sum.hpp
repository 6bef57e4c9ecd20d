#pragma once

#include <cmath>

#include "chronoscale/types.hpp"

namespace chronoscale::detail {

/// Componentwise Neumaier summation.
class CompensatedSum {
public:
    explicit CompensatedSum(Eigen::Index dimension)
        : sum_(Vector::Zero(dimension)), carry_(Vector::Zero(dimension)) {}

    void add(const Vector& term) {
        for (Eigen::Index i = 0; i < sum_.size(); ++i) {
            const double t = sum_[i] + term[i];
            if (std::abs(sum_[i]) >= std::abs(term[i])) {
                carry_[i] += (sum_[i] - t) + term[i];
            } else {
                carry_[i] += (term[i] - t) + sum_[i];
            }
            sum_[i] = t;
        }
    }

    [[nodiscard]] Vector value() const { return sum_ + carry_; }

private:
    Vector sum_;
    Vector carry_;
};

}  // namespace chronoscale::detail
