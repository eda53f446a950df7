#pragma once

#include <cstddef>
#include <variant>

#include "dubline/matrix.hpp"

namespace dubline {

struct FixedThreshold {
    double lambda = 0.0;
    bool operator==(const FixedThreshold&) const = default;
};

/// lambda = scale * max over rows of (sum_j |a_ij|) / cols.
/// Rows are radius bins and columns are angles when applied to a sinogram.
struct RowSumThreshold {
    double scale = 0.1;
    bool operator==(const RowSumThreshold&) const = default;
};

using ThresholdPolicy = std::variant<FixedThreshold, RowSumThreshold>;

void validate(const ThresholdPolicy& policy);

/// sign(a) * max(|a| - lambda, 0)
inline double soft_threshold(double a, double lambda) noexcept {
    if (a > lambda) return a - lambda;
    if (a < -lambda) return a + lambda;
    return 0.0;
}

/// Elementwise shrinkage. Throws on negative lambda or non-finite input.
Matrix soft_threshold(const Matrix& a, double lambda);

struct ResolvedThreshold {
    double lambda = 0.0;
    /// Row that attains the maximum normalized row sum (RowSumThreshold only).
    std::size_t row = 0;
};

ResolvedThreshold resolve_threshold_detail(const ThresholdPolicy& policy, const Matrix& operand);

inline double resolve_threshold(const ThresholdPolicy& policy, const Matrix& operand) {
    return resolve_threshold_detail(policy, operand).lambda;
}

}  // namespace dubline
