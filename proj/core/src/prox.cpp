#include "dubline/prox.hpp"

#include <cmath>

#include "dubline/error.hpp"

namespace dubline {

void validate(const ThresholdPolicy& policy) {
    if (const auto* fixed = std::get_if<FixedThreshold>(&policy)) {
        if (!(fixed->lambda >= 0.0) || !std::isfinite(fixed->lambda)) {
            throw InvalidArgument("fixed threshold must be a finite nonnegative value");
        }
    } else {
        const auto& scaled = std::get<RowSumThreshold>(policy);
        if (!(scaled.scale >= 0.0) || !std::isfinite(scaled.scale)) {
            throw InvalidArgument("row-sum threshold scale must be finite and nonnegative");
        }
    }
}

Matrix soft_threshold(const Matrix& a, double lambda) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw InvalidArgument("soft threshold requires a finite lambda >= 0");
    }
    if (!all_finite(a)) throw InvalidArgument("soft threshold operand has non-finite entries");
    Matrix out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = soft_threshold(a[i], lambda);
    return out;
}

ResolvedThreshold resolve_threshold_detail(const ThresholdPolicy& policy, const Matrix& operand) {
    validate(policy);
    if (const auto* fixed = std::get_if<FixedThreshold>(&policy)) return {fixed->lambda, 0};

    const double scale = std::get<RowSumThreshold>(policy).scale;
    if (operand.empty()) return {0.0, 0};
    ResolvedThreshold best{0.0, 0};
    double best_sum = -1.0;
    for (std::size_t r = 0; r < operand.rows(); ++r) {
        double sum = 0.0;
        for (double v : operand.row(r)) sum += std::abs(v);
        if (sum > best_sum) {
            best_sum = sum;
            best.row = r;
        }
    }
    best.lambda = scale * best_sum / static_cast<double>(operand.cols());
    return best;
}

}  // namespace dubline
