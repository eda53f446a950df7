#pragma once

#include <cstddef>

#include "dubline/image.hpp"

namespace dubline {

enum class SsimWindow { uniform, gaussian };

struct SsimConfig {
    std::size_t window = 11;
    SsimWindow kind = SsimWindow::gaussian;
    double sigma = 1.5;
    double c1 = 0.01 * 0.01;
    double c2 = 0.03 * 0.03;
    double dynamic_range = 1.0;

    /// Canonical constants c1 = (0.01 L)^2, c2 = (0.03 L)^2.
    static SsimConfig for_range(double dynamic_range);
    void validate() const;
};

/// Mean SSIM over all fully contained windows. Images must be at least
/// window x window.
double ssim(const Image& a, const Image& b, const SsimConfig& cfg = {});

/// SSIM and its gradient with respect to `a`.
double ssim_with_gradient(const Image& a, const Image& b, const SsimConfig& cfg, Image& grad_a);

}  // namespace dubline
