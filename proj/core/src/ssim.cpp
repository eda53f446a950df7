#include "dubline/ssim.hpp"

#include <cmath>
#include <vector>

#include "dubline/error.hpp"

namespace dubline {

SsimConfig SsimConfig::for_range(double dynamic_range) {
    SsimConfig cfg;
    cfg.dynamic_range = dynamic_range;
    cfg.c1 = (0.01 * dynamic_range) * (0.01 * dynamic_range);
    cfg.c2 = (0.03 * dynamic_range) * (0.03 * dynamic_range);
    return cfg;
}

void SsimConfig::validate() const {
    if (window < 3 || window % 2 == 0) throw InvalidArgument("SSIM window must be odd and >= 3");
    if (!(c1 > 0.0) || !(c2 > 0.0)) throw InvalidArgument("SSIM constants must be > 0");
    if (kind == SsimWindow::gaussian && !(sigma > 0.0)) {
        throw InvalidArgument("SSIM Gaussian sigma must be > 0");
    }
    if (!(dynamic_range > 0.0)) throw InvalidArgument("SSIM dynamic range must be > 0");
}

namespace {

std::vector<double> window_1d(const SsimConfig& cfg) {
    std::vector<double> w(cfg.window);
    const double centre = 0.5 * static_cast<double>(cfg.window - 1);
    double sum = 0.0;
    for (std::size_t i = 0; i < cfg.window; ++i) {
        const double d = static_cast<double>(i) - centre;
        w[i] = cfg.kind == SsimWindow::gaussian ? std::exp(-d * d / (2.0 * cfg.sigma * cfg.sigma))
                                                : 1.0;
        sum += w[i];
    }
    for (double& v : w) v /= sum;
    return w;
}

// Separable 'valid' correlation of an h x w plane; output (h-n+1) x (w-n+1).
std::vector<double> filter_valid(const std::vector<double>& in, std::size_t h, std::size_t w,
                                 const std::vector<double>& g) {
    const std::size_t n = g.size();
    const std::size_t oh = h - n + 1;
    const std::size_t ow = w - n + 1;
    std::vector<double> tmp(h * ow, 0.0);
    for (std::size_t r = 0; r < h; ++r) {
        for (std::size_t c = 0; c < ow; ++c) {
            double acc = 0.0;
            for (std::size_t k = 0; k < n; ++k) acc += g[k] * in[r * w + c + k];
            tmp[r * ow + c] = acc;
        }
    }
    std::vector<double> out(oh * ow, 0.0);
    for (std::size_t r = 0; r < oh; ++r) {
        for (std::size_t k = 0; k < n; ++k) {
            const double gk = g[k];
            const double* src = &tmp[(r + k) * ow];
            double* dst = &out[r * ow];
            for (std::size_t c = 0; c < ow; ++c) dst[c] += gk * src[c];
        }
    }
    return out;
}

// Transpose of filter_valid: scatters an (h-n+1) x (w-n+1) plane back to h x w.
std::vector<double> filter_valid_transpose(const std::vector<double>& in, std::size_t h,
                                           std::size_t w, const std::vector<double>& g) {
    const std::size_t n = g.size();
    const std::size_t oh = h - n + 1;
    const std::size_t ow = w - n + 1;
    std::vector<double> tmp(h * ow, 0.0);
    for (std::size_t r = 0; r < oh; ++r) {
        for (std::size_t k = 0; k < n; ++k) {
            const double gk = g[k];
            const double* src = &in[r * ow];
            double* dst = &tmp[(r + k) * ow];
            for (std::size_t c = 0; c < ow; ++c) dst[c] += gk * src[c];
        }
    }
    std::vector<double> out(h * w, 0.0);
    for (std::size_t r = 0; r < h; ++r) {
        for (std::size_t c = 0; c < ow; ++c) {
            const double v = tmp[r * ow + c];
            for (std::size_t k = 0; k < n; ++k) out[r * w + c + k] += g[k] * v;
        }
    }
    return out;
}

double ssim_impl(const Image& a, const Image& b, const SsimConfig& cfg, Image* grad_a) {
    cfg.validate();
    if (!a.same_dims(b)) throw ShapeMismatch("SSIM inputs differ in size");
    if (a.width() < cfg.window || a.height() < cfg.window) {
        throw InvalidArgument("image is smaller than the SSIM window");
    }
    const std::size_t h = a.height();
    const std::size_t w = a.width();
    const auto g = window_1d(cfg);

    const std::vector<double> av(a.values().begin(), a.values().end());
    const std::vector<double> bv(b.values().begin(), b.values().end());
    std::vector<double> aa(av.size()), bb(av.size()), ab(av.size());
    for (std::size_t i = 0; i < av.size(); ++i) {
        aa[i] = av[i] * av[i];
        bb[i] = bv[i] * bv[i];
        ab[i] = av[i] * bv[i];
    }
    const auto mu_a = filter_valid(av, h, w, g);
    const auto mu_b = filter_valid(bv, h, w, g);
    const auto e_aa = filter_valid(aa, h, w, g);
    const auto e_bb = filter_valid(bb, h, w, g);
    const auto e_ab = filter_valid(ab, h, w, g);

    const std::size_t count = mu_a.size();
    std::vector<double> coef_const, coef_b, coef_a;
    if (grad_a) {
        coef_const.resize(count);
        coef_b.resize(count);
        coef_a.resize(count);
    }
    double total = 0.0;
    for (std::size_t p = 0; p < count; ++p) {
        const double ma = mu_a[p];
        const double mb = mu_b[p];
        const double va = e_aa[p] - ma * ma;
        const double vb = e_bb[p] - mb * mb;
        const double cov = e_ab[p] - ma * mb;
        const double a1 = 2.0 * ma * mb + cfg.c1;
        const double a2 = 2.0 * cov + cfg.c2;
        const double b1 = ma * ma + mb * mb + cfg.c1;
        const double b2 = va + vb + cfg.c2;
        const double s = (a1 * a2) / (b1 * b2);
        total += s;
        if (grad_a) {
            // dS/da_i = 2 w_i (const + b_i * coef_b + a_i * coef_a)
            coef_const[p] = s * (mb / a1 - ma / b1 - mb / a2 + ma / b2);
            coef_b[p] = s / a2;
            coef_a[p] = -s / b2;
        }
    }
    const double mean = total / static_cast<double>(count);

    if (grad_a) {
        const auto g_const = filter_valid_transpose(coef_const, h, w, g);
        const auto g_b = filter_valid_transpose(coef_b, h, w, g);
        const auto g_a = filter_valid_transpose(coef_a, h, w, g);
        *grad_a = Image(w, h);
        const double scale = 2.0 / static_cast<double>(count);
        auto out = grad_a->values();
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] = scale * (g_const[i] + bv[i] * g_b[i] + av[i] * g_a[i]);
        }
    }
    return mean;
}

}  // namespace

double ssim(const Image& a, const Image& b, const SsimConfig& cfg) {
    return ssim_impl(a, b, cfg, nullptr);
}

double ssim_with_gradient(const Image& a, const Image& b, const SsimConfig& cfg, Image& grad_a) {
    return ssim_impl(a, b, cfg, &grad_a);
}

}  // namespace dubline
