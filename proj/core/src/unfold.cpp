#include "dubline/unfold.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "dubline/error.hpp"

namespace dubline {

namespace {

struct Range {
    long begin;
    long end;
};

// Output indices whose shifted source index stays inside [0, n).
Range valid_range(long n, long shift) { return {std::max(0L, -shift), std::min(n, n - shift)}; }

FeatureMap leaky(const FeatureMap& pre, double slope) {
    FeatureMap out = pre;
    for (double& v : out.data) v = v > 0.0 ? v : slope * v;
    return out;
}

void leaky_backward(const FeatureMap& pre, double slope, FeatureMap& grad) {
    for (std::size_t i = 0; i < grad.data.size(); ++i) {
        if (!(pre.data[i] > 0.0)) grad.data[i] *= slope;
    }
}

double sign(double v) noexcept { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

ConvLayerWeights make_conv(std::size_t out, std::size_t in, std::mt19937_64& rng) {
    ConvLayerWeights w;
    w.out_channels = out;
    w.in_channels = in;
    w.kernel_h = 3;
    w.kernel_w = 3;
    w.kernel.resize(out * in * 9);
    w.bias.assign(out, 0.0f);
    const double bound = 1.0 / std::sqrt(static_cast<double>(in * 9));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (float& k : w.kernel) k = static_cast<float>(dist(rng));
    return w;
}

void validate_conv(const ConvLayerWeights& w, const char* name) {
    if (w.kernel_h % 2 == 0 || w.kernel_w % 2 == 0) {
        throw InvalidArgument(std::string(name) + ": kernel sides must be odd");
    }
    if (w.kernel.size() != w.out_channels * w.in_channels * w.kernel_h * w.kernel_w ||
        w.bias.size() != w.out_channels) {
        throw InvalidArgument(std::string(name) + ": tensor sizes do not match the declared shape");
    }
    const auto finite = [](float v) { return std::isfinite(v); };
    if (!std::all_of(w.kernel.begin(), w.kernel.end(), finite) ||
        !std::all_of(w.bias.begin(), w.bias.end(), finite)) {
        throw InvalidArgument(std::string(name) + ": non-finite weights");
    }
}

}  // namespace

FeatureMap conv2d(const FeatureMap& input, const ConvLayerWeights& weights) {
    if (input.channels != weights.in_channels) {
        throw ShapeMismatch("conv2d: input channel count differs from the kernel");
    }
    const auto rows = static_cast<long>(input.rows);
    const auto cols = static_cast<long>(input.cols);
    const auto ph = static_cast<long>(weights.kernel_h / 2);
    const auto pw = static_cast<long>(weights.kernel_w / 2);
    FeatureMap out(weights.out_channels, input.rows, input.cols);

    for (std::size_t o = 0; o < weights.out_channels; ++o) {
        double* dst = out.plane(o).data();
        std::fill(dst, dst + out.plane_size(), static_cast<double>(weights.bias[o]));
        for (std::size_t i = 0; i < weights.in_channels; ++i) {
            const double* src = input.plane(i).data();
            for (std::size_t ky = 0; ky < weights.kernel_h; ++ky) {
                const long dy = static_cast<long>(ky) - ph;
                const Range rr = valid_range(rows, dy);
                for (std::size_t kx = 0; kx < weights.kernel_w; ++kx) {
                    const long dx = static_cast<long>(kx) - pw;
                    const Range cr = valid_range(cols, dx);
                    const double wv = weights.at(o, i, ky, kx);
                    for (long r = rr.begin; r < rr.end; ++r) {
                        const double* s = src + (r + dy) * cols + dx;
                        double* d = dst + r * cols;
                        for (long c = cr.begin; c < cr.end; ++c) d[c] += wv * s[c];
                    }
                }
            }
        }
    }
    return out;
}

void conv2d_backward(const FeatureMap& input, const ConvLayerWeights& weights,
                     const FeatureMap& grad_output, FeatureMap* grad_input,
                     std::span<double> grad_kernel, std::span<double> grad_bias) {
    if (grad_output.channels != weights.out_channels || input.channels != weights.in_channels ||
        grad_output.rows != input.rows || grad_output.cols != input.cols) {
        throw ShapeMismatch("conv2d_backward: tensor shapes are inconsistent");
    }
    if (grad_input && (grad_input->channels != input.channels ||
                       grad_input->rows != input.rows || grad_input->cols != input.cols)) {
        throw ShapeMismatch("conv2d_backward: input gradient has the wrong shape");
    }
    const auto rows = static_cast<long>(input.rows);
    const auto cols = static_cast<long>(input.cols);
    const auto ph = static_cast<long>(weights.kernel_h / 2);
    const auto pw = static_cast<long>(weights.kernel_w / 2);

    for (std::size_t o = 0; o < weights.out_channels; ++o) {
        const double* g = grad_output.plane(o).data();
        double bias_acc = 0.0;
        for (std::size_t p = 0; p < grad_output.plane_size(); ++p) bias_acc += g[p];
        grad_bias[o] += bias_acc;

        for (std::size_t i = 0; i < weights.in_channels; ++i) {
            const double* src = input.plane(i).data();
            double* gin = grad_input ? grad_input->plane(i).data() : nullptr;
            for (std::size_t ky = 0; ky < weights.kernel_h; ++ky) {
                const long dy = static_cast<long>(ky) - ph;
                const Range rr = valid_range(rows, dy);
                for (std::size_t kx = 0; kx < weights.kernel_w; ++kx) {
                    const long dx = static_cast<long>(kx) - pw;
                    const Range cr = valid_range(cols, dx);
                    const double wv = weights.at(o, i, ky, kx);
                    double acc = 0.0;
                    for (long r = rr.begin; r < rr.end; ++r) {
                        const double* s = src + (r + dy) * cols + dx;
                        const double* gr = g + r * cols;
                        for (long c = cr.begin; c < cr.end; ++c) acc += gr[c] * s[c];
                        if (gin) {
                            double* d = gin + (r + dy) * cols + dx;
                            for (long c = cr.begin; c < cr.end; ++c) d[c] += wv * gr[c];
                        }
                    }
                    grad_kernel[((o * weights.in_channels + i) * weights.kernel_h + ky) *
                                    weights.kernel_w +
                                kx] += acc;
                }
            }
        }
    }
}

OperatorSpec OperatorSpec::of(const RadonOperator& op) {
    return {op.image_width(), op.image_height(), op.radii_count(), op.angles()};
}

bool OperatorSpec::matches(const RadonOperator& op) const noexcept {
    return width == op.image_width() && height == op.image_height() &&
           radii_count == op.radii_count() && angles == op.angles();
}

std::vector<std::span<float>> UnfoldedModel::parameters() {
    std::vector<std::span<float>> out;
    out.reserve(layers.size() * 6);
    for (auto& layer : layers) {
        for (ConvLayerWeights* conv : {&layer.conv1, &layer.conv2, &layer.conv3}) {
            out.emplace_back(conv->kernel);
            out.emplace_back(conv->bias);
        }
    }
    return out;
}

std::vector<std::span<const float>> UnfoldedModel::parameters() const {
    std::vector<std::span<const float>> out;
    out.reserve(layers.size() * 6);
    for (const auto& layer : layers) {
        for (const ConvLayerWeights* conv : {&layer.conv1, &layer.conv2, &layer.conv3}) {
            out.emplace_back(conv->kernel);
            out.emplace_back(conv->bias);
        }
    }
    return out;
}

std::size_t UnfoldedModel::parameter_count() const {
    std::size_t n = 0;
    for (auto p : parameters()) n += p.size();
    return n;
}

void UnfoldedModel::validate() const {
    if (layers.size() < kMinDepth || layers.size() > kMaxDepth) {
        std::ostringstream msg;
        msg << "unfolded depth " << layers.size() << " outside [" << kMinDepth << ", "
            << kMaxDepth << "]";
        throw InvalidArgument(msg.str());
    }
    const std::size_t width = channels();
    for (const auto& layer : layers) {
        validate_conv(layer.conv1, "conv1");
        validate_conv(layer.conv2, "conv2");
        validate_conv(layer.conv3, "conv3");
        if (layer.conv1.in_channels != 3 || layer.conv1.out_channels != width ||
            layer.conv2.in_channels != width || layer.conv2.out_channels != width ||
            layer.conv3.in_channels != width || layer.conv3.out_channels != 1) {
            throw InvalidArgument("unfolded layers are not shape-compatible");
        }
        if (!(layer.gamma > 0.0)) throw InvalidArgument("layer gamma must be > 0");
        dubline::validate(layer.threshold);
    }
}

ModelGradients ModelGradients::zeros_like(const UnfoldedModel& model) {
    ModelGradients g;
    for (auto p : model.parameters()) g.tensors.emplace_back(p.size(), 0.0);
    return g;
}

ModelGradients& ModelGradients::operator+=(const ModelGradients& other) {
    if (other.tensors.size() != tensors.size()) {
        throw ShapeMismatch("gradient sets have different tensor counts");
    }
    for (std::size_t t = 0; t < tensors.size(); ++t) {
        if (tensors[t].size() != other.tensors[t].size()) {
            throw ShapeMismatch("gradient tensors have different sizes");
        }
        for (std::size_t i = 0; i < tensors[t].size(); ++i) tensors[t][i] += other.tensors[t][i];
    }
    return *this;
}

ModelGradients& ModelGradients::operator*=(double scale) {
    for (auto& t : tensors) {
        for (double& v : t) v *= scale;
    }
    return *this;
}

double ModelGradients::max_abs() const noexcept {
    double m = 0.0;
    for (const auto& t : tensors) {
        for (double v : t) m = std::max(m, std::abs(v));
    }
    return m;
}

UnfoldedModel init_model(std::size_t depth, std::size_t channels, std::uint64_t seed,
                         const OperatorSpec& spec, const LayerOptions& options) {
    if (depth < UnfoldedModel::kMinDepth || depth > UnfoldedModel::kMaxDepth) {
        std::ostringstream msg;
        msg << "number of layers must be in [" << UnfoldedModel::kMinDepth << ", "
            << UnfoldedModel::kMaxDepth << "], got " << depth;
        throw InvalidArgument(msg.str());
    }
    if (channels == 0) throw InvalidArgument("hidden channel count must be >= 1");

    std::mt19937_64 rng(seed);
    UnfoldedModel model;
    model.operator_spec = spec;
    model.layers.reserve(depth);
    for (std::size_t k = 0; k < depth; ++k) {
        UnfoldedLayer layer;
        layer.conv1 = make_conv(channels, 3, rng);
        layer.conv2 = make_conv(channels, channels, rng);
        layer.conv3 = make_conv(1, channels, rng);
        layer.leaky_slope = options.leaky_slope;
        layer.gamma = options.gamma;
        layer.threshold = options.threshold;
        model.layers.push_back(std::move(layer));
    }
    model.validate();
    return model;
}

Sinogram ForwardTrace::restored() const {
    Sinogram out = layers.front().x;
    for (std::size_t k = 1; k < layers.size(); ++k) {
        const auto src = layers[k].x.values();
        auto dst = out.values();
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = std::max(dst[i], src[i]);
    }
    return out;
}

ForwardTrace forward(const UnfoldedModel& model, const RadonOperator& op, const Image& y) {
    model.validate();
    if (!model.operator_spec.matches(op)) {
        throw ShapeMismatch("operator geometry differs from the model's operator spec");
    }
    ForwardTrace trace;
    trace.projected = op.project(y);
    trace.model_revision = model.revision;
    trace.model_channels = model.channels();

    const std::size_t rows = op.radii_count();
    const std::size_t cols = op.angles().size();
    const std::size_t plane = rows * cols;
    Sinogram x = op.zero_sinogram();
    Sinogram z = op.zero_sinogram();

    trace.layers.reserve(model.depth());
    for (const UnfoldedLayer& layer : model.layers) {
        LayerTrace lt;
        lt.input = FeatureMap(3, rows, cols);
        std::copy_n(trace.projected.values().begin(), plane, lt.input.plane(0).begin());
        std::copy_n(x.values().begin(), plane, lt.input.plane(1).begin());
        std::copy_n(z.values().begin(), plane, lt.input.plane(2).begin());

        lt.pre1 = conv2d(lt.input, layer.conv1);
        lt.pre2 = conv2d(leaky(lt.pre1, layer.leaky_slope), layer.conv2);
        const FeatureMap u_map = conv2d(leaky(lt.pre2, layer.leaky_slope), layer.conv3);
        lt.u = Sinogram(op.angles(), Matrix(rows, cols, u_map.data));

        lt.shifted = lt.u;
        axpy(1.0 / layer.gamma, z.matrix(), lt.shifted.matrix());
        lt.threshold = resolve_threshold_detail(layer.threshold, lt.shifted.matrix());
        lt.x = Sinogram(op.angles(), soft_threshold(lt.shifted.matrix(), lt.threshold.lambda));
        lt.z = z;
        for (std::size_t i = 0; i < plane; ++i) {
            lt.z.values()[i] += layer.gamma * (lt.u.values()[i] - lt.x.values()[i]);
        }
        lt.reconstruction = op.synthesize(lt.x);

        x = lt.x;
        z = lt.z;
        trace.layers.push_back(std::move(lt));
    }

    trace.fused = trace.layers.front().reconstruction;
    trace.winner.assign(trace.fused.size(), 0);
    for (std::size_t k = 1; k < trace.layers.size(); ++k) {
        const auto src = trace.layers[k].reconstruction.values();
        auto dst = trace.fused.values();
        for (std::size_t p = 0; p < dst.size(); ++p) {
            if (src[p] > dst[p]) {
                dst[p] = src[p];
                trace.winner[p] = static_cast<std::uint8_t>(k);
            }
        }
    }
    return trace;
}

ModelGradients backward(const UnfoldedModel& model, const RadonOperator& op,
                        const ForwardTrace& trace, const Image& grad_output) {
    if (trace.layers.size() != model.depth() || trace.model_channels != model.channels() ||
        trace.model_revision != model.revision) {
        throw InvalidArgument("stale forward trace: model changed since the forward pass");
    }
    if (!model.operator_spec.matches(op)) {
        throw ShapeMismatch("operator geometry differs from the model's operator spec");
    }
    if (grad_output.width() != trace.fused.width() ||
        grad_output.height() != trace.fused.height()) {
        throw ShapeMismatch("output gradient does not match the fused image");
    }

    ModelGradients grads = ModelGradients::zeros_like(model);
    const std::size_t depth = model.depth();
    const std::size_t rows = op.radii_count();
    const std::size_t cols = op.angles().size();
    const std::size_t plane = rows * cols;
    const std::size_t channels = model.channels();

    std::vector<Image> grad_recon(depth, Image(grad_output.width(), grad_output.height()));
    for (std::size_t p = 0; p < grad_output.size(); ++p) {
        grad_recon[trace.winner[p]].values()[p] = grad_output.values()[p];
    }

    std::vector<double> grad_x_next(plane, 0.0);
    std::vector<double> grad_z_next(plane, 0.0);

    for (std::size_t kk = depth; kk-- > 0;) {
        const UnfoldedLayer& layer = model.layers[kk];
        const LayerTrace& lt = trace.layers[kk];
        const double gamma = layer.gamma;

        const Sinogram recon_grad = op.project(grad_recon[kk]);
        std::vector<double> gx(plane), gz(plane), gu(plane), gz_prev(plane);
        for (std::size_t i = 0; i < plane; ++i) {
            gx[i] = grad_x_next[i] + recon_grad.values()[i];
            gz[i] = grad_z_next[i];
            // z = z_prev + gamma (u - x)
            gu[i] = gamma * gz[i];
            gx[i] -= gamma * gz[i];
            gz_prev[i] = gz[i];
        }

        // x = S_lambda(shifted), lambda possibly a function of shifted
        const double lambda = lt.threshold.lambda;
        const auto v = lt.shifted.values();
        std::vector<double> gv(plane, 0.0);
        double grad_lambda = 0.0;
        for (std::size_t i = 0; i < plane; ++i) {
            if (std::abs(v[i]) > lambda) {
                gv[i] = gx[i];
                grad_lambda -= sign(v[i]) * gx[i];
            }
        }
        if (const auto* rs = std::get_if<RowSumThreshold>(&layer.threshold)) {
            const double coeff = grad_lambda * rs->scale / static_cast<double>(cols);
            const std::size_t row = lt.threshold.row;
            for (std::size_t j = 0; j < cols; ++j) {
                gv[row * cols + j] += coeff * sign(v[row * cols + j]);
            }
        }

        // shifted = u + z_prev / gamma
        FeatureMap grad_u(1, rows, cols);
        for (std::size_t i = 0; i < plane; ++i) {
            grad_u.data[i] = gu[i] + gv[i];
            gz_prev[i] += gv[i] / gamma;
        }

        const std::size_t base = kk * 6;
        const FeatureMap h1 = leaky(lt.pre1, layer.leaky_slope);
        const FeatureMap h2 = leaky(lt.pre2, layer.leaky_slope);

        FeatureMap grad_h2(channels, rows, cols);
        conv2d_backward(h2, layer.conv3, grad_u, &grad_h2, grads.tensors[base + 4],
                        grads.tensors[base + 5]);
        leaky_backward(lt.pre2, layer.leaky_slope, grad_h2);

        FeatureMap grad_h1(channels, rows, cols);
        conv2d_backward(h1, layer.conv2, grad_h2, &grad_h1, grads.tensors[base + 2],
                        grads.tensors[base + 3]);
        leaky_backward(lt.pre1, layer.leaky_slope, grad_h1);

        if (kk > 0) {
            FeatureMap grad_in(3, rows, cols);
            conv2d_backward(lt.input, layer.conv1, grad_h1, &grad_in, grads.tensors[base],
                            grads.tensors[base + 1]);
            const auto gin_x = grad_in.plane(1);
            const auto gin_z = grad_in.plane(2);
            for (std::size_t i = 0; i < plane; ++i) {
                grad_x_next[i] = gin_x[i];
                grad_z_next[i] = gz_prev[i] + gin_z[i];
            }
        } else {
            conv2d_backward(lt.input, layer.conv1, grad_h1, nullptr, grads.tensors[base],
                            grads.tensors[base + 1]);
        }
    }
    return grads;
}

}  // namespace dubline
