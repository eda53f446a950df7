#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dubline/angle_set.hpp"
#include "dubline/image.hpp"
#include "dubline/prox.hpp"
#include "dubline/radon.hpp"

namespace dubline {

/// Channel-major stack of equally sized planes.
struct FeatureMap {
    std::size_t channels = 0;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    FeatureMap() = default;
    FeatureMap(std::size_t channels, std::size_t rows, std::size_t cols)
        : channels(channels), rows(rows), cols(cols), data(channels * rows * cols, 0.0) {}

    std::size_t plane_size() const noexcept { return rows * cols; }
    std::span<double> plane(std::size_t c) noexcept {
        return {data.data() + c * plane_size(), plane_size()};
    }
    std::span<const double> plane(std::size_t c) const noexcept {
        return {data.data() + c * plane_size(), plane_size()};
    }
};

/// Same-padded 2-D convolution weights, kernel laid out (out, in, kh, kw).
struct ConvLayerWeights {
    std::size_t out_channels = 0;
    std::size_t in_channels = 0;
    std::size_t kernel_h = 3;
    std::size_t kernel_w = 3;
    std::vector<float> kernel;
    std::vector<float> bias;

    float& at(std::size_t o, std::size_t i, std::size_t ky, std::size_t kx) noexcept {
        return kernel[((o * in_channels + i) * kernel_h + ky) * kernel_w + kx];
    }
    float at(std::size_t o, std::size_t i, std::size_t ky, std::size_t kx) const noexcept {
        return kernel[((o * in_channels + i) * kernel_h + ky) * kernel_w + kx];
    }
    bool operator==(const ConvLayerWeights&) const = default;
};

FeatureMap conv2d(const FeatureMap& input, const ConvLayerWeights& weights);

/// Accumulates d(loss)/d(input), d/d(kernel) and d/d(bias) given d/d(output).
/// `grad_input` may be null when the input gradient is not needed.
void conv2d_backward(const FeatureMap& input, const ConvLayerWeights& weights,
                     const FeatureMap& grad_output, FeatureMap* grad_input,
                     std::span<double> grad_kernel, std::span<double> grad_bias);

/// One unrolled iteration: u = W(project(y), x, z), x = S(u + z / gamma),
/// z = z + gamma (u - x). W is conv1 -> leaky -> conv2 -> leaky -> conv3.
struct UnfoldedLayer {
    ConvLayerWeights conv1;
    ConvLayerWeights conv2;
    ConvLayerWeights conv3;
    double leaky_slope = 0.01;
    double gamma = 1.0;
    ThresholdPolicy threshold = RowSumThreshold{0.1};

    bool operator==(const UnfoldedLayer&) const = default;
};

/// Geometry the model was built for.
struct OperatorSpec {
    std::size_t width = 0;
    std::size_t height = 0;
    std::size_t radii_count = 0;
    AngleSet angles;

    static OperatorSpec of(const RadonOperator& op);
    bool matches(const RadonOperator& op) const noexcept;
    bool operator==(const OperatorSpec&) const = default;
};

struct LayerOptions {
    double leaky_slope = 0.01;
    double gamma = 1.0;
    ThresholdPolicy threshold = RowSumThreshold{0.1};
};

struct UnfoldedModel {
    static constexpr std::size_t kMinDepth = 2;
    static constexpr std::size_t kMaxDepth = 10;
    static constexpr std::uint32_t kFormatVersion = 1;

    std::vector<UnfoldedLayer> layers;
    OperatorSpec operator_spec;
    std::uint32_t version = kFormatVersion;
    /// Bumped whenever parameters change through an optimizer step.
    std::uint64_t revision = 0;

    std::size_t depth() const noexcept { return layers.size(); }
    std::size_t channels() const noexcept {
        return layers.empty() ? 0 : layers.front().conv1.out_channels;
    }

    /// Trainable tensors in declaration order: per layer conv1 kernel, conv1
    /// bias, conv2 kernel, conv2 bias, conv3 kernel, conv3 bias.
    std::vector<std::span<float>> parameters();
    std::vector<std::span<const float>> parameters() const;
    std::size_t parameter_count() const;

    void validate() const;

    bool operator==(const UnfoldedModel& other) const {
        return layers == other.layers && operator_spec == other.operator_spec &&
               version == other.version;
    }
};

/// Gradients shaped like UnfoldedModel::parameters().
struct ModelGradients {
    std::vector<std::vector<double>> tensors;

    static ModelGradients zeros_like(const UnfoldedModel& model);
    ModelGradients& operator+=(const ModelGradients& other);
    ModelGradients& operator*=(double scale);
    double max_abs() const noexcept;
};

/// Fan-in scaled uniform kernels (bound 1 / sqrt(fan_in)), zero biases.
UnfoldedModel init_model(std::size_t depth, std::size_t channels, std::uint64_t seed,
                         const OperatorSpec& spec, const LayerOptions& options = {});

struct LayerTrace {
    FeatureMap input;  ///< [project(y), x_prev, z_prev]
    FeatureMap pre1;   ///< conv1 output before activation
    FeatureMap pre2;   ///< conv2 output before activation
    Sinogram u;
    Sinogram shifted;  ///< u + z_prev / gamma
    Sinogram x;
    Sinogram z;
    ResolvedThreshold threshold;
    Image reconstruction;  ///< synthesize(x)
};

struct ForwardTrace {
    Sinogram projected;  ///< project(y)
    std::vector<LayerTrace> layers;
    Image fused;                       ///< pixelwise max over reconstructions
    std::vector<std::uint8_t> winner;  ///< layer index supplying each fused pixel
    std::uint64_t model_revision = 0;
    std::size_t model_channels = 0;

    /// Radon-domain restoration used for detection: elementwise max of x over layers.
    Sinogram restored() const;
};

ForwardTrace forward(const UnfoldedModel& model, const RadonOperator& op, const Image& y);

/// Reverse-mode gradients of <grad_output, fused> with respect to every
/// trainable tensor. Throws InvalidArgument for a trace from another model
/// revision or shape.
ModelGradients backward(const UnfoldedModel& model, const RadonOperator& op,
                        const ForwardTrace& trace, const Image& grad_output);

}  // namespace dubline
