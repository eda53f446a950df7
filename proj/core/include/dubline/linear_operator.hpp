#pragma once

#include <cstddef>

#include "dubline/image.hpp"

namespace dubline {

/// A linear synthesis map from the Radon domain to the image domain together
/// with its exact adjoint. The solvers only ever see this interface.
class LinearOperator {
public:
    virtual ~LinearOperator() = default;

    virtual std::size_t image_width() const noexcept = 0;
    virtual std::size_t image_height() const noexcept = 0;

    virtual Sinogram zero_sinogram() const = 0;
    Image zero_image() const { return Image(image_width(), image_height()); }

    /// Forward projection, image -> sinogram. Adjoint of `synthesize`.
    virtual Sinogram project(const Image& image) const = 0;
    /// Synthesis, sinogram -> image.
    virtual Image synthesize(const Sinogram& sinogram) const = 0;
};

}  // namespace dubline
