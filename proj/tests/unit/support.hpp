#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

#include "dubline/image.hpp"

namespace dubline::testing {

inline Image random_image(std::size_t w, std::size_t h, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    Image img(w, h);
    for (double& v : img.values()) v = u(rng);
    return img;
}

inline Sinogram random_sinogram(std::size_t radii, const AngleSet& angles, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 1.0);
    Sinogram s(radii, angles);
    for (double& v : s.values()) v = n(rng);
    return s;
}

inline double rel_diff(double a, double b) {
    const double scale = std::max({std::abs(a), std::abs(b), 1e-12});
    return std::abs(a - b) / scale;
}

}  // namespace dubline::testing
