#include "dubline/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dubline/error.hpp"

namespace dubline {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), data_(std::move(values)) {
    if (data_.size() != rows * cols) {
        throw ShapeMismatch("matrix storage does not match its shape");
    }
}

void Matrix::fill(double value) noexcept { std::fill(data_.begin(), data_.end(), value); }

Matrix& Matrix::operator+=(const Matrix& other) {
    require_same_shape(*this, other, "matrix +=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
    require_same_shape(*this, other, "matrix -=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
}

Matrix& Matrix::operator*=(double scale) noexcept {
    for (double& v : data_) v *= scale;
    return *this;
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* context) {
    if (!a.same_shape(b)) {
        std::ostringstream msg;
        msg << context << ": shape " << a.rows() << "x" << a.cols() << " vs " << b.rows() << "x"
            << b.cols();
        throw ShapeMismatch(msg.str());
    }
}

double dot(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "dot");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

double norm2(const Matrix& a) {
    double acc = 0.0;
    for (double v : a.values()) acc += v * v;
    return std::sqrt(acc);
}

double norm1(const Matrix& a) {
    double acc = 0.0;
    for (double v : a.values()) acc += std::abs(v);
    return acc;
}

double max_abs(const Matrix& a) {
    double m = 0.0;
    for (double v : a.values()) m = std::max(m, std::abs(v));
    return m;
}

bool all_finite(const Matrix& a) noexcept {
    return std::all_of(a.values().begin(), a.values().end(),
                       [](double v) { return std::isfinite(v); });
}

void axpy(double alpha, const Matrix& x, Matrix& y) {
    require_same_shape(x, y, "axpy");
    const double* xs = x.values().data();
    double* ys = y.values().data();
    for (std::size_t i = 0; i < x.size(); ++i) ys[i] += alpha * xs[i];
}

}  // namespace dubline
