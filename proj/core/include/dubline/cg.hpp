#pragma once

#include <cmath>
#include <cstddef>

#include "dubline/matrix.hpp"

namespace dubline {

struct CgConfig {
    double tol = 1e-6;
    std::size_t max_iter = 200;
};

struct CgResult {
    std::size_t iterations = 0;
    double relative_residual = 0.0;
    bool converged = false;
};

/**
 * Matrix-free conjugate gradient for a symmetric positive definite operator.
 * `apply(p)` returns A p. `x` holds the initial guess on entry and the
 * solution on exit. Stops once ||b - A x|| <= tol * ||b||.
 *
 * If `applied_x` is non-null and non-empty it must hold A x for the initial
 * guess, which saves one application; on return it holds A x for the
 * solution (tracked through the recurrence, not recomputed).
 */
template <class Apply>
CgResult conjugate_gradient(Apply&& apply, const Matrix& b, Matrix& x, const CgConfig& cfg,
                            Matrix* applied_x = nullptr) {
    const double b_norm = norm2(b);
    if (b_norm == 0.0) {
        x.fill(0.0);
        if (applied_x) *applied_x = Matrix(b.rows(), b.cols());
        return {0, 0.0, true};
    }

    Matrix ax = applied_x && applied_x->size() == x.size() ? std::move(*applied_x) : apply(x);
    Matrix r = b;
    r -= ax;
    double rho = dot(r, r);
    const double target = cfg.tol * b_norm;
    CgResult result{0, std::sqrt(rho) / b_norm, std::sqrt(rho) <= target};

    Matrix p = r;
    for (std::size_t iter = 1; !result.converged && iter <= cfg.max_iter; ++iter) {
        const Matrix q = apply(p);
        const double alpha = rho / dot(p, q);
        axpy(alpha, p, x);
        axpy(alpha, q, ax);
        axpy(-alpha, q, r);

        const double rho_next = dot(r, r);
        result = {iter, std::sqrt(rho_next) / b_norm, std::sqrt(rho_next) <= target};

        const double beta = rho_next / rho;
        rho = rho_next;
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = r[i] + beta * p[i];
    }
    if (applied_x) *applied_x = std::move(ax);
    return result;
}

}  // namespace dubline
