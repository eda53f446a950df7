#pragma once

#include <cstddef>
#include <vector>

#include "dubline/cg.hpp"
#include "dubline/image.hpp"
#include "dubline/linear_operator.hpp"

namespace dubline {

struct AdmmConfig {
    double alpha = 1.0;        ///< l1 weight
    double gamma = 1.0;        ///< augmented Lagrangian penalty, > 0
    std::size_t max_iter = 100;
    double tol_primal = 1e-4;  ///< relative to max(||u||, ||x||)
    double tol_dual = 1e-4;    ///< relative to max(gamma ||x||, ||z||)
    /// Ignore the residual test and always run max_iter iterations (timing runs).
    bool fixed_iterations = false;
    CgConfig cg;

    void validate() const;
};

struct AdmmState {
    Sinogram u;
    Sinogram x;
    Sinogram z;
    std::size_t iter = 0;
};

struct SolveHistory {
    std::vector<double> objective;
    std::vector<double> primal_residual;
    std::vector<double> dual_residual;
    std::vector<double> seconds;  ///< cumulative wall time at the end of each iteration
    std::vector<std::size_t> cg_iterations;

    std::size_t size() const noexcept { return objective.size(); }
};

struct SolveResult {
    Sinogram x;
    SolveHistory history;
    AdmmState state;
    bool converged = false;
};

/// 0.5 * ||y - synthesize(x)||^2 + alpha * ||x||_1
double objective(const LinearOperator& op, const Image& y, const Sinogram& x, double alpha);

/// Exact u-minimizer: solves (A^T A + gamma I) u = A^T y + gamma x - z with
/// A = synthesize, matrix-free by conjugate gradient. Warm-starts from
/// `warm_start` when given. Throws ConvergenceError if CG stalls.
Sinogram u_update(const LinearOperator& op, const Image& y, const Sinogram& x, const Sinogram& z,
                  double gamma, const CgConfig& cg, const Sinogram* warm_start = nullptr);

/// Same as u_update with the right-hand side term A^T y precomputed.
/// `applied_warm_start`, if non-empty, holds (A^T A + gamma I) warm_start and
/// is replaced by the same product for the returned u.
Sinogram u_update_projected(const LinearOperator& op, const Sinogram& projected_y,
                            const Sinogram& x, const Sinogram& z, double gamma,
                            const CgConfig& cg, const Sinogram* warm_start = nullptr,
                            std::size_t* cg_iterations = nullptr,
                            Matrix* applied_warm_start = nullptr);

/// z + gamma * (u - x)
Sinogram z_update(const Sinogram& z, const Sinogram& u, const Sinogram& x, double gamma);

/// Iterative ADMM from u = x = z = 0 until both residuals fall below their
/// tolerances or max_iter is reached.
SolveResult solve(const LinearOperator& op, const Image& y, const AdmmConfig& cfg);

}  // namespace dubline
