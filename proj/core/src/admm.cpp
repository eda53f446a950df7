#include "dubline/admm.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "dubline/error.hpp"
#include "dubline/prox.hpp"

namespace dubline {

void AdmmConfig::validate() const {
    if (!(gamma > 0.0)) throw InvalidArgument("ADMM penalty gamma must be > 0");
    if (!(alpha >= 0.0)) throw InvalidArgument("ADMM alpha must be >= 0");
    if (!(tol_primal > 0.0) || !(tol_dual > 0.0) || !(cg.tol > 0.0)) {
        throw InvalidArgument("ADMM tolerances must be > 0");
    }
    if (max_iter == 0) throw InvalidArgument("ADMM max_iter must be >= 1");
}

namespace {

void require_same(const Sinogram& a, const Sinogram& b, const char* context) {
    if (!a.same_shape(b)) {
        std::ostringstream msg;
        msg << context << ": sinogram shapes differ";
        throw ShapeMismatch(msg.str());
    }
}

}  // namespace

double objective(const LinearOperator& op, const Image& y, const Sinogram& x, double alpha) {
    Image residual = op.synthesize(x);
    require_same_shape(residual.pixels(), y.pixels(), "objective");
    residual.pixels() -= y.pixels();
    const double r = norm2(residual.pixels());
    return 0.5 * r * r + alpha * norm1(x.matrix());
}

Sinogram u_update_projected(const LinearOperator& op, const Sinogram& projected_y,
                            const Sinogram& x, const Sinogram& z, double gamma,
                            const CgConfig& cg, const Sinogram* warm_start,
                            std::size_t* cg_iterations, Matrix* applied_warm_start) {
    if (!(gamma > 0.0)) throw InvalidArgument("u-update requires gamma > 0");
    require_same(projected_y, x, "u-update");
    require_same(x, z, "u-update");

    Matrix rhs = projected_y.matrix();
    axpy(gamma, x.matrix(), rhs);
    rhs -= z.matrix();

    Matrix u = warm_start ? warm_start->matrix() : Matrix(rhs.rows(), rhs.cols());
    require_same_shape(u, rhs, "u-update warm start");

    const AngleSet& angles = x.angles();
    auto normal_op = [&](const Matrix& v) {
        Matrix out = op.project(op.synthesize(Sinogram(angles, v))).matrix();
        axpy(gamma, v, out);
        return out;
    };
    const CgResult result = conjugate_gradient(normal_op, rhs, u, cg, applied_warm_start);
    if (cg_iterations) *cg_iterations = result.iterations;
    if (!result.converged) {
        std::ostringstream msg;
        msg << "conjugate gradient stalled at relative residual " << result.relative_residual
            << " after " << result.iterations << " iterations (try a larger gamma)";
        throw ConvergenceError(msg.str());
    }
    return Sinogram(angles, std::move(u));
}

Sinogram u_update(const LinearOperator& op, const Image& y, const Sinogram& x, const Sinogram& z,
                  double gamma, const CgConfig& cg, const Sinogram* warm_start) {
    return u_update_projected(op, op.project(y), x, z, gamma, cg, warm_start);
}

Sinogram z_update(const Sinogram& z, const Sinogram& u, const Sinogram& x, double gamma) {
    require_same(z, u, "z-update");
    require_same(u, x, "z-update");
    Sinogram out = z;
    for (std::size_t i = 0; i < out.values().size(); ++i) {
        out.values()[i] += gamma * (u.values()[i] - x.values()[i]);
    }
    return out;
}

SolveResult solve(const LinearOperator& op, const Image& y, const AdmmConfig& cfg) {
    cfg.validate();
    using clock = std::chrono::steady_clock;
    const auto start = clock::now();

    const Sinogram projected_y = op.project(y);
    AdmmState state{op.zero_sinogram(), op.zero_sinogram(), op.zero_sinogram(), 0};
    SolveHistory history;
    const double lambda = cfg.alpha / cfg.gamma;
    bool converged = false;
    Matrix normal_u;  // (A^T A + gamma I) u, carried between CG solves

    for (std::size_t k = 0; k < cfg.max_iter; ++k) {
        std::size_t cg_iters = 0;
        state.u = u_update_projected(op, projected_y, state.x, state.z, cfg.gamma, cfg.cg,
                                     &state.u, &cg_iters, &normal_u);

        Matrix shifted = state.u.matrix();
        axpy(1.0 / cfg.gamma, state.z.matrix(), shifted);
        Sinogram x_next(state.x.angles(), soft_threshold(shifted, lambda));

        Matrix dx = x_next.matrix() - state.x.matrix();
        state.x = std::move(x_next);
        state.z = z_update(state.z, state.u, state.x, cfg.gamma);
        state.iter = k + 1;

        const double primal = norm2(state.u.matrix() - state.x.matrix());
        const double dual = cfg.gamma * norm2(dx);
        history.objective.push_back(objective(op, y, state.x, cfg.alpha));
        history.primal_residual.push_back(primal);
        history.dual_residual.push_back(dual);
        history.cg_iterations.push_back(cg_iters);
        history.seconds.push_back(std::chrono::duration<double>(clock::now() - start).count());

        const double primal_scale = std::max(norm2(state.u.matrix()), norm2(state.x.matrix()));
        const double dual_scale =
            std::max(cfg.gamma * norm2(state.x.matrix()), norm2(state.z.matrix()));
        if (!cfg.fixed_iterations && primal <= cfg.tol_primal * primal_scale &&
            dual <= cfg.tol_dual * dual_scale) {
            converged = true;
            break;
        }
    }

    SolveResult result;
    result.x = state.x;
    result.history = std::move(history);
    result.state = std::move(state);
    result.converged = converged;
    return result;
}

}  // namespace dubline
