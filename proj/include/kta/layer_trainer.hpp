#pragma once

#include "kta/errors.hpp"
#include "kta/kernel.hpp"
#include "kta/preprocess.hpp"
#include "kta/types.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace kta {

// One layer's weights. The last row of W holds the bias weights; sigma is
// the kernel bandwidth the layer was trained against.
struct LayerParams {
    Matrix W;            // (input_dim + 1) x p
    double sigma = 1.0;

    Index width() const { return W.cols(); }
    Index input_dim() const { return W.rows() - 1; }
};

struct TrainConfig {
    double learning_rate = 0.5;
    int max_iters = 500;
    double tol = 1e-6;          // relative cost decrease threshold
    int tol_window = 10;        // iterations the decrease is measured across
    double lambda = 1e-4;
    double init_scale = 1e-3;
    double sigma = 1.0;
    std::uint64_t seed = 0;
};

struct TrainTrace {
    std::vector<double> costs;  // length iters_run + 1, starts at the initial cost
    bool converged = false;
    int iters_run = 0;
};

inline double alignment_cost(const KernelPair& kp, const LayerParams& w, double lambda) {
    return alignment_cost(kp.K, kp.T, w.W, lambda);
}

// tanh(append_bias(d_prev) * W); every entry strictly inside (-1, 1).
inline FeatureMatrix forward(const FeatureMatrix& d_prev, const LayerParams& w) {
    if (d_prev.dim() + 1 != w.W.rows())
        throw argument_error("forward: input dim " + std::to_string(d_prev.dim()) +
                             " incompatible with weight rows " + std::to_string(w.W.rows()));
    FeatureMatrix out;
    out.rows = (append_bias(d_prev).rows * w.W).array().tanh();
    out.normalized = false;
    return out;
}

struct CostGrad {
    double cost = 0.0;
    Matrix grad;   // same shape as W
};

namespace detail {

// Cost and exact gradient of the alignment objective for one layer, given
// the bias-appended input A. The differentiated pipeline is
//   Z = A*W,  X = tanh(Z),  Y = row-center + row-unit-norm of X,
//   G = Y*Y',  K = exp((G-1)/s^2),  cost = ||K-T||_F^2/n^2 + lambda*||W||^2.
// Degenerate rows of X (norm below kDegenerateRowNorm after centering)
// become zero rows of Y and contribute no gradient through the division.
inline CostGrad alignment_cost_grad(const Matrix& a, const Matrix& w, double sigma,
                                    const Matrix& t, double lambda) {
    const Index n = a.rows();
    const double inv_s2 = 1.0 / (sigma * sigma);

    const Matrix z = a * w;
    if (!z.allFinite())
        throw numeric_error("non-finite values at stage: linear map");
    const Matrix x = z.array().tanh();

    Matrix y = x;
    Vector inv_norm(n);   // 0 marks a degenerate row
    for (Index i = 0; i < n; ++i) {
        y.row(i).array() -= y.row(i).mean();
        const double norm = y.row(i).norm();
        if (norm < kDegenerateRowNorm) {
            y.row(i).setZero();
            inv_norm(i) = 0.0;
        } else {
            y.row(i) /= norm;
            inv_norm(i) = 1.0 / norm;
        }
    }

    const Matrix g = y * y.transpose();
    const Matrix k = ((g.array() - 1.0) * inv_s2).exp();
    if (!k.allFinite())
        throw numeric_error("non-finite values at stage: kernel exp");

    const Matrix diff = k - t;
    const double n2 = static_cast<double>(n) * static_cast<double>(n);
    const double cost = diff.squaredNorm() / n2 + lambda * w.squaredNorm();
    if (!std::isfinite(cost))
        throw numeric_error("non-finite values at stage: cost");

    // Backward: dC/dK = (2/n^2)(K-T), dK/dG = K/s^2, and with dC/dG =: S
    // symmetric, dC/dY = 2*S*Y. Each row then passes back through the unit
    // norm division (project out the radial component, scale by 1/|c|) and
    // the centering (remove the mean again), then tanh' and the linear map.
    const Matrix dg = diff.cwiseProduct(k) * (2.0 * inv_s2 / n2);
    const Matrix dy = 2.0 * (dg * y);

    Matrix dx(n, x.cols());
    for (Index i = 0; i < n; ++i) {
        if (inv_norm(i) == 0.0) {
            dx.row(i).setZero();
            continue;
        }
        const double radial = dy.row(i).dot(y.row(i));
        const RowVector dc = (dy.row(i) - radial * y.row(i)) * inv_norm(i);
        dx.row(i) = dc.array() - dc.mean();
    }

    const Matrix dz = dx.cwiseProduct((1.0 - x.array().square()).matrix());

    CostGrad out;
    out.cost = cost;
    out.grad = a.transpose() * dz + 2.0 * lambda * w;
    if (!out.grad.allFinite())
        throw numeric_error("non-finite values at stage: gradient");
    return out;
}

inline Matrix gaussian_init(Index rows, Index cols, double scale, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix w(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j)
            w(i, j) = scale * gauss(rng);
    return w;
}

// True once the relative cost decrease across the trailing window drops
// below tol.
inline bool window_converged(const std::vector<double>& costs, int window, double tol) {
    if (window <= 0 || static_cast<int>(costs.size()) <= window)
        return false;
    const double before = costs[costs.size() - 1 - static_cast<std::size_t>(window)];
    const double now = costs.back();
    const double denom = std::max(std::abs(before), 1e-300);
    return (before - now) / denom < tol;
}

}  // namespace detail

// Alignment cost at W plus its exact derivative w.r.t. every entry of W.
// d_prev must already be row-normalized; the kernel is built from the layer
// output after in-loop centering and unit-norm scaling.
inline CostGrad cost_and_gradient(const FeatureMatrix& d_prev, const LayerParams& w,
                                  const std::vector<int>& labels, const TrainConfig& cfg) {
    if (static_cast<Index>(labels.size()) != d_prev.n())
        throw argument_error("cost_and_gradient: labels/sample count mismatch");
    if (d_prev.dim() + 1 != w.W.rows())
        throw argument_error("cost_and_gradient: input dim incompatible with W");
    const Matrix t = target_kernel(labels);
    const Matrix a = append_bias(d_prev).rows;
    return detail::alignment_cost_grad(a, w.W, w.sigma, t, cfg.lambda);
}

// Full-batch gradient descent on the alignment cost. W starts at
// init_scale * N(0,1) draws from the seeded generator and is updated as
// W <- W - mu*gW until the windowed relative decrease falls below tol or
// max_iters steps have been taken.
inline std::pair<LayerParams, TrainTrace> train_layer(const FeatureMatrix& d_prev,
                                                      const std::vector<int>& labels,
                                                      Index p, const TrainConfig& cfg) {
    if (p < 1)
        throw argument_error("train_layer: width must be >= 1");
    if (!d_prev.normalized)
        throw argument_error("train_layer: input must be row-normalized");
    if (static_cast<Index>(labels.size()) != d_prev.n())
        throw argument_error("train_layer: labels/sample count mismatch");

    const Matrix t = target_kernel(labels);
    const Matrix a = append_bias(d_prev).rows;

    LayerParams layer;
    layer.sigma = cfg.sigma;
    layer.W = detail::gaussian_init(a.cols(), p, cfg.init_scale, cfg.seed);

    TrainTrace trace;
    for (int iter = 0;; ++iter) {
        CostGrad cg;
        try {
            cg = detail::alignment_cost_grad(a, layer.W, layer.sigma, t, cfg.lambda);
        } catch (const numeric_error& e) {
            throw numeric_error(std::string(e.what()) + " (iteration " + std::to_string(iter) + ")",
                                trace.costs);
        }
        trace.costs.push_back(cg.cost);
        if (detail::window_converged(trace.costs, cfg.tol_window, cfg.tol)) {
            trace.converged = true;
            break;
        }
        if (iter >= cfg.max_iters)
            break;
        layer.W -= cfg.learning_rate * cg.grad;
    }
    trace.iters_run = static_cast<int>(trace.costs.size()) - 1;
    return {std::move(layer), std::move(trace)};
}

}  // namespace kta
