#pragma once

#include "kta/errors.hpp"
#include "kta/preprocess.hpp"
#include "kta/types.hpp"

#include <string>
#include <vector>

namespace kta {

// Ideal kernel from labels: T(i,j) = 1 iff samples i and j share a class.
inline Matrix target_kernel(const std::vector<int>& labels) {
    if (labels.empty())
        throw argument_error("target_kernel: empty label vector");
    const Index n = static_cast<Index>(labels.size());
    Matrix t(n, n);
    for (Index i = 0; i < n; ++i) {
        t(i, i) = 1.0;
        for (Index j = i + 1; j < n; ++j) {
            const double v = labels[static_cast<std::size_t>(i)] ==
                                     labels[static_cast<std::size_t>(j)]
                                 ? 1.0
                                 : 0.0;
            t(i, j) = v;
            t(j, i) = v;
        }
    }
    return t;
}

// Gaussian kernel over row-normalized features. For unit-norm rows the
// pairwise squared distance is 2 - 2*dot, so the whole matrix reduces to
// exp((G - 1)/sigma^2) with G the sample Gram x*x'. The exponent is clamped
// at zero so roundoff in G cannot push entries above 1.
inline Matrix gaussian_gram(const FeatureMatrix& x, double sigma) {
    if (!x.normalized)
        throw argument_error("gaussian_gram: input rows must be normalized");
    if (!(sigma > 0.0))
        throw argument_error("gaussian_gram: sigma must be positive, got " + std::to_string(sigma));
    const double inv_s2 = 1.0 / (sigma * sigma);
    Matrix g = x.rows * x.rows.transpose();
    return ((g.array() - 1.0).min(0.0) * inv_s2).exp();
}

// Kernel between two row-normalized sets: rows of a against rows of b.
inline Matrix gaussian_cross_gram(const FeatureMatrix& a, const FeatureMatrix& b, double sigma) {
    if (!a.normalized || !b.normalized)
        throw argument_error("gaussian_cross_gram: inputs must be normalized");
    if (!(sigma > 0.0))
        throw argument_error("gaussian_cross_gram: sigma must be positive");
    if (a.dim() != b.dim())
        throw argument_error("gaussian_cross_gram: feature dims differ");
    const double inv_s2 = 1.0 / (sigma * sigma);
    Matrix g = a.rows * b.rows.transpose();
    return ((g.array() - 1.0).min(0.0) * inv_s2).exp();
}

// A computed kernel and its target over the same sample index set.
struct KernelPair {
    Matrix K;
    Matrix T;
    double sigma = 1.0;
    Index n = 0;
};

inline KernelPair make_kernel_pair(const FeatureMatrix& x, const std::vector<int>& labels,
                                   double sigma) {
    if (static_cast<Index>(labels.size()) != x.n())
        throw argument_error("make_kernel_pair: labels/sample count mismatch");
    return KernelPair{gaussian_gram(x, sigma), target_kernel(labels), sigma, x.n()};
}

// (1/n^2)*||K - T||_F^2 + lambda*||W||_F^2, the bias row included in W.
inline double alignment_cost(const Matrix& k, const Matrix& t, const Matrix& w, double lambda) {
    if (k.rows() != t.rows() || k.cols() != t.cols())
        throw argument_error("alignment_cost: K and T shapes differ");
    const double n = static_cast<double>(k.rows());
    return (k - t).squaredNorm() / (n * n) + lambda * w.squaredNorm();
}

}  // namespace kta
