#pragma once

#include "kta/errors.hpp"
#include "kta/kernel.hpp"
#include "kta/preprocess.hpp"
#include "kta/types.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace kta {

// Full symmetric eigendecomposition: unit-length eigenvector columns,
// eigenvalues sorted by decreasing value.
struct EigenBasis {
    Matrix U;        // n x n
    Vector lambda;   // length n, non-increasing
};

inline EigenBasis eigendecompose(const Matrix& k) {
    if (k.rows() == 0 || k.rows() != k.cols())
        throw argument_error("eigendecompose: matrix must be square and nonempty");
    const double asym = (k - k.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-10)
        throw argument_error("eigendecompose: input asymmetric by " + std::to_string(asym));

    Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (k + k.transpose()));
    if (solver.info() != Eigen::Success)
        throw numeric_error("eigendecompose: solver did not converge");

    const Index n = k.rows();
    EigenBasis basis;
    basis.U.resize(n, n);
    basis.lambda.resize(n);
    for (Index i = 0; i < n; ++i) {   // solver returns ascending order
        basis.lambda(i) = solver.eigenvalues()(n - 1 - i);
        basis.U.col(i) = solver.eigenvectors().col(n - 1 - i);
    }
    return basis;
}

// Fraction of spectral mass carried by the leading d eigenvalues.
inline double cumulative_share(const Vector& lambda, Index d) {
    if (d < 1 || d > lambda.size())
        throw argument_error("cumulative_share: d out of range");
    const double total = lambda.sum();
    if (total <= 0.0)
        throw argument_error("cumulative_share: non-positive spectral mass");
    return lambda.head(d).sum() / total;
}

// Multinomial logistic coefficients on a low-dimensional representation.
struct SoftmaxModel {
    Matrix beta;   // d x c
};

namespace detail {

inline int argmax_row(const Matrix& m, Index row) {
    int best = 0;
    double best_v = m(row, 0);
    for (Index j = 1; j < m.cols(); ++j) {
        if (m(row, j) > best_v) {   // ties keep the lowest index
            best_v = m(row, j);
            best = static_cast<int>(j);
        }
    }
    return best;
}

inline Matrix softmax_rows(const Matrix& logits) {
    Matrix p = logits;
    for (Index i = 0; i < p.rows(); ++i) {
        auto row = p.row(i);
        row.array() -= row.maxCoeff();
        row = row.array().exp();
        row /= row.sum();
    }
    return p;
}

// Mean negative log-likelihood computed from logits via log-sum-exp.
inline double cross_entropy(const Matrix& logits, const std::vector<int>& labels) {
    double total = 0.0;
    for (Index i = 0; i < logits.rows(); ++i) {
        const double mx = logits.row(i).maxCoeff();
        const double lse = mx + std::log((logits.row(i).array() - mx).exp().sum());
        total += lse - logits(i, labels[static_cast<std::size_t>(i)]);
    }
    return total / static_cast<double>(logits.rows());
}

inline double misclassified_fraction(const Matrix& logits, const std::vector<int>& labels) {
    Index wrong = 0;
    for (Index i = 0; i < logits.rows(); ++i)
        if (argmax_row(logits, i) != labels[static_cast<std::size_t>(i)])
            ++wrong;
    return static_cast<double>(wrong) / static_cast<double>(logits.rows());
}

}  // namespace detail

// Fits beta (d x c) minimizing the mean cross-entropy of softmax(X*beta)
// plus reg*||beta||_F^2, by gradient descent from beta = 0 with a
// backtracking step, until the gradient norm falls below grad_tol or the
// iteration cap.
inline SoftmaxModel fit_softmax(const Matrix& u_d, const std::vector<int>& labels, double reg,
                                double grad_tol = 1e-6, int max_iters = 5000) {
    const Index n = u_d.rows();
    const Index d = u_d.cols();
    if (d < 1)
        throw argument_error("fit_softmax: need at least one feature column");
    if (n < 1)
        throw argument_error("fit_softmax: empty sample set");
    if (static_cast<Index>(labels.size()) != n)
        throw argument_error("fit_softmax: labels/sample count mismatch");
    int classes = 0;
    for (int l : labels)
        classes = std::max(classes, l + 1);
    bool multi = false;
    for (int l : labels)
        if (l != labels.front()) { multi = true; break; }
    if (!multi)
        throw argument_error("fit_softmax: degenerate single-class problem");

    Matrix onehot = Matrix::Zero(n, classes);
    for (Index i = 0; i < n; ++i)
        onehot(i, labels[static_cast<std::size_t>(i)]) = 1.0;

    Matrix beta = Matrix::Zero(d, classes);
    const double inv_n = 1.0 / static_cast<double>(n);
    auto cost_at = [&](const Matrix& b) {
        return detail::cross_entropy(u_d * b, labels) + reg * b.squaredNorm();
    };

    double step = 1.0;
    double cost = cost_at(beta);
    for (int iter = 0; iter < max_iters; ++iter) {
        const Matrix p = detail::softmax_rows(u_d * beta);
        const Matrix grad = u_d.transpose() * (p - onehot) * inv_n + 2.0 * reg * beta;
        if (grad.norm() < grad_tol)
            break;
        Matrix next = beta - step * grad;
        double next_cost = cost_at(next);
        while (next_cost > cost && step > 1e-12) {
            step *= 0.5;
            next = beta - step * grad;
            next_cost = cost_at(next);
        }
        beta = std::move(next);
        cost = next_cost;
        step = std::min(step * 1.2, 1e4);
    }
    return SoftmaxModel{std::move(beta)};
}

inline constexpr double kEigenvalueFloor = 1e-10;

// Out-of-sample coordinates plus the reduced-d metadata.
struct Projection {
    Matrix coords;          // m x effective_d
    Index effective_d = 0;
    bool reduced = false;   // true when trailing near-zero eigenvalues were dropped
};

// Nystrom extension: K_cross * U_d * diag(1/lambda_1..1/lambda_d). A
// training point passed as a test point reproduces its own row of U_d.
// Components whose eigenvalue is at or below the floor are dropped.
inline Projection project_test(const EigenBasis& basis, const Matrix& k_cross, Index d) {
    const Index n = basis.U.rows();
    if (d < 1 || d > n)
        throw argument_error("project_test: d=" + std::to_string(d) + " outside [1, " +
                             std::to_string(n) + "]");
    if (k_cross.cols() != n)
        throw argument_error("project_test: cross-kernel column count " +
                             std::to_string(k_cross.cols()) + " != " + std::to_string(n));
    Index usable = 0;
    while (usable < d && basis.lambda(usable) > kEigenvalueFloor)
        ++usable;

    Projection proj;
    proj.effective_d = usable;
    proj.reduced = usable < d;
    proj.coords = k_cross * basis.U.leftCols(usable) *
                  basis.lambda.head(usable).cwiseInverse().asDiagonal();
    return proj;
}

// Classification error of a softmax fit on the leading d kernel components,
// for each requested d, on training points (directly) and test points (via
// the Nystrom extension).
struct ErrorCurve {
    std::vector<Index> ds;           // strictly increasing
    std::vector<double> train_err;   // in [0,1]
    std::vector<double> test_err;    // in [0,1]
    int layer_index = 0;
};

inline ErrorCurve error_curve(const FeatureMatrix& train_repr, const FeatureMatrix& test_repr,
                              const std::vector<int>& labels_train,
                              const std::vector<int>& labels_test,
                              const std::vector<Index>& ds, double sigma) {
    if (!train_repr.normalized || !test_repr.normalized)
        throw argument_error("error_curve: representations must be row-normalized");
    if (static_cast<Index>(labels_train.size()) != train_repr.n() ||
        static_cast<Index>(labels_test.size()) != test_repr.n())
        throw argument_error("error_curve: labels/sample count mismatch");
    if (ds.empty())
        throw argument_error("error_curve: empty d grid");
    const Index n = train_repr.n();
    for (std::size_t i = 0; i < ds.size(); ++i) {
        if (ds[i] < 1 || ds[i] > n)
            throw argument_error("error_curve: d=" + std::to_string(ds[i]) + " outside [1, " +
                                 std::to_string(n) + "]");
        if (i > 0 && ds[i] <= ds[i - 1])
            throw argument_error("error_curve: d grid must be strictly increasing");
    }

    const Matrix k_train = gaussian_gram(train_repr, sigma);
    const EigenBasis basis = eigendecompose(k_train);
    const Matrix k_cross = gaussian_cross_gram(test_repr, train_repr, sigma);

    ErrorCurve curve;
    curve.ds = ds;
    for (Index d : ds) {
        const Projection proj = project_test(basis, k_cross, d);
        const Index d_eff = proj.effective_d;
        const Matrix u_d = basis.U.leftCols(d_eff);
        const SoftmaxModel model = fit_softmax(u_d, labels_train, 1e-6);
        curve.train_err.push_back(detail::misclassified_fraction(u_d * model.beta, labels_train));
        curve.test_err.push_back(
            detail::misclassified_fraction(proj.coords * model.beta, labels_test));
    }
    return curve;
}

}  // namespace kta
