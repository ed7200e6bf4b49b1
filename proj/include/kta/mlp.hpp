#pragma once

#include "kta/dataset.hpp"
#include "kta/errors.hpp"
#include "kta/kpca.hpp"
#include "kta/layer_trainer.hpp"
#include "kta/preprocess.hpp"
#include "kta/types.hpp"

#include <algorithm>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

namespace kta {

inline constexpr Index kHeadWidth = 100;

// Fully connected tanh network with a softmax output. One weight matrix per
// layer, bias weights in the last row.
struct MlpModel {
    std::vector<Index> layer_dims;   // input, hidden..., classes
    std::vector<Matrix> weights;     // weights[l]: (layer_dims[l]+1) x layer_dims[l+1]
};

struct FitReport {
    double final_train_loss = 0.0;
    double train_accuracy = 0.0;
    double test_accuracy = 0.0;
    int epochs_run = 0;
    std::vector<double> loss_trace;
};

namespace detail {

inline Matrix mlp_logits(const std::vector<Matrix>& weights, const Matrix& input) {
    Matrix h = input;
    for (std::size_t l = 0; l < weights.size(); ++l) {
        Matrix a(h.rows(), h.cols() + 1);
        a.leftCols(h.cols()) = h;
        a.col(h.cols()).setOnes();
        h = a * weights[l];
        if (l + 1 < weights.size())
            h = h.array().tanh();
    }
    return h;
}

struct MlpCostGrad {
    double cost = 0.0;
    std::vector<Matrix> grads;
};

// Cross-entropy of the softmax output plus lambda * sum of squared weights,
// with exact gradients for every layer.
inline MlpCostGrad mlp_cost_grad(const std::vector<Matrix>& weights, const Matrix& input,
                                 const std::vector<int>& labels, int classes, double lambda) {
    const Index n = input.rows();
    const std::size_t depth = weights.size();

    std::vector<Matrix> acts(depth + 1);   // post-activation per layer, input first
    acts[0] = input;
    for (std::size_t l = 0; l < depth; ++l) {
        Matrix a(acts[l].rows(), acts[l].cols() + 1);
        a.leftCols(acts[l].cols()) = acts[l];
        a.col(acts[l].cols()).setOnes();
        acts[l + 1] = a * weights[l];
        if (l + 1 < depth)
            acts[l + 1] = acts[l + 1].array().tanh();
    }
    const Matrix& logits = acts[depth];
    if (!logits.allFinite())
        throw numeric_error("non-finite network output");

    double reg = 0.0;
    for (const auto& w : weights)
        reg += w.squaredNorm();

    MlpCostGrad out;
    out.cost = cross_entropy(logits, labels) + lambda * reg;

    Matrix onehot = Matrix::Zero(n, classes);
    for (Index i = 0; i < n; ++i)
        onehot(i, labels[static_cast<std::size_t>(i)]) = 1.0;

    Matrix delta = (softmax_rows(logits) - onehot) / static_cast<double>(n);
    out.grads.resize(depth);
    for (std::size_t l = depth; l-- > 0;) {
        Matrix a(acts[l].rows(), acts[l].cols() + 1);
        a.leftCols(acts[l].cols()) = acts[l];
        a.col(acts[l].cols()).setOnes();
        out.grads[l] = a.transpose() * delta + 2.0 * lambda * weights[l];
        if (l > 0) {
            const Matrix back = delta * weights[l].transpose();
            delta = back.leftCols(acts[l].cols())
                        .cwiseProduct((1.0 - acts[l].array().square()).matrix());
        }
    }
    return out;
}

// Shared full-batch training loop: seeded init, plain gradient descent,
// windowed relative-decrease stopping. Same rule as the layer trainer.
inline std::pair<std::vector<Matrix>, TrainTrace> mlp_train(const std::vector<Index>& dims,
                                                            const Matrix& input,
                                                            const std::vector<int>& labels,
                                                            const TrainConfig& cfg) {
    std::vector<Matrix> weights(dims.size() - 1);
    for (std::size_t l = 0; l + 1 < dims.size(); ++l)
        weights[l] = gaussian_init(dims[l] + 1, dims[l + 1], cfg.init_scale,
                                   cfg.seed + static_cast<std::uint64_t>(l));

    const int classes = static_cast<int>(dims.back());
    TrainTrace trace;
    for (int iter = 0;; ++iter) {
        MlpCostGrad cg;
        try {
            cg = mlp_cost_grad(weights, input, labels, classes, cfg.lambda);
        } catch (const numeric_error& e) {
            throw numeric_error(std::string(e.what()) + " (iteration " + std::to_string(iter) + ")",
                                trace.costs);
        }
        if (!std::isfinite(cg.cost))
            throw numeric_error("non-finite training loss (iteration " + std::to_string(iter) + ")",
                                trace.costs);
        trace.costs.push_back(cg.cost);
        if (window_converged(trace.costs, cfg.tol_window, cfg.tol)) {
            trace.converged = true;
            break;
        }
        if (iter >= cfg.max_iters)
            break;
        for (std::size_t l = 0; l < weights.size(); ++l)
            weights[l] -= cfg.learning_rate * cg.grads[l];
    }
    trace.iters_run = static_cast<int>(trace.costs.size()) - 1;
    return {std::move(weights), std::move(trace)};
}

inline int class_count(const std::vector<int>& a, const std::vector<int>& b) {
    int classes = 1;
    for (int l : a)
        classes = std::max(classes, l + 1);
    for (int l : b)
        classes = std::max(classes, l + 1);
    return classes;
}

}  // namespace detail

// Accuracy of argmax predictions (ties broken toward the lowest class
// index). An empty input counts as vacuously correct.
inline double evaluate(const MlpModel& model, const FeatureMatrix& features,
                       const std::vector<int>& labels) {
    if (features.dim() != model.layer_dims.front())
        throw argument_error("evaluate: feature dim " + std::to_string(features.dim()) +
                             " != model input dim " + std::to_string(model.layer_dims.front()));
    if (static_cast<Index>(labels.size()) != features.n())
        throw argument_error("evaluate: labels/sample count mismatch");
    if (features.n() == 0) {
        std::cerr << "evaluate: empty input, accuracy defined as 1.0\n";
        return 1.0;
    }
    const Matrix logits = detail::mlp_logits(model.weights, features.rows);
    Index correct = 0;
    for (Index i = 0; i < logits.rows(); ++i)
        if (detail::argmax_row(logits, i) == labels[static_cast<std::size_t>(i)])
            ++correct;
    return static_cast<double>(correct) / static_cast<double>(features.n());
}

// Trains the frozen-feature classifier head: [d -> 100 tanh -> c softmax]
// by full-batch gradient descent on cross-entropy + lambda*||weights||^2.
// The input features are never modified.
inline std::pair<MlpModel, FitReport> train_head(const FeatureMatrix& features,
                                                 const std::vector<int>& labels_train,
                                                 const FeatureMatrix& features_test,
                                                 const std::vector<int>& labels_test,
                                                 const TrainConfig& cfg) {
    if (static_cast<Index>(labels_train.size()) != features.n())
        throw argument_error("train_head: labels/sample count mismatch");
    if (features_test.dim() != features.dim())
        throw argument_error("train_head: train/test feature dims differ");

    MlpModel model;
    model.layer_dims = {features.dim(), kHeadWidth,
                        static_cast<Index>(detail::class_count(labels_train, labels_test))};
    auto [weights, trace] = detail::mlp_train(model.layer_dims, features.rows, labels_train, cfg);
    model.weights = std::move(weights);

    FitReport report;
    report.final_train_loss = trace.costs.back();
    report.epochs_run = trace.iters_run;
    report.loss_trace = std::move(trace.costs);
    report.train_accuracy = evaluate(model, features, labels_train);
    report.test_accuracy = evaluate(model, features_test, labels_test);
    return {std::move(model), std::move(report)};
}

// End-to-end backprop baseline with the same architecture as a trained
// stack: [d -> hidden_dims... -> 100 -> c], tanh hiddens, softmax output,
// cross-entropy + L2, row-normalized raw input.
inline std::pair<MlpModel, FitReport> train_baseline_dnn(const LabeledDataset& ds_train,
                                                         const LabeledDataset& ds_test,
                                                         const std::vector<Index>& hidden_dims,
                                                         const TrainConfig& cfg) {
    const FeatureMatrix train_in = normalize_rows(ds_train.samples);
    const FeatureMatrix test_in = normalize_rows(ds_test.samples);

    MlpModel model;
    model.layer_dims.push_back(ds_train.dim());
    for (Index h : hidden_dims) {
        if (h < 1)
            throw argument_error("train_baseline_dnn: hidden width must be >= 1");
        model.layer_dims.push_back(h);
    }
    model.layer_dims.push_back(kHeadWidth);
    const int classes = std::max({ds_train.classes, ds_test.classes,
                                  detail::class_count(ds_train.labels, ds_test.labels)});
    model.layer_dims.push_back(static_cast<Index>(classes));

    auto [weights, trace] = detail::mlp_train(model.layer_dims, train_in.rows, ds_train.labels, cfg);
    model.weights = std::move(weights);

    FitReport report;
    report.final_train_loss = trace.costs.back();
    report.epochs_run = trace.iters_run;
    report.loss_trace = std::move(trace.costs);
    report.train_accuracy = evaluate(model, train_in, ds_train.labels);
    report.test_accuracy = evaluate(model, test_in, ds_test.labels);
    return {std::move(model), std::move(report)};
}

}  // namespace kta
