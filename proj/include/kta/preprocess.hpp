#pragma once

#include "kta/errors.hpp"
#include "kta/types.hpp"

namespace kta {

// Sample matrix (rows are samples) plus a flag recording whether per-row
// normalization has been applied.
struct FeatureMatrix {
    Matrix rows;
    bool normalized = false;

    Index n() const { return rows.rows(); }
    Index dim() const { return rows.cols(); }
};

// Rows whose centered norm falls below this are mapped to exact zero rows
// instead of dividing by a vanishing norm.
inline constexpr double kDegenerateRowNorm = 1e-12;

// Centers each row to zero mean, then scales it to unit Euclidean norm.
// Constant rows become zero rows.
inline FeatureMatrix normalize_rows(const FeatureMatrix& m) {
    if (m.rows.cols() == 0)
        throw argument_error("normalize_rows: matrix has no columns");
    FeatureMatrix out{m.rows, true};
    for (Index i = 0; i < out.rows.rows(); ++i) {
        auto row = out.rows.row(i);
        row.array() -= row.mean();
        const double norm = row.norm();
        if (norm < kDegenerateRowNorm)
            row.setZero();
        else
            row /= norm;
    }
    return out;
}

inline FeatureMatrix normalize_rows(const Matrix& m) {
    return normalize_rows(FeatureMatrix{m, false});
}

// Appends a ones column for the bias weight. Not idempotent, and the result
// is no longer row-normalized.
inline FeatureMatrix append_bias(const FeatureMatrix& m) {
    FeatureMatrix out;
    out.rows.resize(m.rows.rows(), m.rows.cols() + 1);
    out.rows.leftCols(m.rows.cols()) = m.rows;
    out.rows.col(m.rows.cols()).setOnes();
    out.normalized = false;
    return out;
}

}  // namespace kta
