#pragma once

#include <Eigen/Dense>

#include <span>
#include <utility>

namespace hdcov {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// One sample: n observations (rows) of a p-dimensional vector (columns).
/// Immutable once built; all entries are finite.
class SampleMatrix {
public:
    explicit SampleMatrix(RowMatrix values);
    SampleMatrix(Index n, Index p, std::span<const double> row_major);

    Index n() const { return values_.rows(); }
    Index p() const { return values_.cols(); }
    double operator()(Index i, Index k) const { return values_(i, k); }
    const RowMatrix& values() const { return values_; }

    /// Columns [first, first + count) as a new sample.
    SampleMatrix columns(Index first, Index count) const;

private:
    RowMatrix values_;
};

/// Split of the coordinates into a leading block of p1 and a trailing block of p2.
class BlockPartition {
public:
    BlockPartition(Index p1, Index p2);

    /// p1 = floor(p / 2), p2 = p - p1. Requires p >= 2.
    static BlockPartition halves(Index p);

    Index p1() const { return p1_; }
    Index p2() const { return p2_; }
    Index p() const { return p1_ + p2_; }

private:
    Index p1_;
    Index p2_;
};

enum class Block { First = 1, Second = 2 };

enum class GramKind { Within, Cross };

/// Inner products between the observations of one or two samples, with the
/// aggregates every estimator needs cached at construction.
class GramSet {
public:
    GramKind kind() const { return kind_; }
    Index rows() const { return entries_.rows(); }
    Index cols() const { return entries_.cols(); }
    double operator()(Index i, Index j) const { return entries_(i, j); }
    const Matrix& entries() const { return entries_; }

    const Vector& row_sums() const { return row_sums_; }
    const Vector& col_sums() const { return col_sums_; }
    /// Diagonal entries; empty for cross-sample Grams.
    const Vector& diagonal() const { return diagonal_; }
    double total() const { return total_; }
    double sum_sq() const { return sum_sq_; }

private:
    friend GramSet compute_gram(const SampleMatrix&);
    friend GramSet compute_gram(const SampleMatrix&, const SampleMatrix&);

    GramSet(GramKind kind, Matrix entries);

    GramKind kind_;
    Matrix entries_;
    Vector row_sums_;
    Vector col_sums_;
    Vector diagonal_;
    double total_ = 0.0;
    double sum_sq_ = 0.0;
};

/// Within-sample Gram, symmetric by construction.
GramSet compute_gram(const SampleMatrix& a);

/// Cross-sample Gram, entry (i, j) = <a_i, b_j>. Throws DimensionError if p differs.
GramSet compute_gram(const SampleMatrix& a, const SampleMatrix& b);

SampleMatrix center_columns(const SampleMatrix& x);

std::pair<SampleMatrix, SampleMatrix> split_blocks(const SampleMatrix& x, const BlockPartition& part);

}  // namespace hdcov
