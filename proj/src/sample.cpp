#include "hdcov/sample.hpp"

#include "hdcov/errors.hpp"
#include "hdcov/numerics.hpp"

#include <cmath>
#include <string>

namespace hdcov {

SampleMatrix::SampleMatrix(RowMatrix values) : values_(std::move(values)) {
    if (values_.rows() < 1 || values_.cols() < 1)
        throw DimensionError("sample must have at least one observation and one coordinate");
    if (!values_.allFinite()) throw std::invalid_argument("sample contains non-finite values");
}

SampleMatrix::SampleMatrix(Index n, Index p, std::span<const double> row_major)
    : SampleMatrix([&] {
          if (n < 0 || p < 0 || static_cast<std::size_t>(n * p) != row_major.size())
              throw DimensionError("buffer size does not match n*p");
          return RowMatrix(Eigen::Map<const RowMatrix>(row_major.data(), n, p));
      }()) {}

SampleMatrix SampleMatrix::columns(Index first, Index count) const {
    if (first < 0 || count < 1 || first + count > p())
        throw DimensionError("column range out of bounds");
    return SampleMatrix(RowMatrix(values_.middleCols(first, count)));
}

BlockPartition::BlockPartition(Index p1, Index p2) : p1_(p1), p2_(p2) {
    if (p1 < 1 || p2 < 1) throw DimensionError("both blocks of a partition need at least one coordinate");
}

BlockPartition BlockPartition::halves(Index p) {
    if (p < 2) throw DimensionError("cannot partition fewer than two coordinates");
    return BlockPartition(p / 2, p - p / 2);
}

GramSet::GramSet(GramKind kind, Matrix entries) : kind_(kind), entries_(std::move(entries)) {
    row_sums_ = entries_.rowwise().sum();
    col_sums_ = entries_.colwise().sum().transpose();
    if (kind_ == GramKind::Within) diagonal_ = entries_.diagonal();
    total_ = pairwise_sum(std::span<const double>(row_sums_.data(), row_sums_.size()));
    const Matrix squares = entries_.cwiseAbs2();
    sum_sq_ = pairwise_sum(std::span<const double>(squares.data(), squares.size()));
}

GramSet compute_gram(const SampleMatrix& a) {
    const Index n = a.n();
    Matrix g(n, n);
    g.setZero();
    g.selfadjointView<Eigen::Upper>().rankUpdate(a.values());
    g.triangularView<Eigen::StrictlyLower>() = g.transpose();
    return GramSet(GramKind::Within, std::move(g));
}

GramSet compute_gram(const SampleMatrix& a, const SampleMatrix& b) {
    if (a.p() != b.p())
        throw DimensionError("Gram of samples with different dimensions (" + std::to_string(a.p()) +
                             " vs " + std::to_string(b.p()) + ")");
    Matrix h = a.values() * b.values().transpose();
    return GramSet(GramKind::Cross, std::move(h));
}

SampleMatrix center_columns(const SampleMatrix& x) {
    const Eigen::RowVectorXd mean = x.values().colwise().mean();
    RowMatrix centered = x.values().rowwise() - mean;
    return SampleMatrix(std::move(centered));
}

std::pair<SampleMatrix, SampleMatrix> split_blocks(const SampleMatrix& x, const BlockPartition& part) {
    if (part.p() != x.p())
        throw DimensionError("partition " + std::to_string(part.p1()) + "+" + std::to_string(part.p2()) +
                             " does not match p = " + std::to_string(x.p()));
    return {x.columns(0, part.p1()), x.columns(part.p1(), part.p2())};
}

}  // namespace hdcov
