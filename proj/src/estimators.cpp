#include "hdcov/estimators.hpp"

#include "hdcov/errors.hpp"
#include "hdcov/numerics.hpp"

#include <string>
#include <vector>

namespace hdcov {
namespace {

double sum_of(const std::vector<double>& v) { return pairwise_sum(v); }

void require_within(Index n, EstimatorMode mode) {
    const Index min_n = mode == EstimatorMode::ExactUnbiased ? 4 : 2;
    if (n < min_n)
        throw SampleSizeError("within-sample estimator needs n >= " + std::to_string(min_n) +
                              ", got " + std::to_string(n));
}

void require_cross(Index n1, Index n2) {
    if (n1 < 2 || n2 < 2)
        throw SampleSizeError("cross-sample estimator needs n1, n2 >= 2, got " + std::to_string(n1) +
                              ", " + std::to_string(n2));
}

void require_same_p(const SampleMatrix& x1, const SampleMatrix& x2) {
    if (x1.p() != x2.p()) throw DimensionError("samples have different dimensions");
}

SampleMatrix prepared(const SampleMatrix& x, EstimatorMode mode) {
    return mode == EstimatorMode::CenteredFirstTerm ? center_columns(x) : x;
}

SampleMatrix block_of(const SampleMatrix& x, const BlockPartition& part, Block block) {
    auto [first, second] = split_blocks(x, part);
    return block == Block::First ? std::move(first) : std::move(second);
}

}  // namespace

// Distinct-index sums for kernels g1(i,j) * g2(., .) over one sample.
//   S1 = sum_{i != j} g1_ij g2_ij
//   S2 = sum over distinct (i,j,k) of g1_ij g2_jk
//      = sum_j [ s1_j s2_j - (m_j - g1_jj g2_jj) ]
//        with s_j the off-diagonal row sum and m_j = sum_i g1_ij g2_ij
//   S3 = sum over distinct (i,j,k,l) of g1_ij g2_kl = B1 B2 - 4 S2 - 2 S1
//        with B the off-diagonal total; the 4 and 2 count index overlaps.
double within_estimate(const GramSet& g1, const GramSet& g2, EstimatorMode mode) {
    if (g1.kind() != GramKind::Within || g2.kind() != GramKind::Within)
        throw std::invalid_argument("within_estimate needs within-sample Grams");
    if (g1.rows() != g2.rows()) throw DimensionError("Grams cover different observation counts");
    const Index n = g1.rows();
    require_within(n, mode);
    const double nd = static_cast<double>(n);

    const Matrix& a = g1.entries();
    const Matrix& b = g2.entries();
    std::vector<double> hadamard_rows(n), diag_products(n), middle(n);
    for (Index j = 0; j < n; ++j) {
        double m = 0.0;
        for (Index i = 0; i < n; ++i) m += a(i, j) * b(i, j);
        hadamard_rows[j] = m;
        diag_products[j] = a(j, j) * b(j, j);
    }
    const double s1 = sum_of(hadamard_rows) - sum_of(diag_products);
    if (mode == EstimatorMode::CenteredFirstTerm) return s1 / (nd * (nd - 1.0));

    for (Index j = 0; j < n; ++j) {
        const double r1 = g1.row_sums()(j) - a(j, j);
        const double r2 = g2.row_sums()(j) - b(j, j);
        middle[j] = r1 * r2 - (hadamard_rows[j] - diag_products[j]);
    }
    const double s2 = sum_of(middle);
    const double off1 = g1.total() - g1.diagonal().sum();
    const double off2 = g2.total() - g2.diagonal().sum();
    const double s3 = off1 * off2 - 4.0 * s2 - 2.0 * s1;

    const double d2 = nd * (nd - 1.0);
    const double d3 = d2 * (nd - 2.0);
    const double d4 = d3 * (nd - 3.0);
    return s1 / d2 - 2.0 * s2 / d3 + s3 / d4;
}

// Sums over a cross Gram pair of an (n1 x n2) sample pair:
//   T1 = sum_{i,j} h1_ij h2_ij
//   T2 = sum_j sum_{i != k} h1_ij h2_kj = sum_j c1_j c2_j - T1
//   T3 = sum_i sum_{j != l} h1_ij h2_il = sum_i r1_i r2_i - T1
//   T4 = sum_{i != k, j != l} h1_ij h2_kl = tot1 tot2 - sum r1 r2 - sum c1 c2 + T1
double cross_estimate(const GramSet& h1, const GramSet& h2, EstimatorMode mode) {
    if (h1.kind() != GramKind::Cross || h2.kind() != GramKind::Cross)
        throw std::invalid_argument("cross_estimate needs cross-sample Grams");
    if (h1.rows() != h2.rows() || h1.cols() != h2.cols())
        throw DimensionError("cross Grams have different shapes");
    const Index n1 = h1.rows();
    const Index n2 = h1.cols();
    require_cross(n1, n2);
    const double a = static_cast<double>(n1);
    const double b = static_cast<double>(n2);

    const Matrix prod = h1.entries().cwiseProduct(h2.entries());
    const double t1 = pairwise_sum(std::span<const double>(prod.data(), prod.size()));
    if (mode == EstimatorMode::CenteredFirstTerm) return t1 / (a * b);

    std::vector<double> rr(n1), cc(n2);
    for (Index i = 0; i < n1; ++i) rr[i] = h1.row_sums()(i) * h2.row_sums()(i);
    for (Index j = 0; j < n2; ++j) cc[j] = h1.col_sums()(j) * h2.col_sums()(j);
    const double sum_rr = sum_of(rr);
    const double sum_cc = sum_of(cc);

    const double t2 = sum_cc - t1;
    const double t3 = sum_rr - t1;
    const double t4 = h1.total() * h2.total() - sum_rr - sum_cc + t1;

    const double base = a * b;
    return t1 / base - t2 / (base * (a - 1.0)) - t3 / (base * (b - 1.0)) +
           t4 / (base * (a - 1.0) * (b - 1.0));
}

double a_stat(const SampleMatrix& x, EstimatorMode mode) {
    require_within(x.n(), mode);
    const GramSet g = compute_gram(prepared(x, mode));
    return within_estimate(g, g, mode);
}

double c_stat(const SampleMatrix& x1, const SampleMatrix& x2, EstimatorMode mode) {
    require_same_p(x1, x2);
    require_cross(x1.n(), x2.n());
    const GramSet h = compute_gram(prepared(x1, mode), prepared(x2, mode));
    return cross_estimate(h, h, mode);
}

double u_stat(const SampleMatrix& x, const BlockPartition& part, EstimatorMode mode) {
    require_within(x.n(), mode);
    auto [first, second] = split_blocks(prepared(x, mode), part);
    return within_estimate(compute_gram(first), compute_gram(second), mode);
}

double w_stat(const SampleMatrix& x1, const SampleMatrix& x2, const BlockPartition& part,
              EstimatorMode mode) {
    require_same_p(x1, x2);
    require_cross(x1.n(), x2.n());
    auto [a1, a2] = split_blocks(prepared(x1, mode), part);
    auto [b1, b2] = split_blocks(prepared(x2, mode), part);
    return cross_estimate(compute_gram(a1, b1), compute_gram(a2, b2), mode);
}

double a_block_stat(const SampleMatrix& x, const BlockPartition& part, Block block, EstimatorMode mode) {
    return a_stat(block_of(x, part, block), mode);
}

double c_block_stat(const SampleMatrix& x1, const SampleMatrix& x2, const BlockPartition& part,
                    Block block, EstimatorMode mode) {
    require_same_p(x1, x2);
    return c_stat(block_of(x1, part, block), block_of(x2, part, block), mode);
}

}  // namespace hdcov
