#pragma once

#include "hdcov/sample.hpp"

namespace hdcov {

/// How the trace functionals are estimated.
///
/// ExactUnbiased evaluates every distinct-index sum of the U-statistic
/// definitions (requires n >= 4 for within-sample estimators, n >= 2 per
/// sample for cross-sample ones). CenteredFirstTerm centers each sample and
/// keeps only the leading pair sum; it is biased but asymptotically
/// equivalent, and needs n >= 2.
enum class EstimatorMode { ExactUnbiased, CenteredFirstTerm };

// Sample-level estimators. Each one builds the Grams it needs.

/// Estimates tr(Sigma^2).
double a_stat(const SampleMatrix& x, EstimatorMode mode = EstimatorMode::ExactUnbiased);

/// Estimates tr(Sigma_1 Sigma_2).
double c_stat(const SampleMatrix& x1, const SampleMatrix& x2,
              EstimatorMode mode = EstimatorMode::ExactUnbiased);

/// Estimates tr(Sigma_12 Sigma_12') for the off-diagonal block of one sample.
double u_stat(const SampleMatrix& x, const BlockPartition& part,
              EstimatorMode mode = EstimatorMode::ExactUnbiased);

/// Estimates tr(Sigma_{1,12} Sigma_{2,12}').
double w_stat(const SampleMatrix& x1, const SampleMatrix& x2, const BlockPartition& part,
              EstimatorMode mode = EstimatorMode::ExactUnbiased);

/// a_stat on one diagonal block.
double a_block_stat(const SampleMatrix& x, const BlockPartition& part, Block block,
                    EstimatorMode mode = EstimatorMode::ExactUnbiased);

/// c_stat on the same diagonal block of both samples.
double c_block_stat(const SampleMatrix& x1, const SampleMatrix& x2, const BlockPartition& part,
                    Block block, EstimatorMode mode = EstimatorMode::ExactUnbiased);

// Gram-level kernels, O(n^2). For CenteredFirstTerm the Grams must come from
// column-centered data.

/// Within-sample estimator of tr(S1 S2') from the Grams of two column blocks
/// of the same observations (g1 == g2 gives A).
double within_estimate(const GramSet& g1, const GramSet& g2, EstimatorMode mode);

/// Cross-sample estimator from two cross Grams of the same sample pair
/// (h1 == h2 gives C).
double cross_estimate(const GramSet& h1, const GramSet& h2, EstimatorMode mode);

/// Brute-force evaluation of the distinct-index sums, straight from the
/// definitions. O(n^4); refuses max(n1, n2) > 20. Reference for the Gram path.
namespace oracle {

inline constexpr Index kMaxN = 20;

double a_stat(const SampleMatrix& x);
double c_stat(const SampleMatrix& x1, const SampleMatrix& x2);
double u_stat(const SampleMatrix& x, const BlockPartition& part);
double w_stat(const SampleMatrix& x1, const SampleMatrix& x2, const BlockPartition& part);

}  // namespace oracle

}  // namespace hdcov
