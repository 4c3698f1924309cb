#pragma once

#include "hdcov/estimators.hpp"
#include "hdcov/numerics.hpp"
#include "hdcov/sample.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hdcov {

/// Moving-average recipe X_k = Z_k + sum_m coeffs[m-1] Z_{k+m}.
struct MaModel {
    std::vector<double> coeffs;

    std::size_t order() const { return coeffs.size(); }
    static MaModel white_noise() { return {}; }
    /// q coefficients all equal to `value`.
    static MaModel constant(std::size_t q, double value) { return {std::vector<double>(q, value)}; }
};

/// n independent rows, each built from p + q fresh innovations so that every
/// coordinate follows the full recipe.
SampleMatrix simulate_ma(RngStream& rng, Index n, Index p, const MaModel& model,
                         const InnovationSpec& innov);

/// Banded covariance Sigma_st = sum_m c_m c_{m+|s-t|}, c_0 = 1.
Matrix ma_population_cov(const MaModel& model, Index p);

enum class TestKind { WholeMatrix, Block };

struct ScenarioConfig {
    Index p = 0;
    Index n1 = 0;
    Index n2 = 0;
    MaModel model1;
    MaModel model2;
    InnovationSpec innov1 = InnovationSpec::standard_normal();
    InnovationSpec innov2 = InnovationSpec::standard_normal();
    std::size_t replications = 1000;
    double alpha = 0.05;
    std::uint64_t master_seed = 0;
    TestKind test = TestKind::WholeMatrix;
    /// Leading block size for TestKind::Block; defaults to floor(p / 2).
    std::optional<Index> p1;
    EstimatorMode mode = EstimatorMode::ExactUnbiased;
};

/// Stream id for sample `sample_index` (0 or 1) of replication `rep`.
inline std::uint64_t replication_stream(std::uint64_t rep, int sample_index) {
    return 2 * rep + static_cast<std::uint64_t>(sample_index);
}

struct MonteCarloReport {
    std::size_t replications = 0;
    std::size_t rejections = 0;
    double rejection_rate = 0.0;
    double standard_error = 0.0;  ///< sqrt(rate (1 - rate) / replications)
    std::vector<double> statistics;  ///< per-replication standardized statistic, in replication order
    double wall_seconds = 0.0;       ///< not part of the reproducible content
    std::size_t workers = 1;
};

/// Runs the scenario on `workers` threads (0 = hardware concurrency). The
/// report content apart from timing does not depend on the worker count.
/// Throws std::runtime_error naming the replication if a test fails.
MonteCarloReport run_scenario(const ScenarioConfig& config, std::size_t workers = 1);

enum class TableId { T1, T2, T3, T4, T5, T6 };

TableId parse_table_id(const std::string& name);
std::string table_name(TableId id);

struct TableRow {
    std::string table;
    Index n1 = 0;
    Index n2 = 0;
    Index p = 0;
    std::string kind;  ///< "size" or "power" (power cells of T1 are "power@theta=<v>")
    double rate = 0.0;
    double se = 0.0;
    std::size_t reps = 0;
    std::uint64_t seed = 0;
};

/// One scenario per cell of the simulation table, in row-major order of
/// the published layout. Cell c uses master seed `seed + c`.
std::vector<ScenarioConfig> table_scenarios(TableId id, std::size_t reps, std::uint64_t seed,
                                            EstimatorMode mode = EstimatorMode::ExactUnbiased);

std::vector<TableRow> reproduce_table(TableId id, std::size_t reps, std::uint64_t seed,
                                      EstimatorMode mode = EstimatorMode::ExactUnbiased,
                                      std::size_t workers = 1);

/// CSV with header table,n1,n2,p,kind,rate,se,reps,seed.
void write_table_csv(std::ostream& out, const std::vector<TableRow>& rows);

}  // namespace hdcov
