#pragma once

#include "hdcov/estimators.hpp"
#include "hdcov/sample.hpp"

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hdcov {

enum class TableFormat { Csv, Tsv };

/// Guesses the format from the file extension (.tsv/.txt -> Tsv, else Csv).
TableFormat format_from_path(const std::string& path);

/// Expression values for genes x samples, each sample assigned to one of two groups.
struct ExpressionDataset {
    std::vector<std::string> gene_ids;
    std::vector<std::string> sample_ids;
    std::vector<int> group;                  ///< 0 or 1 per sample
    std::array<std::string, 2> group_names;  ///< label values, sorted
    Matrix values;                           ///< genes x samples

    Index group_size(int g) const;
    /// Observations (samples of group g) x the listed genes, in the given order.
    SampleMatrix group_sample(int g, const std::vector<Index>& genes) const;
};

/// Where sample labels come from: a two-column (sample, label) file, or a
/// row of the expression matrix whose gene id is `row_name`.
struct LabelSource {
    std::optional<std::string> file;
    std::optional<std::string> row_name;

    /// "row:<name>" selects a matrix row, anything else is a file path.
    static LabelSource parse(const std::string& spec);
};

/// Reads a matrix whose header row is <id column name>, sample ids...; each
/// further line is gene id, values. Throws ParseError naming the file and
/// line for duplicate genes, non-numeric cells, or a group with fewer than 4
/// samples.
ExpressionDataset load_expression_matrix(const std::string& path, TableFormat format,
                                         const LabelSource& labels);

struct GeneSet {
    std::string name;
    std::string description;
    std::vector<std::string> genes;
};

struct GeneSetCollection {
    std::vector<GeneSet> sets;
    std::vector<std::string> warnings;
};

/// GMT: name TAB description TAB gene... per line. Blank lines are skipped;
/// repeated genes within a set are dropped with a warning.
GeneSetCollection load_gmt(const std::string& path);
GeneSetCollection parse_gmt(std::istream& in, const std::string& source = "<stream>");

/// Benjamini-Hochberg step-up at level q. Decisions are in input order.
std::vector<bool> bh_fdr(const std::vector<double>& p_values, double q);

enum class BlockClass { DiagonalOnly, OffDiagonalOnly, Both, Neither };

std::string to_string(BlockClass c);

struct FollowUp {
    Index p1 = 0;
    double diag1_p = 0.0;
    double diag2_p = 0.0;
    double offdiag_p = 0.0;
    BlockClass classification = BlockClass::Neither;
};

struct GeneSetResult {
    std::string name;
    std::size_t genes_requested = 0;
    std::size_t genes_used = 0;
    bool tested = false;
    std::string skip_reason;
    double p_value = 1.0;
    double l_n = 0.0;
    bool fdr_significant = false;
    std::optional<FollowUp> followup;
    std::string followup_skip_reason;
};

struct PipelineOptions {
    double fdr_q = 0.05;
    double followup_alpha = 0.05;
    /// Fixed leading block size for follow-ups; default floor(p_g / 2).
    std::optional<Index> p1;
    EstimatorMode mode = EstimatorMode::ExactUnbiased;
    std::size_t workers = 1;
};

struct GeneSetReport {
    PipelineOptions options;
    Index n1 = 0;
    Index n2 = 0;
    std::array<std::string, 2> group_names;
    std::vector<GeneSetResult> sets;  ///< sorted by set name

    std::size_t count(BlockClass c) const;
    std::size_t significant() const;
};

GeneSetReport run_pipeline(const ExpressionDataset& data, const GeneSetCollection& sets,
                           const PipelineOptions& options = {});

void write_report_json(std::ostream& out, const GeneSetReport& report);
/// Columns: set,p_value,fdr_significant,diag1_p,diag2_p,offdiag_p,class.
void write_report_csv(std::ostream& out, const GeneSetReport& report);

}  // namespace hdcov
