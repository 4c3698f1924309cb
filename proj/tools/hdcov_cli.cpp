// hdcov: two-sample tests for high-dimensional covariance matrices.
//
//   hdcov test-cov   --x1 a.csv --x2 b.csv [--alpha 0.05] [--mode exact|centered] [--format csv|json]
//   hdcov test-block --x1 a.csv --x2 b.csv [--p1 N] ...
//   hdcov simulate   --table T2 --reps 1000 --seed 1 --out t2.csv [--mode exact|centered] [--workers N]
//   hdcov genesets   --matrix expr.tsv --labels labels.tsv --gmt sets.gmt [--fdr 0.05]
//                    [--followup-alpha 0.05] [--out report.json|report.csv|json|csv]

#include "hdcov/block_test.hpp"
#include "hdcov/cov_test.hpp"
#include "hdcov/geneset.hpp"
#include "hdcov/io.hpp"
#include "hdcov/simulation.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>

namespace {

using namespace hdcov;

const std::map<std::string, EstimatorMode> kModes{{"exact", EstimatorMode::ExactUnbiased},
                                                  {"centered", EstimatorMode::CenteredFirstTerm}};

struct TestArgs {
    std::string x1, x2;
    double alpha = 0.05;
    EstimatorMode mode = EstimatorMode::ExactUnbiased;
    std::string format = "csv";
    std::optional<Index> p1;
};

void add_test_options(CLI::App* cmd, TestArgs& args) {
    cmd->add_option("--x1", args.x1, "First sample (rows = observations)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--x2", args.x2, "Second sample")->required()->check(CLI::ExistingFile);
    cmd->add_option("--alpha", args.alpha, "Significance level")->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--mode", args.mode, "Estimator: exact or centered")
        ->transform(CLI::CheckedTransformer(kModes, CLI::ignore_case));
    cmd->add_option("--format", args.format, "Report format")->check(CLI::IsMember({"csv", "json"}));
}

void emit(const std::string& format, const std::vector<std::pair<std::string, double>>& fields, bool reject) {
    if (format == "json") {
        nlohmann::ordered_json j;
        for (const auto& [k, v] : fields) j[k] = v;
        j["reject"] = reject;
        std::cout << j.dump(2) << '\n';
        return;
    }
    for (const auto& [k, v] : fields) std::cout << k << ',';
    std::cout << "reject\n" << std::setprecision(17);
    for (const auto& [k, v] : fields) std::cout << v << ',';
    std::cout << (reject ? "true" : "false") << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-sample tests for high-dimensional covariance matrices"};
    app.require_subcommand(1);

    TestArgs cov_args;
    auto* cov = app.add_subcommand("test-cov", "Test equality of the whole covariance matrices");
    add_test_options(cov, cov_args);

    TestArgs block_args;
    auto* block = app.add_subcommand("test-block", "Test equality of the off-diagonal covariance blocks");
    add_test_options(block, block_args);
    block->add_option("--p1", block_args.p1, "Size of the leading block (default floor(p/2))");

    std::string table = "T2", sim_out;
    std::size_t reps = 1000, sim_workers = 1;
    std::uint64_t seed = 20120101;
    EstimatorMode sim_mode = EstimatorMode::ExactUnbiased;
    auto* sim = app.add_subcommand("simulate", "Reproduce a simulation table (CSV)");
    sim->add_option("--table", table, "T1..T6")->required();
    sim->add_option("--reps", reps, "Replications per cell (>= 100)");
    sim->add_option("--seed", seed, "Master seed; cell c uses seed + c");
    sim->add_option("--out", sim_out, "Output CSV path (default stdout)");
    sim->add_option("--mode", sim_mode, "Estimator: exact or centered")
        ->transform(CLI::CheckedTransformer(kModes, CLI::ignore_case));
    sim->add_option("--workers", sim_workers, "Worker threads (0 = all cores)");

    std::string matrix, labels, gmt, gs_out = "json";
    PipelineOptions gs_opts;
    std::optional<Index> gs_p1;
    auto* gs = app.add_subcommand("genesets", "Screen gene sets for covariance differences");
    gs->add_option("--matrix", matrix, "Expression matrix (genes x samples, CSV or TSV)")
        ->required()
        ->check(CLI::ExistingFile);
    gs->add_option("--labels", labels, "Label file (sample,label) or row:<gene-id-of-label-row>")->required();
    gs->add_option("--gmt", gmt, "Gene sets in GMT format")->required()->check(CLI::ExistingFile);
    gs->add_option("--fdr", gs_opts.fdr_q, "Benjamini-Hochberg level")->check(CLI::Range(0.0, 1.0));
    gs->add_option("--followup-alpha", gs_opts.followup_alpha, "Level of the block follow-up tests")
        ->check(CLI::Range(0.0, 1.0));
    gs->add_option("--p1", gs_p1, "Fixed leading block size for follow-ups");
    gs->add_option("--out", gs_out, "json, csv, or an output path ending in .json/.csv");
    gs->add_option("--mode", gs_opts.mode, "Estimator: exact or centered")
        ->transform(CLI::CheckedTransformer(kModes, CLI::ignore_case));
    gs->add_option("--workers", gs_opts.workers, "Worker threads (0 = all cores)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*cov) {
            const auto x1 = load_sample_matrix(cov_args.x1);
            const auto x2 = load_sample_matrix(cov_args.x2);
            const auto r = two_sample_cov_test(x1, x2, cov_args.alpha, cov_args.mode);
            emit(cov_args.format,
                 {{"t_stat", r.t_stat}, {"sigma0_hat", r.sigma0_hat}, {"l_n", r.l_n}, {"p_value", r.p_value}},
                 r.reject);
        } else if (*block) {
            const auto x1 = load_sample_matrix(block_args.x1);
            const auto x2 = load_sample_matrix(block_args.x2);
            const BlockPartition part = block_args.p1 ? BlockPartition(*block_args.p1, x1.p() - *block_args.p1)
                                                      : BlockPartition::halves(x1.p());
            const auto r = two_sample_block_test(x1, x2, part, block_args.alpha, block_args.mode);
            emit(block_args.format,
                 {{"s_stat", r.s_stat}, {"omega0_sq_hat", r.omega0_sq_hat}, {"z_stat", r.z_stat},
                  {"p_value", r.p_value}},
                 r.reject);
        } else if (*sim) {
            const auto rows = reproduce_table(parse_table_id(table), reps, seed, sim_mode, sim_workers);
            if (sim_out.empty()) {
                write_table_csv(std::cout, rows);
            } else {
                std::ofstream out(sim_out);
                if (!out) throw std::runtime_error("cannot write " + sim_out);
                write_table_csv(out, rows);
            }
        } else if (*gs) {
            gs_opts.p1 = gs_p1;
            const auto data = load_expression_matrix(matrix, format_from_path(matrix), LabelSource::parse(labels));
            const auto sets = load_gmt(gmt);
            for (const auto& w : sets.warnings) std::cerr << "warning: " << w << '\n';
            const auto report = run_pipeline(data, sets, gs_opts);
            std::size_t dropped = 0;
            for (const auto& r : report.sets) dropped += r.genes_requested - r.genes_used;
            if (dropped > 0) std::cerr << "warning: " << dropped << " set member(s) not found in the matrix\n";

            const bool to_stdout = gs_out == "json" || gs_out == "csv";
            const bool as_csv =
                gs_out == "csv" || (gs_out.size() > 4 && gs_out.compare(gs_out.size() - 4, 4, ".csv") == 0);
            std::ofstream file;
            if (!to_stdout) {
                file.open(gs_out);
                if (!file) throw std::runtime_error("cannot write " + gs_out);
            }
            std::ostream& out = to_stdout ? std::cout : file;
            if (as_csv)
                write_report_csv(out, report);
            else
                write_report_json(out, report);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
