#include "hdcov/simulation.hpp"

#include "hdcov/block_test.hpp"
#include "hdcov/cov_test.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace hdcov {

SampleMatrix simulate_ma(RngStream& rng, Index n, Index p, const MaModel& model,
                         const InnovationSpec& innov) {
    if (n < 1 || p < 1) throw std::invalid_argument("simulate_ma needs n >= 1 and p >= 1");
    const auto q = static_cast<Index>(model.order());
    const bool constant =
        q > 1 && std::all_of(model.coeffs.begin(), model.coeffs.end(),
                             [&](double c) { return c == model.coeffs.front(); });

    RowMatrix x(n, p);
    std::vector<double> z(static_cast<std::size_t>(p + q));
    std::vector<double> prefix(constant ? z.size() + 1 : 0);
    for (Index i = 0; i < n; ++i) {
        fill_innovations(rng, innov, z);
        if (constant) {
            // Equal coefficients: the lagged part is a sliding window sum.
            prefix[0] = 0.0;
            for (std::size_t k = 0; k < z.size(); ++k) prefix[k + 1] = prefix[k] + z[k];
            const double c = model.coeffs.front();
            for (Index k = 0; k < p; ++k)
                x(i, k) = z[k] + c * (prefix[k + q + 1] - prefix[k + 1]);
        } else {
            for (Index k = 0; k < p; ++k) {
                double v = z[k];
                for (Index m = 1; m <= q; ++m) v += model.coeffs[m - 1] * z[k + m];
                x(i, k) = v;
            }
        }
    }
    return SampleMatrix(std::move(x));
}

Matrix ma_population_cov(const MaModel& model, Index p) {
    if (p < 1) throw std::invalid_argument("ma_population_cov needs p >= 1");
    std::vector<double> c{1.0};
    c.insert(c.end(), model.coeffs.begin(), model.coeffs.end());
    const auto q = static_cast<Index>(model.order());
    Matrix sigma = Matrix::Zero(p, p);
    for (Index lag = 0; lag <= std::min(q, p - 1); ++lag) {
        double v = 0.0;
        for (Index m = 0; m + lag <= q; ++m) v += c[m] * c[m + lag];
        for (Index s = 0; s + lag < p; ++s) {
            sigma(s, s + lag) = v;
            sigma(s + lag, s) = v;
        }
    }
    return sigma;
}

namespace {

struct RepOutcome {
    double statistic = 0.0;
    bool reject = false;
};

RepOutcome run_replication(const ScenarioConfig& cfg, std::size_t rep) {
    RngStream r1(cfg.master_seed, replication_stream(rep, 0));
    RngStream r2(cfg.master_seed, replication_stream(rep, 1));
    const SampleMatrix x1 = simulate_ma(r1, cfg.n1, cfg.p, cfg.model1, cfg.innov1);
    const SampleMatrix x2 = simulate_ma(r2, cfg.n2, cfg.p, cfg.model2, cfg.innov2);
    if (cfg.test == TestKind::WholeMatrix) {
        const auto res = two_sample_cov_test(x1, x2, cfg.alpha, cfg.mode);
        return {res.l_n, res.reject};
    }
    const BlockPartition part =
        cfg.p1 ? BlockPartition(*cfg.p1, cfg.p - *cfg.p1) : BlockPartition::halves(cfg.p);
    const auto res = two_sample_block_test(x1, x2, part, cfg.alpha, cfg.mode);
    return {res.z_stat, res.reject};
}

}  // namespace

MonteCarloReport run_scenario(const ScenarioConfig& cfg, std::size_t workers) {
    if (cfg.replications < 1) throw std::invalid_argument("scenario needs at least one replication");
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, cfg.replications);

    const auto start = std::chrono::steady_clock::now();
    std::vector<RepOutcome> outcomes(cfg.replications);
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::size_t failed_rep = cfg.replications;
    std::string failure;

    auto work = [&] {
        for (std::size_t rep = next++; rep < cfg.replications; rep = next++) {
            try {
                outcomes[rep] = run_replication(cfg, rep);
            } catch (const std::exception& e) {
                std::lock_guard lock(error_mutex);
                if (rep < failed_rep) {
                    failed_rep = rep;
                    failure = e.what();
                }
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    if (failed_rep < cfg.replications) {
        std::ostringstream msg;
        msg << "replication " << failed_rep << " (master seed " << cfg.master_seed << ", streams "
            << replication_stream(failed_rep, 0) << "/" << replication_stream(failed_rep, 1)
            << ") failed: " << failure;
        throw std::runtime_error(msg.str());
    }

    MonteCarloReport report;
    report.replications = cfg.replications;
    report.workers = workers;
    report.statistics.reserve(cfg.replications);
    for (const auto& o : outcomes) {
        report.statistics.push_back(o.statistic);
        report.rejections += o.reject ? 1 : 0;
    }
    const double reps = static_cast<double>(cfg.replications);
    report.rejection_rate = static_cast<double>(report.rejections) / reps;
    report.standard_error = std::sqrt(report.rejection_rate * (1.0 - report.rejection_rate) / reps);
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

TableId parse_table_id(const std::string& name) {
    std::string s = name;
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
    if (s.size() == 1) s = "T" + s;
    if (s == "T1") return TableId::T1;
    if (s == "T2") return TableId::T2;
    if (s == "T3") return TableId::T3;
    if (s == "T4") return TableId::T4;
    if (s == "T5") return TableId::T5;
    if (s == "T6") return TableId::T6;
    throw std::invalid_argument("unknown table id '" + name + "' (expected T1..T6)");
}

std::string table_name(TableId id) {
    return "T" + std::to_string(static_cast<int>(id) + 1);
}

namespace {

struct Cell {
    ScenarioConfig config;
    std::string kind;
};

InnovationSpec gamma_4() { return InnovationSpec::centered_gamma(4.0, 0.5); }
InnovationSpec gamma_half() { return InnovationSpec::centered_gamma(0.5, std::sqrt(2.0)); }

std::vector<Cell> table_cells(TableId id, std::size_t reps, EstimatorMode mode) {
    std::vector<Cell> cells;
    auto base = [&](Index p, Index n) {
        ScenarioConfig c;
        c.p = p;
        c.n1 = n;
        c.n2 = n;
        c.replications = reps;
        c.mode = mode;
        return c;
    };
    const auto normal = InnovationSpec::standard_normal();

    switch (id) {
        case TableId::T1: {
            const std::pair<Index, Index> dims[] = {{40, 60}, {80, 120}, {120, 180}};
            for (auto [p, n] : dims) {
                cells.push_back({base(p, n), "size"});
                for (double theta : {0.5, 0.3, 0.2}) {
                    ScenarioConfig c = base(p, n);
                    c.model2 = MaModel{{theta}};
                    std::ostringstream kind;
                    kind << "power@theta=" << theta;
                    cells.push_back({c, kind.str()});
                }
            }
            break;
        }
        case TableId::T2:
        case TableId::T3:
        case TableId::T4: {
            InnovationSpec i1 = normal, i2 = normal;
            if (id == TableId::T3) {
                i1 = gamma_4();
                i2 = gamma_half();
            } else if (id == TableId::T4) {
                i2 = gamma_half();
            }
            for (const char* kind : {"size", "power"})
                for (Index n : {20, 50, 80, 100})
                    for (Index p : {32, 64, 128, 256, 512, 700}) {
                        ScenarioConfig c = base(p, n);
                        c.model1 = MaModel{{2.0}};
                        c.model2 = std::string(kind) == "size" ? MaModel{{2.0}} : MaModel{{2.0, 1.0}};
                        c.innov1 = i1;
                        c.innov2 = i2;
                        cells.push_back({c, kind});
                    }
            break;
        }
        case TableId::T5:
        case TableId::T6: {
            struct Design { std::size_t m1, m2; Index p; };
            const Design designs[] = {{2, 25, 50}, {3, 50, 100}, {7, 100, 200}, {12, 250, 500}, {18, 300, 700}};
            for (const char* kind : {"size", "power"})
                for (Index n : {20, 50, 80, 100})
                    for (const auto& d : designs) {
                        ScenarioConfig c = base(d.p, n);
                        c.test = TestKind::Block;
                        c.model1 = MaModel::constant(d.m1, 0.1);
                        c.model2 = std::string(kind) == "size" ? MaModel::constant(d.m1, 0.1)
                                                               : MaModel::constant(d.m2, 0.8);
                        if (id == TableId::T6) {
                            c.innov1 = gamma_4();
                            c.innov2 = gamma_half();
                        }
                        cells.push_back({c, kind});
                    }
            break;
        }
    }
    return cells;
}

}  // namespace

std::vector<ScenarioConfig> table_scenarios(TableId id, std::size_t reps, std::uint64_t seed,
                                            EstimatorMode mode) {
    std::vector<ScenarioConfig> out;
    std::uint64_t c = 0;
    for (auto& cell : table_cells(id, reps, mode)) {
        cell.config.master_seed = seed + c++;
        out.push_back(cell.config);
    }
    return out;
}

std::vector<TableRow> reproduce_table(TableId id, std::size_t reps, std::uint64_t seed,
                                      EstimatorMode mode, std::size_t workers) {
    if (reps < 100) throw std::invalid_argument("table reproduction needs at least 100 replications");
    std::vector<TableRow> rows;
    std::uint64_t c = 0;
    for (auto& cell : table_cells(id, reps, mode)) {
        cell.config.master_seed = seed + c++;
        const auto report = run_scenario(cell.config, workers);
        rows.push_back(TableRow{table_name(id), cell.config.n1, cell.config.n2, cell.config.p, cell.kind,
                                report.rejection_rate, report.standard_error, reps,
                                cell.config.master_seed});
    }
    return rows;
}

void write_table_csv(std::ostream& out, const std::vector<TableRow>& rows) {
    out << "table,n1,n2,p,kind,rate,se,reps,seed\n";
    for (const auto& r : rows) {
        out << r.table << ',' << r.n1 << ',' << r.n2 << ',' << r.p << ',' << r.kind << ','
            << std::setprecision(6) << std::fixed << r.rate << ',' << r.se << std::defaultfloat << ','
            << r.reps << ',' << r.seed << '\n';
    }
}

}  // namespace hdcov
