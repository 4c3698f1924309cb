#include "hdcov/geneset.hpp"

#include "hdcov/block_test.hpp"
#include "hdcov/cov_test.hpp"
#include "hdcov/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_map>
#include <unordered_set>

namespace hdcov {
namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    s = s.substr(b, e - b);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return std::string(s);
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = line.find(sep, start);
        out.push_back(trim(std::string_view(line).substr(start, pos - start)));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

std::optional<double> parse_double(const std::string& s) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open file");
    return in;
}

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

std::string where(const std::string& path, std::size_t line) {
    return path + ":" + std::to_string(line) + ": ";
}

}  // namespace

TableFormat format_from_path(const std::string& path) {
    auto ends_with = [&](const std::string& ext) {
        return path.size() >= ext.size() && path.compare(path.size() - ext.size(), ext.size(), ext) == 0;
    };
    return ends_with(".tsv") || ends_with(".txt") || ends_with(".tab") ? TableFormat::Tsv : TableFormat::Csv;
}

Index ExpressionDataset::group_size(int g) const {
    return static_cast<Index>(std::count(group.begin(), group.end(), g));
}

SampleMatrix ExpressionDataset::group_sample(int g, const std::vector<Index>& genes) const {
    RowMatrix x(group_size(g), static_cast<Index>(genes.size()));
    Index row = 0;
    for (std::size_t s = 0; s < group.size(); ++s) {
        if (group[s] != g) continue;
        for (std::size_t k = 0; k < genes.size(); ++k)
            x(row, static_cast<Index>(k)) = values(genes[k], static_cast<Index>(s));
        ++row;
    }
    return SampleMatrix(std::move(x));
}

LabelSource LabelSource::parse(const std::string& spec) {
    LabelSource src;
    if (spec.rfind("row:", 0) == 0)
        src.row_name = spec.substr(4);
    else
        src.file = spec;
    return src;
}

ExpressionDataset load_expression_matrix(const std::string& path, TableFormat format,
                                         const LabelSource& labels) {
    if (labels.file.has_value() == labels.row_name.has_value())
        throw std::invalid_argument("exactly one label source (file or matrix row) is required");
    const char sep = format == TableFormat::Tsv ? '\t' : ',';
    auto in = open_or_throw(path);

    ExpressionDataset data;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (!trim(line).empty()) break;
    }
    const auto header = split(line, sep);
    if (header.size() < 2) throw ParseError(where(path, line_no) + "header needs an id column and samples");
    data.sample_ids.assign(header.begin() + 1, header.end());
    const std::size_t n_samples = data.sample_ids.size();
    {
        std::unordered_set<std::string> seen;
        for (const auto& s : data.sample_ids)
            if (!seen.insert(s).second) throw ParseError(where(path, line_no) + "duplicate sample id '" + s + "'");
    }

    std::vector<std::string> row_labels;
    std::vector<double> values;
    std::unordered_set<std::string> seen_genes;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (trim(line).empty()) continue;
        const auto cells = split(line, sep);
        if (cells.size() != n_samples + 1)
            throw ParseError(where(path, line_no) + "expected " + std::to_string(n_samples + 1) +
                             " fields, found " + std::to_string(cells.size()));
        if (labels.row_name && cells[0] == *labels.row_name) {
            row_labels.assign(cells.begin() + 1, cells.end());
            continue;
        }
        if (cells[0].empty()) throw ParseError(where(path, line_no) + "empty gene id");
        if (!seen_genes.insert(cells[0]).second)
            throw ParseError(where(path, line_no) + "duplicate gene id '" + cells[0] + "'");
        data.gene_ids.push_back(cells[0]);
        for (std::size_t c = 1; c < cells.size(); ++c) {
            const auto v = parse_double(cells[c]);
            if (!v)
                throw ParseError(where(path, line_no) + "non-numeric value '" + cells[c] + "' at row " +
                                 std::to_string(line_no) + ", column " + std::to_string(c + 1));
            values.push_back(*v);
        }
    }
    if (data.gene_ids.empty()) throw ParseError(path + ": no gene rows");

    const auto genes = static_cast<Index>(data.gene_ids.size());
    data.values = Eigen::Map<const RowMatrix>(values.data(), genes, static_cast<Index>(n_samples));

    // Resolve per-sample labels.
    std::vector<std::string> sample_label(n_samples);
    std::string label_origin;
    if (labels.row_name) {
        if (row_labels.empty()) throw ParseError(path + ": label row '" + *labels.row_name + "' not found");
        sample_label = row_labels;
        label_origin = path;
    } else {
        label_origin = *labels.file;
        auto lin = open_or_throw(*labels.file);
        std::unordered_map<std::string, std::size_t> index;
        for (std::size_t s = 0; s < n_samples; ++s) index[data.sample_ids[s]] = s;
        std::vector<bool> assigned(n_samples, false);
        std::size_t lno = 0;
        bool first = true;
        while (std::getline(lin, line)) {
            ++lno;
            strip_cr(line);
            if (trim(line).empty()) continue;
            const char lsep = line.find('\t') != std::string::npos ? '\t' : ',';
            const auto cells = split(line, lsep);
            if (cells.size() != 2)
                throw ParseError(where(*labels.file, lno) + "expected 'sample" + lsep + "label'");
            const auto it = index.find(cells[0]);
            if (it == index.end()) {
                if (first) {
                    first = false;
                    continue;  // header line
                }
                throw ParseError(where(*labels.file, lno) + "unknown sample '" + cells[0] + "'");
            }
            first = false;
            if (assigned[it->second])
                throw ParseError(where(*labels.file, lno) + "sample '" + cells[0] + "' labelled twice");
            assigned[it->second] = true;
            sample_label[it->second] = cells[1];
        }
        for (std::size_t s = 0; s < n_samples; ++s)
            if (!assigned[s]) throw ParseError(*labels.file + ": no label for sample '" + data.sample_ids[s] + "'");
    }

    std::set<std::string> distinct(sample_label.begin(), sample_label.end());
    if (distinct.size() != 2)
        throw ParseError(label_origin + ": expected exactly two groups, found " + std::to_string(distinct.size()));
    data.group_names = {*distinct.begin(), *std::next(distinct.begin())};
    data.group.resize(n_samples);
    for (std::size_t s = 0; s < n_samples; ++s) data.group[s] = sample_label[s] == data.group_names[0] ? 0 : 1;
    for (int g = 0; g < 2; ++g)
        if (data.group_size(g) < 4)
            throw ParseError(label_origin + ": group too small for estimator order: group '" +
                             data.group_names[g] + "' has " + std::to_string(data.group_size(g)) +
                             " samples, need at least 4");
    return data;
}

GeneSetCollection parse_gmt(std::istream& in, const std::string& source) {
    GeneSetCollection out;
    std::unordered_set<std::string> names;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (trim(line).empty()) continue;
        const auto cells = split(line, '\t');
        GeneSet set;
        set.name = cells[0];
        if (set.name.empty()) throw ParseError(where(source, line_no) + "blank gene-set name");
        if (!names.insert(set.name).second)
            throw ParseError(where(source, line_no) + "duplicate gene-set name '" + set.name + "'");
        if (cells.size() > 1) set.description = cells[1];
        std::unordered_set<std::string> seen;
        std::size_t repeats = 0;
        for (std::size_t c = 2; c < cells.size(); ++c) {
            if (cells[c].empty()) continue;
            if (seen.insert(cells[c]).second)
                set.genes.push_back(cells[c]);
            else
                ++repeats;
        }
        if (set.genes.empty()) throw ParseError(where(source, line_no) + "gene set '" + set.name + "' has no genes");
        if (repeats > 0)
            out.warnings.push_back(where(source, line_no) + "set '" + set.name + "': dropped " +
                                   std::to_string(repeats) + " repeated gene(s)");
        out.sets.push_back(std::move(set));
    }
    return out;
}

GeneSetCollection load_gmt(const std::string& path) {
    auto in = open_or_throw(path);
    return parse_gmt(in, path);
}

std::vector<bool> bh_fdr(const std::vector<double>& p_values, double q) {
    if (!(q > 0.0 && q < 1.0)) throw std::domain_error("FDR level must lie in (0, 1)");
    for (double p : p_values)
        if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("p-values must lie in [0, 1]");
    const std::size_t m = p_values.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return p_values[a] < p_values[b]; });

    std::optional<double> cutoff;
    for (std::size_t rank = m; rank >= 1; --rank) {
        const double p = p_values[order[rank - 1]];
        if (p <= static_cast<double>(rank) * q / static_cast<double>(m)) {
            cutoff = p;
            break;
        }
    }
    std::vector<bool> reject(m, false);
    if (cutoff)
        for (std::size_t i = 0; i < m; ++i) reject[i] = p_values[i] <= *cutoff;
    return reject;
}

std::string to_string(BlockClass c) {
    switch (c) {
        case BlockClass::DiagonalOnly: return "DiagonalOnly";
        case BlockClass::OffDiagonalOnly: return "OffDiagonalOnly";
        case BlockClass::Both: return "Both";
        case BlockClass::Neither: return "Neither";
    }
    return "Neither";
}

std::size_t GeneSetReport::count(BlockClass c) const {
    return static_cast<std::size_t>(std::count_if(sets.begin(), sets.end(), [&](const GeneSetResult& r) {
        return r.followup && r.followup->classification == c;
    }));
}

std::size_t GeneSetReport::significant() const {
    return static_cast<std::size_t>(
        std::count_if(sets.begin(), sets.end(), [](const GeneSetResult& r) { return r.fdr_significant; }));
}

namespace {

template <class F>
void parallel_for(std::size_t count, std::size_t workers, F&& body) {
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::max<std::size_t>(1, std::min(workers, count));
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < count; i = next++) body(i);
    };
    if (workers == 1) {
        work();
        return;
    }
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
}

}  // namespace

GeneSetReport run_pipeline(const ExpressionDataset& data, const GeneSetCollection& sets,
                           const PipelineOptions& options) {
    GeneSetReport report;
    report.options = options;
    report.n1 = data.group_size(0);
    report.n2 = data.group_size(1);
    report.group_names = data.group_names;

    std::unordered_map<std::string, Index> gene_index;
    for (std::size_t g = 0; g < data.gene_ids.size(); ++g) gene_index[data.gene_ids[g]] = static_cast<Index>(g);

    std::vector<const GeneSet*> ordered;
    for (const auto& s : sets.sets) ordered.push_back(&s);
    std::sort(ordered.begin(), ordered.end(), [](auto a, auto b) { return a->name < b->name; });

    report.sets.resize(ordered.size());
    std::vector<std::vector<Index>> members(ordered.size());
    for (std::size_t s = 0; s < ordered.size(); ++s) {
        auto& r = report.sets[s];
        r.name = ordered[s]->name;
        r.genes_requested = ordered[s]->genes.size();
        for (const auto& g : ordered[s]->genes)
            if (auto it = gene_index.find(g); it != gene_index.end()) members[s].push_back(it->second);
        std::sort(members[s].begin(), members[s].end());  // dataset order
        r.genes_used = members[s].size();
    }

    parallel_for(ordered.size(), options.workers, [&](std::size_t s) {
        auto& r = report.sets[s];
        if (r.genes_used < 2) {
            r.skip_reason = "fewer than 2 genes present in the matrix";
            return;
        }
        try {
            const auto res = two_sample_cov_test(data.group_sample(0, members[s]), data.group_sample(1, members[s]),
                                                 options.followup_alpha, options.mode);
            r.tested = true;
            r.p_value = res.p_value;
            r.l_n = res.l_n;
        } catch (const std::exception& e) {
            r.skip_reason = e.what();
        }
    });

    std::vector<double> pvals;
    std::vector<std::size_t> tested;
    for (std::size_t s = 0; s < report.sets.size(); ++s)
        if (report.sets[s].tested) {
            pvals.push_back(report.sets[s].p_value);
            tested.push_back(s);
        }
    if (!pvals.empty()) {
        const auto decisions = bh_fdr(pvals, options.fdr_q);
        for (std::size_t k = 0; k < tested.size(); ++k) report.sets[tested[k]].fdr_significant = decisions[k];
    }

    parallel_for(report.sets.size(), options.workers, [&](std::size_t s) {
        auto& r = report.sets[s];
        if (!r.fdr_significant) return;
        const auto p = static_cast<Index>(r.genes_used);
        const Index p1 = options.p1 ? *options.p1 : p / 2;
        if (p1 < 2 || p - p1 < 2) {
            r.followup_skip_reason = "each block needs at least 2 genes (p1=" + std::to_string(p1) +
                                     ", p2=" + std::to_string(p - p1) + ")";
            return;
        }
        try {
            const SampleMatrix x1 = data.group_sample(0, members[s]);
            const SampleMatrix x2 = data.group_sample(1, members[s]);
            const BlockPartition part(p1, p - p1);
            const double a = options.followup_alpha;
            const auto d1 = two_sample_cov_test(x1.columns(0, p1), x2.columns(0, p1), a, options.mode);
            const auto d2 = two_sample_cov_test(x1.columns(p1, p - p1), x2.columns(p1, p - p1), a, options.mode);
            const auto off = two_sample_block_test(x1, x2, part, a, options.mode);
            FollowUp f;
            f.p1 = p1;
            f.diag1_p = d1.p_value;
            f.diag2_p = d2.p_value;
            f.offdiag_p = off.p_value;
            const bool diag = d1.reject || d2.reject;
            f.classification = diag && off.reject   ? BlockClass::Both
                               : diag               ? BlockClass::DiagonalOnly
                               : off.reject         ? BlockClass::OffDiagonalOnly
                                                    : BlockClass::Neither;
            r.followup = f;
        } catch (const std::exception& e) {
            r.followup_skip_reason = e.what();
        }
    });
    return report;
}

void write_report_json(std::ostream& out, const GeneSetReport& report) {
    using nlohmann::ordered_json;
    ordered_json j;
    j["fdr_q"] = report.options.fdr_q;
    j["followup_alpha"] = report.options.followup_alpha;
    j["mode"] = report.options.mode == EstimatorMode::ExactUnbiased ? "exact" : "centered";
    j["groups"] = {{{"label", report.group_names[0]}, {"n", report.n1}},
                   {{"label", report.group_names[1]}, {"n", report.n2}}};
    ordered_json sets = ordered_json::array();
    for (const auto& r : report.sets) {
        ordered_json s;
        s["name"] = r.name;
        s["genes_requested"] = r.genes_requested;
        s["genes_used"] = r.genes_used;
        s["tested"] = r.tested;
        if (r.tested) {
            s["p_value"] = r.p_value;
            s["l_n"] = r.l_n;
        } else {
            s["skip_reason"] = r.skip_reason;
        }
        s["fdr_significant"] = r.fdr_significant;
        if (r.followup) {
            s["followup"] = {{"p1", r.followup->p1},
                             {"diag1_p", r.followup->diag1_p},
                             {"diag2_p", r.followup->diag2_p},
                             {"offdiag_p", r.followup->offdiag_p},
                             {"class", to_string(r.followup->classification)}};
        } else if (!r.followup_skip_reason.empty()) {
            s["followup_skip_reason"] = r.followup_skip_reason;
        }
        sets.push_back(std::move(s));
    }
    j["sets"] = std::move(sets);
    j["summary"] = {{"sets", report.sets.size()},
                    {"significant", report.significant()},
                    {"DiagonalOnly", report.count(BlockClass::DiagonalOnly)},
                    {"OffDiagonalOnly", report.count(BlockClass::OffDiagonalOnly)},
                    {"Both", report.count(BlockClass::Both)},
                    {"Neither", report.count(BlockClass::Neither)}};
    out << j.dump(2) << '\n';
}

void write_report_csv(std::ostream& out, const GeneSetReport& report) {
    out << "set,p_value,fdr_significant,diag1_p,diag2_p,offdiag_p,class\n";
    out << std::setprecision(17);
    for (const auto& r : report.sets) {
        out << csv_field(r.name) << ',';
        if (r.tested) out << r.p_value;
        out << ',' << (r.fdr_significant ? "true" : "false") << ',';
        if (r.followup)
            out << r.followup->diag1_p << ',' << r.followup->diag2_p << ',' << r.followup->offdiag_p << ','
                << to_string(r.followup->classification);
        else
            out << ",,,";
        out << '\n';
    }
}

}  // namespace hdcov
