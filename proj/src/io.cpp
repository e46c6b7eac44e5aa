#include "alignsim/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace alignsim {

namespace {

[[noreturn]] void fail(const std::string& path, long line, const std::string& what) {
    throw std::invalid_argument(path + ":" + std::to_string(line) + ": " + what);
}

// RFC-4180-style field splitting for one line (no embedded newlines).
std::vector<std::string> split_csv_line(const std::string& line, const std::string& path, long line_no) {
    std::vector<std::string> fields;
    std::string field;
    bool in_quotes = false;
    std::size_t i = 0;
    for (;;) {
        if (in_quotes) {
            if (i >= line.size()) fail(path, line_no, "unterminated quoted field");
            if (line[i] == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field.push_back('"');
                    i += 2;
                } else {
                    in_quotes = false;
                    ++i;
                }
            } else {
                field.push_back(line[i]);
                ++i;
            }
        } else if (i >= line.size()) {
            fields.push_back(std::move(field));
            break;
        } else if (line[i] == '"' && field.empty()) {
            in_quotes = true;
            ++i;
        } else if (line[i] == ',') {
            fields.push_back(std::move(field));
            field.clear();
            ++i;
        } else {
            field.push_back(line[i]);
            ++i;
        }
    }
    return fields;
}

std::string quote_csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open file: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

long parse_long(const std::string& s, const std::string& path, long line_no, const std::string& what) {
    try {
        std::size_t used = 0;
        const long v = std::stol(s, &used);
        if (used != s.size()) fail(path, line_no, what + ": trailing characters in '" + s + "'");
        return v;
    } catch (const std::invalid_argument&) {
        fail(path, line_no, what + ": not an integer: '" + s + "'");
    } catch (const std::out_of_range&) {
        fail(path, line_no, what + ": out of range: '" + s + "'");
    }
}

double parse_double(const std::string& s, const std::string& path, long line_no, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) fail(path, line_no, what + ": trailing characters in '" + s + "'");
        return v;
    } catch (const std::invalid_argument&) {
        fail(path, line_no, what + ": not a number: '" + s + "'");
    } catch (const std::out_of_range&) {
        fail(path, line_no, what + ": out of range: '" + s + "'");
    }
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

ActionSet parse_actions(const std::string& path) {
    const auto lines = read_lines(path);
    if (lines.empty()) throw std::invalid_argument(path + ": empty file");
    if (lines[0] != "id,description") fail(path, 1, "expected header 'id,description'");

    ActionSet actions;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        if (lines[li].empty()) continue;
        const long line_no = static_cast<long>(li + 1);
        const auto fields = split_csv_line(lines[li], path, line_no);
        if (fields.size() != 2) fail(path, line_no, "expected 2 fields, got " + std::to_string(fields.size()));
        const long id = parse_long(fields[0], path, line_no, "id");
        if (id != static_cast<long>(actions.descriptions.size())) {
            fail(path, line_no, "id out of order: expected " + std::to_string(actions.descriptions.size()) +
                                    ", got " + std::to_string(id));
        }
        actions.descriptions.push_back(fields[1]);
    }
    if (actions.descriptions.empty()) fail(path, 1, "no action rows after header");
    try {
        validate_actions(actions);
    } catch (const std::exception& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
    return actions;
}

void write_actions(const std::string& path, const ActionSet& actions) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << "id,description\n";
    for (int i = 0; i < actions.size(); ++i) {
        out << i << "," << quote_csv_field(actions.descriptions[static_cast<std::size_t>(i)]) << "\n";
    }
}

ValueScores parse_scores(const std::string& path, const std::string& value_name, const ScoreScale& scale,
                         const ActionSet* actions) {
    const auto lines = read_lines(path);
    if (lines.empty()) throw std::invalid_argument(path + ": empty file");
    if (lines[0] != "action_id,value_name,score") fail(path, 1, "expected header 'action_id,value_name,score'");

    std::map<long, double> by_id;
    long max_id = -1;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        if (lines[li].empty()) continue;
        const long line_no = static_cast<long>(li + 1);
        const auto fields = split_csv_line(lines[li], path, line_no);
        if (fields.size() != 3) fail(path, line_no, "expected 3 fields, got " + std::to_string(fields.size()));
        if (fields[1] != value_name) continue;
        const long id = parse_long(fields[0], path, line_no, "action_id");
        if (id < 0) fail(path, line_no, "negative action_id");
        const double score = parse_double(fields[2], path, line_no, "score");
        if (score < scale.scale_min || score > scale.scale_max) {
            fail(path, line_no, "score " + format_double(score) + " outside scale [" +
                                    format_double(scale.scale_min) + ", " + format_double(scale.scale_max) + "]");
        }
        if (by_id.count(id)) fail(path, line_no, "duplicate row for action_id " + std::to_string(id));
        by_id[id] = score;
        max_id = std::max(max_id, id);
    }
    if (by_id.empty()) throw std::invalid_argument(path + ": no rows for value '" + value_name + "'");

    const long n = actions ? actions->size() : max_id + 1;
    std::vector<long> missing;
    for (long id = 0; id < n; ++id) {
        if (!by_id.count(id)) missing.push_back(id);
    }
    if (!missing.empty() || max_id >= n) {
        std::ostringstream os;
        os << path << ": value '" << value_name << "' must cover action ids 0.." << (n - 1);
        if (!missing.empty()) {
            os << "; missing:";
            for (long id : missing) os << " " << id;
        }
        if (max_id >= n) os << "; id " << max_id << " out of range";
        throw std::invalid_argument(os.str());
    }

    ValueScores scores;
    scores.value_name = value_name;
    scores.scale_min = scale.scale_min;
    scores.scale_max = scale.scale_max;
    scores.bad_threshold = scale.bad_threshold;
    scores.scores.resize(n);
    for (const auto& [id, s] : by_id) scores.scores[id] = s;
    validate_scores(scores);
    return scores;
}

void write_scores(const std::string& path, const ValueScores& scores) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << "action_id,value_name,score\n";
    for (int i = 0; i < scores.size(); ++i) {
        out << i << "," << quote_csv_field(scores.value_name) << "," << format_double(scores.scores[i]) << "\n";
    }
}

SimilarityMatrix parse_kernel(const std::string& path, std::vector<std::string>* warnings) {
    const auto lines = read_lines(path);
    std::vector<std::vector<double>> grid;
    std::vector<long> header_ids;
    for (std::size_t li = 0; li < lines.size(); ++li) {
        if (lines[li].empty()) continue;
        const long line_no = static_cast<long>(li + 1);
        const auto fields = split_csv_line(lines[li], path, line_no);
        if (header_ids.empty() && grid.empty()) {
            header_ids.reserve(fields.size());
            for (const auto& f : fields) header_ids.push_back(parse_long(f, path, line_no, "header id"));
            for (std::size_t i = 0; i < header_ids.size(); ++i) {
                if (header_ids[i] != static_cast<long>(i)) fail(path, line_no, "header ids must be 0..N-1 in order");
            }
            continue;
        }
        std::vector<double> row;
        row.reserve(fields.size());
        for (const auto& f : fields) row.push_back(parse_double(f, path, line_no, "entry"));
        if (row.size() != header_ids.size()) {
            fail(path, line_no, "ragged row: expected " + std::to_string(header_ids.size()) + " entries, got " +
                                    std::to_string(row.size()));
        }
        grid.push_back(std::move(row));
    }
    if (header_ids.empty()) throw std::invalid_argument(path + ": empty kernel file");
    const long n = static_cast<long>(header_ids.size());
    if (static_cast<long>(grid.size()) != n) {
        throw std::invalid_argument(path + ": dimension mismatch: " + std::to_string(grid.size()) + " rows for " +
                                    std::to_string(n) + " ids");
    }

    SimilarityMatrix m;
    m.provenance = Provenance::file;
    m.entries.resize(n, n);
    for (long i = 0; i < n; ++i)
        for (long j = 0; j < n; ++j) m.entries(i, j) = grid[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];

    double max_asym = 0.0;
    for (long i = 0; i < n; ++i)
        for (long j = i + 1; j < n; ++j) max_asym = std::max(max_asym, std::abs(m.entries(i, j) - m.entries(j, i)));
    if (max_asym > 1e-9 && warnings) {
        warnings->push_back(path + ": symmetrized kernel with max asymmetry " + format_double(max_asym));
    }
    // exact for symmetric input, so round trips stay bit-identical
    m.entries = 0.5 * (m.entries + Eigen::MatrixXd(m.entries.transpose()));
    return m;
}

void write_kernel(const std::string& path, const SimilarityMatrix& m) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    const int n = m.size();
    for (int j = 0; j < n; ++j) out << (j ? "," : "") << j;
    out << "\n";
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) out << (j ? "," : "") << format_double(m.entries(i, j));
        out << "\n";
    }
}

namespace {

std::string opt_double(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

}  // namespace

void emit_results(const CampaignResult& campaign, const std::vector<SummaryRow>& summaries,
                  const std::vector<BinnedRow>& binned, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);

    {
        std::ofstream out(out_dir + "/runs.csv");
        if (!out) throw std::runtime_error("cannot write " + out_dir + "/runs.csv");
        out << "seed,agent,alignment_full,alignment_pers,alignment_cross,mean_reward,bad_actions,"
               "non_optimal_actions,unique_actions,iterations_to_convergence,converged,phase,label,error\n";
        std::vector<const RunRow*> rows;
        rows.reserve(campaign.rows.size());
        for (const auto& r : campaign.rows) rows.push_back(&r);
        std::sort(rows.begin(), rows.end(), [](const RunRow* a, const RunRow* b) {
            if (a->run_index != b->run_index) return a->run_index < b->run_index;
            return a->phase < b->phase;  // generalization < personalization, stable either way
        });
        for (const RunRow* r : rows) {
            out << r->seed << "," << r->agent << "," << opt_double(r->alignment_full) << ","
                << opt_double(r->alignment_pers) << "," << opt_double(r->alignment_cross) << ","
                << format_double(r->metrics.mean_reward) << "," << r->metrics.bad_actions << ","
                << r->metrics.non_optimal_actions << "," << r->metrics.unique_actions << ","
                << (r->metrics.iterations_to_convergence ? std::to_string(*r->metrics.iterations_to_convergence) : "")
                << "," << (r->metrics.converged ? "true" : "false") << "," << r->phase << ","
                << quote_csv_field(r->label) << "," << quote_csv_field(r->error) << "\n";
        }
    }

    {
        std::ofstream out(out_dir + "/summary.csv");
        if (!out) throw std::runtime_error("cannot write " + out_dir + "/summary.csv");
        out << "group,phase,metric,alignment_variant,spearman,p_value,n\n";
        for (const auto& s : summaries) {
            out << quote_csv_field(s.group) << "," << s.phase << "," << s.metric << "," << s.variant << ","
                << format_double(s.spearman) << "," << format_double(s.p_value) << "," << s.n << "\n";
        }
    }

    {
        std::ofstream out(out_dir + "/binned.tsv");
        if (!out) throw std::runtime_error("cannot write " + out_dir + "/binned.tsv");
        out << "group\tphase\tmetric\tbin_width\tbin_center\tmean\tstandard_error\tcount\n";
        for (const auto& b : binned) {
            out << b.group << "\t" << b.phase << "\t" << b.metric << "\t" << format_double(b.bin_width) << "\t"
                << format_double(b.bin_center) << "\t" << format_double(b.mean) << "\t"
                << format_double(b.standard_error) << "\t" << b.count << "\n";
        }
    }
}

}  // namespace alignsim
