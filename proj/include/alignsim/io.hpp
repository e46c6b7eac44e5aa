#pragma once

#include <string>
#include <vector>

#include "alignsim/domain.hpp"
#include "alignsim/simulation.hpp"

namespace alignsim {

struct ScoreScale {
    double scale_min = 0.0;
    double scale_max = 100.0;
    double bad_threshold = 50.0;
};

// CSV with header `id,description`; ids must be 0..N-1 in order. Fields use
// RFC-4180-style quoting. Errors name the offending line.
ActionSet parse_actions(const std::string& path);
void write_actions(const std::string& path, const ActionSet& actions);

// CSV with header `action_id,value_name,score`; rows are filtered to
// value_name and must cover every action id exactly once.
ValueScores parse_scores(const std::string& path, const std::string& value_name,
                         const ScoreScale& scale = {}, const ActionSet* actions = nullptr);
void write_scores(const std::string& path, const ValueScores& scores);

// CSV numeric grid: first row lists the action ids, then one row per action.
// Symmetry is enforced by averaging with the transpose; asymmetry beyond
// 1e-9 is reported through `warnings`.
SimilarityMatrix parse_kernel(const std::string& path, std::vector<std::string>* warnings = nullptr);
void write_kernel(const std::string& path, const SimilarityMatrix& m);

// Writes runs.csv, summary.csv, and binned.tsv under out_dir. Output is
// byte-deterministic for a fixed campaign.
void emit_results(const CampaignResult& campaign, const std::vector<SummaryRow>& summaries,
                  const std::vector<BinnedRow>& binned, const std::string& out_dir);

// Shortest text that parses back to the same double (17 significant digits).
std::string format_double(double v);

}  // namespace alignsim
