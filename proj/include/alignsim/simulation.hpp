#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "alignsim/agents.hpp"
#include "alignsim/alignment.hpp"
#include "alignsim/domain.hpp"
#include "alignsim/kernels.hpp"
#include "alignsim/rng.hpp"

namespace alignsim {

enum class RewardMode { gaussian, bernoulli };

struct EpisodeConfig {
    long max_steps = 1000;
    int subset_size = 10;
    double reward_noise_sd = 1.0;
    int convergence_streak = 5;
    RewardMode reward_mode = RewardMode::gaussian;
    // When set, the loop stops at the step that completes the streak.
    bool stop_on_convergence = false;
};

struct TrajectoryStep {
    long step = 0;
    std::vector<int> offered;
    int chosen = 0;
    double reward = 0.0;
    bool was_bad = false;
    bool was_non_optimal = false;
};

struct Trajectory {
    std::vector<TrajectoryStep> steps;
};

// gaussian: Normal(score, reward_noise_sd^2); bernoulli: success with the
// sigmoid probability of the standardized score.
double env_reward(int action, const ValueScores& scores, const EpisodeConfig& cfg, Rng& rng);

// Algorithm loop with agent updates enabled. Offers a uniform random subset
// each step, lets the agent pick, rewards it, and tracks the run metrics.
RunMetrics run_personalization(Agent& agent, const ValueScores& scores, const std::vector<int>& actions,
                               const EpisodeConfig& cfg, Rng& rng, Trajectory* trajectory = nullptr);

// Same loop with the agent frozen and observations suppressed; convergence
// is not tracked.
RunMetrics run_generalization(Agent& agent, const ValueScores& scores, const std::vector<int>& actions,
                              const EpisodeConfig& cfg, Rng& rng, Trajectory* trajectory = nullptr);

// Ground truth plus its corrupted counterpart for one synthetic experiment.
struct SyntheticInstance {
    ValueScores truth;
    ValueScores corrupted;
    SimilarityMatrix true_kernel;
    SimilarityMatrix corrupted_kernel;
    double alignment = 0.0;
    int k = 0;
};

SyntheticInstance make_synthetic_instance(int n, int k, Rng& rng);

EpisodeConfig synthetic_episode_config();

AgentConfig default_agent_config(AgentKind kind, double prior_mean);

struct SyntheticResult {
    double alignment = 0.0;
    RunMetrics metrics;
    int k = 0;
};

// Draws ground-truth scores on [-3, 3], corrupts k of them, builds both
// kernels, and runs the personalization loop with convergence tracking over
// all actions.
SyntheticResult run_synthetic_experiment(AgentKind kind, int k, std::uint64_t seed,
                                         const EpisodeConfig& cfg = synthetic_episode_config(), int n = 50);

struct ValueExperimentResult {
    double alignment_full = 0.0;
    double alignment_pers = 0.0;
    double alignment_cross = 0.0;
    RunMetrics personalization;
    RunMetrics generalization;
    SplitSpec split;
};

// Random half split, personalization on one half, freeze, generalization on
// the other; all three alignment variants against the reference kernel.
ValueExperimentResult run_value_experiment(const SimilarityMatrix& kernel, const ValueScores& scores,
                                           const SimilarityMatrix& reference_kernel, const EpisodeConfig& cfg,
                                           std::uint64_t seed, AgentKind kind = AgentKind::kernel_ridge);

// ---------------------------------------------------------------------------
// Campaigns: grids of runs with per-run derived seeds, safe to execute in
// parallel; results are merged by run index so the thread count can never
// change the output.

struct RunRow {
    long run_index = 0;
    std::uint64_t seed = 0;
    std::string agent;
    std::string group;  // summary cell (agent kind, kernel name, grid cell)
    std::string label;  // free-form cell detail (k=…, alpha=…)
    std::string phase;  // personalization | generalization
    std::optional<double> alignment_full;
    std::optional<double> alignment_pers;
    std::optional<double> alignment_cross;
    double covariate = 0.0;  // alignment_full, or alpha for sweeps
    RunMetrics metrics;
    std::string error;
};

struct CampaignResult {
    std::vector<RunRow> rows;
};

struct SummaryRow {
    std::string group;
    std::string phase;
    std::string metric;
    std::string variant;
    double spearman = 0.0;
    double p_value = 1.0;
    long n = 0;
};

struct BinnedRow {
    std::string group;
    std::string phase;
    std::string metric;
    double bin_width = 0.05;
    double bin_center = 0.0;
    double mean = 0.0;
    double standard_error = 0.0;
    long count = 0;
};

CampaignResult run_synthetic_campaign(const std::vector<AgentKind>& kinds, long runs_per_kind,
                                      std::uint64_t master_seed, const EpisodeConfig& cfg, int parallelism);

CampaignResult run_value_campaign(const std::vector<std::pair<std::string, SimilarityMatrix>>& kernels,
                                  const ValueScores& scores, const SimilarityMatrix& reference_kernel,
                                  long runs_per_kernel, std::uint64_t master_seed, const EpisodeConfig& cfg,
                                  int parallelism, AgentKind kind = AgentKind::kernel_ridge);

CampaignResult run_interpolation_campaign(int alpha_steps, long runs_per_alpha, int corruption_k,
                                          std::uint64_t master_seed, const EpisodeConfig& cfg, int parallelism,
                                          AgentKind kind = AgentKind::kernel_ridge, int n = 50);

CampaignResult run_control_campaign(const ActionSet& actions, long runs_per_cell, std::uint64_t master_seed,
                                    const EpisodeConfig& cfg, int parallelism,
                                    AgentKind kind = AgentKind::kernel_ridge);

// Spearman(alignment, metric) with a permutation p-value per
// (group, phase, metric, variant) cell. Runs that failed or lack the
// variant's alignment are skipped. Censors missing iterations at the steps
// taken, so non-converged runs count at the cap.
std::vector<SummaryRow> summarize_campaign(const CampaignResult& campaign, int n_shuffles,
                                           std::uint64_t seed);

// 0.05-wide alignment bins of every metric per (group, phase).
std::vector<BinnedRow> bin_campaign(const CampaignResult& campaign, double bin_width = 0.05);

// The metric columns used by summaries, binning, and the results files.
const std::vector<std::string>& metric_names();
double metric_value(const RunMetrics& m, const std::string& name);

}  // namespace alignsim
