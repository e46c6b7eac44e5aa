#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "alignsim/domain.hpp"
#include "alignsim/rng.hpp"

namespace alignsim {

enum class AgentKind { gp, kernel_ridge, svr, thompson_baseline };

std::string agent_kind_name(AgentKind kind);
AgentKind agent_kind_from_name(const std::string& name);

struct AgentConfig {
    AgentKind kind = AgentKind::gp;
    double ridge_lambda = 0.1;
    double noise_variance = 1.0;
    double svr_c = 1.0;
    double svr_epsilon = 0.1;
    double svr_tolerance = 1e-3;
    int svr_max_passes = 1000;
    double exploration_variance = 1.0;
    double jitter = 1e-6;
    // Prediction with no data; the simulation sets this to the scale midpoint.
    double prior_mean = 0.0;
    // Center rewards by the running observed mean before fitting. Off, the
    // predictors evaluate the raw closed forms with an implicit zero prior.
    bool center_rewards = true;
};

struct Prediction {
    double mean = 0.0;
    double standard_deviation = 0.0;
};

struct Observation {
    long step = 0;
    int action = 0;
    double reward = 0.0;
};

// Per-action aggregates plus the chronological log.
struct ObservationStore {
    std::vector<long> counts;
    std::vector<double> reward_sums;
    std::vector<Observation> log;

    long total() const { return static_cast<long>(log.size()); }
    double mean_reward(int action) const { return reward_sums[static_cast<std::size_t>(action)] / static_cast<double>(counts[static_cast<std::size_t>(action)]); }
};

struct SvrFit {
    std::vector<int> action_ids;  // sorted distinct observed actions
    Eigen::VectorXd beta;         // alpha - alpha*, aligned with action_ids
    double bias = 0.0;
    bool converged = true;
    double kkt_violation = 0.0;
    int passes = 0;
};

// Sigmoid success probability for the bernoulli environment; the score is
// standardized by (score - midpoint) / (quarter range) before the sigmoid.
double env_success_probability(double score, const ValueScores& scores);

// One learner over a frozen kernel. Kernel agents (gp / kernel_ridge / svr)
// fit their predictor from per-action mean rewards; the thompson baseline
// keeps beta-Bernoulli counts per arm and ignores the kernel.
class Agent {
public:
    Agent(SimilarityMatrix kernel, AgentConfig config);

    Prediction predict_one(int target);
    std::vector<Prediction> predict(std::span<const int> targets);

    // Thompson sampling: one posterior draw per available action, argmax,
    // uniform tie-break. Draws consume the rng in `available` order.
    int select_action(std::span<const int> available, Rng& rng);

    void observe(int action, double reward);
    void freeze() { frozen_ = true; }
    bool frozen() const { return frozen_; }

    const ObservationStore& observations() const { return store_; }
    const AgentConfig& config() const { return config_; }
    const SimilarityMatrix& kernel() const { return kernel_; }
    AgentKind kind() const { return config_.kind; }

    // Exposed for the dual-feasibility and QP-oracle tests.
    SvrFit svr_fit();

private:
    void ensure_fit();
    void refit_gp_like();
    void refit_svr();
    void invalidate();
    Prediction compute_prediction(int target);
    double centering_constant() const;

    SimilarityMatrix kernel_;
    AgentConfig config_;
    ObservationStore store_;
    bool frozen_ = false;

    // baseline arm counts (successes = reward >= 0.5)
    std::vector<long> successes_;

    // fit cache for the kernel agents
    bool fit_valid_ = false;
    std::vector<int> observed_ids_;
    Eigen::LLT<Eigen::MatrixXd> factor_;
    Eigen::VectorXd alpha_;
    SvrFit svr_state_;

    std::vector<Prediction> prediction_cache_;
    std::vector<char> prediction_valid_;
};

}  // namespace alignsim
