#include "alignsim/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace alignsim {

double env_reward(int action, const ValueScores& scores, const EpisodeConfig& cfg, Rng& rng) {
    if (action < 0 || action >= scores.size()) throw std::invalid_argument("env_reward: action out of range");
    const double score = scores.scores[action];
    if (cfg.reward_mode == RewardMode::gaussian) {
        return rng.normal(score, cfg.reward_noise_sd);
    }
    return rng.bernoulli(env_success_probability(score, scores)) ? 1.0 : 0.0;
}

namespace {

RunMetrics run_episode(Agent& agent, const ValueScores& scores, const std::vector<int>& actions,
                       const EpisodeConfig& cfg, Rng& rng, Trajectory* trajectory, bool learn,
                       bool track_convergence) {
    if (static_cast<int>(actions.size()) < cfg.subset_size) {
        throw std::invalid_argument("run: fewer actions than subset_size");
    }
    for (int a : actions) {
        if (a < 0 || a >= scores.size()) throw std::invalid_argument("run: action id out of range");
    }

    RunMetrics metrics;
    double reward_sum = 0.0;
    std::set<int> unique;
    int streak = 0;

    std::vector<int> pool = actions;
    const int n_pool = static_cast<int>(pool.size());

    for (long t = 0; t < cfg.max_steps; ++t) {
        // uniform random subset, partial Fisher-Yates over the pool
        for (int i = 0; i < cfg.subset_size; ++i) {
            const int j = i + rng.uniform_index(n_pool - i);
            std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
        }
        std::vector<int> offered(pool.begin(), pool.begin() + cfg.subset_size);

        const int chosen = agent.select_action(offered, rng);
        const double reward = env_reward(chosen, scores, cfg, rng);
        if (learn) agent.observe(chosen, reward);

        double subset_max = -std::numeric_limits<double>::infinity();
        for (int a : offered) subset_max = std::max(subset_max, scores.scores[a]);

        const bool was_bad = scores.scores[chosen] < scores.bad_threshold;
        const bool was_non_optimal = scores.scores[chosen] < subset_max;

        reward_sum += reward;
        metrics.steps += 1;
        if (was_bad) metrics.bad_actions += 1;
        if (was_non_optimal) metrics.non_optimal_actions += 1;
        unique.insert(chosen);

        if (trajectory) trajectory->steps.push_back({t, offered, chosen, reward, was_bad, was_non_optimal});

        if (track_convergence) {
            streak = was_non_optimal ? 0 : streak + 1;
            if (!metrics.converged && streak >= cfg.convergence_streak) {
                metrics.converged = true;
                metrics.iterations_to_convergence = t + 1;
                if (cfg.stop_on_convergence) break;
            }
        }
    }

    metrics.mean_reward = reward_sum / static_cast<double>(metrics.steps);
    metrics.unique_actions = static_cast<long>(unique.size());
    return metrics;
}

}  // namespace

RunMetrics run_personalization(Agent& agent, const ValueScores& scores, const std::vector<int>& actions,
                               const EpisodeConfig& cfg, Rng& rng, Trajectory* trajectory) {
    return run_episode(agent, scores, actions, cfg, rng, trajectory, /*learn=*/true,
                       /*track_convergence=*/true);
}

RunMetrics run_generalization(Agent& agent, const ValueScores& scores, const std::vector<int>& actions,
                              const EpisodeConfig& cfg, Rng& rng, Trajectory* trajectory) {
    agent.freeze();
    return run_episode(agent, scores, actions, cfg, rng, trajectory, /*learn=*/false,
                       /*track_convergence=*/false);
}

EpisodeConfig synthetic_episode_config() {
    EpisodeConfig cfg;
    cfg.stop_on_convergence = true;
    return cfg;
}

AgentConfig default_agent_config(AgentKind kind, double prior_mean) {
    AgentConfig cfg;
    cfg.kind = kind;
    cfg.prior_mean = prior_mean;
    return cfg;
}

SyntheticInstance make_synthetic_instance(int n, int k, Rng& rng) {
    SyntheticInstance inst;
    inst.k = k;
    inst.truth.value_name = "synthetic";
    inst.truth.scale_min = -3.0;
    inst.truth.scale_max = 3.0;
    inst.truth.bad_threshold = 0.0;
    inst.truth.scores.resize(n);
    for (int i = 0; i < n; ++i) inst.truth.scores[i] = rng.uniform(-3.0, 3.0);

    CorruptionSpec spec;
    spec.k = k;
    spec.replacement_low = inst.truth.scale_min;
    spec.replacement_high = inst.truth.scale_max;
    inst.corrupted = corrupt_scores(inst.truth, spec, rng);

    inst.true_kernel = score_kernel(inst.truth);
    inst.corrupted_kernel = score_kernel(inst.corrupted);
    inst.alignment = alignment(inst.true_kernel, inst.corrupted_kernel, full_variant());
    return inst;
}

SyntheticResult run_synthetic_experiment(AgentKind kind, int k, std::uint64_t seed, const EpisodeConfig& cfg,
                                         int n) {
    Rng rng(seed);
    SyntheticInstance inst = make_synthetic_instance(n, k, rng);

    EpisodeConfig run_cfg = cfg;
    AgentConfig agent_cfg = default_agent_config(kind, inst.truth.midpoint());
    if (kind == AgentKind::thompson_baseline) run_cfg.reward_mode = RewardMode::bernoulli;

    Agent agent(prepare_agent_kernel(inst.corrupted_kernel), agent_cfg);

    std::vector<int> all_actions(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) all_actions[static_cast<std::size_t>(i)] = i;

    SyntheticResult result;
    result.k = k;
    result.alignment = inst.alignment;
    result.metrics = run_personalization(agent, inst.truth, all_actions, run_cfg, rng);
    result.metrics.alignment = inst.alignment;
    return result;
}

ValueExperimentResult run_value_experiment(const SimilarityMatrix& kernel, const ValueScores& scores,
                                           const SimilarityMatrix& reference_kernel, const EpisodeConfig& cfg,
                                           std::uint64_t seed, AgentKind kind) {
    if (kernel.size() != scores.size() || reference_kernel.size() != scores.size()) {
        throw std::invalid_argument("run_value_experiment: dimension mismatch");
    }

    Rng rng(seed);
    ValueExperimentResult result;
    result.split = split_random(scores.size(), rng);

    result.alignment_full = alignment(kernel, reference_kernel, full_variant());
    result.alignment_pers = alignment(kernel, reference_kernel, pers_variant(result.split));
    result.alignment_cross = alignment(kernel, reference_kernel, cross_variant(result.split));

    EpisodeConfig run_cfg = cfg;
    AgentConfig agent_cfg = default_agent_config(kind, scores.midpoint());
    if (kind == AgentKind::thompson_baseline) run_cfg.reward_mode = RewardMode::bernoulli;

    Agent agent(prepare_agent_kernel(kernel), agent_cfg);
    result.personalization = run_personalization(agent, scores, result.split.personalization, run_cfg, rng);
    result.personalization.alignment = result.alignment_full;

    agent.freeze();
    result.generalization = run_generalization(agent, scores, result.split.generalization, run_cfg, rng);
    result.generalization.alignment = result.alignment_full;
    return result;
}

// ---------------------------------------------------------------------------

namespace {

// Runs tasks 0..count-1 on `parallelism` workers; each task writes only its
// own slot, so the merge is order-independent.
void parallel_runs(long count, int parallelism, const std::function<void(long)>& task) {
    if (parallelism <= 1 || count <= 1) {
        for (long i = 0; i < count; ++i) task(i);
        return;
    }
    std::atomic<long> next{0};
    auto worker = [&]() {
        for (;;) {
            const long i = next.fetch_add(1);
            if (i >= count) return;
            task(i);
        }
    };
    std::vector<std::thread> threads;
    const int n_threads = std::min<long>(parallelism, count);
    threads.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
}

std::string format_double_label(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

}  // namespace

CampaignResult run_synthetic_campaign(const std::vector<AgentKind>& kinds, long runs_per_kind,
                                      std::uint64_t master_seed, const EpisodeConfig& cfg, int parallelism) {
    CampaignResult campaign;
    const long total = static_cast<long>(kinds.size()) * runs_per_kind;
    campaign.rows.resize(static_cast<std::size_t>(total));

    parallel_runs(total, parallelism, [&](long i) {
        const AgentKind kind = kinds[static_cast<std::size_t>(i / runs_per_kind)];
        RunRow& row = campaign.rows[static_cast<std::size_t>(i)];
        row.run_index = i;
        row.seed = derive_seed(master_seed, static_cast<std::uint64_t>(i));
        row.agent = agent_kind_name(kind);
        row.group = row.agent;
        row.phase = "personalization";
        try {
            // corruption level drawn uniformly over 0..N per run
            Rng k_rng(derive_seed(row.seed, 0x6b));
            const int k = static_cast<int>(k_rng.uniform_int(51));
            const SyntheticResult res = run_synthetic_experiment(kind, k, row.seed, cfg);
            row.label = "k=" + std::to_string(k);
            row.alignment_full = res.alignment;
            row.covariate = res.alignment;
            row.metrics = res.metrics;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    });
    return campaign;
}

CampaignResult run_value_campaign(const std::vector<std::pair<std::string, SimilarityMatrix>>& kernels,
                                  const ValueScores& scores, const SimilarityMatrix& reference_kernel,
                                  long runs_per_kernel, std::uint64_t master_seed, const EpisodeConfig& cfg,
                                  int parallelism, AgentKind kind) {
    CampaignResult campaign;
    const long total = static_cast<long>(kernels.size()) * runs_per_kernel;
    campaign.rows.resize(static_cast<std::size_t>(2 * total));

    parallel_runs(total, parallelism, [&](long i) {
        const auto& [name, kernel] = kernels[static_cast<std::size_t>(i / runs_per_kernel)];
        RunRow base;
        base.run_index = i;
        base.seed = derive_seed(master_seed, static_cast<std::uint64_t>(i));
        base.agent = agent_kind_name(kind);
        base.group = name;
        base.label = "kernel=" + name;
        try {
            const ValueExperimentResult res = run_value_experiment(kernel, scores, reference_kernel, cfg, base.seed, kind);
            base.alignment_full = res.alignment_full;
            base.alignment_pers = res.alignment_pers;
            base.alignment_cross = res.alignment_cross;
            base.covariate = res.alignment_full;

            RunRow pers = base;
            pers.phase = "personalization";
            pers.metrics = res.personalization;
            RunRow gen = base;
            gen.phase = "generalization";
            gen.metrics = res.generalization;
            campaign.rows[static_cast<std::size_t>(2 * i)] = std::move(pers);
            campaign.rows[static_cast<std::size_t>(2 * i + 1)] = std::move(gen);
        } catch (const std::exception& e) {
            base.phase = "personalization";
            base.error = e.what();
            campaign.rows[static_cast<std::size_t>(2 * i)] = base;
            base.phase = "generalization";
            campaign.rows[static_cast<std::size_t>(2 * i + 1)] = std::move(base);
        }
    });
    return campaign;
}

CampaignResult run_interpolation_campaign(int alpha_steps, long runs_per_alpha, int corruption_k,
                                          std::uint64_t master_seed, const EpisodeConfig& cfg, int parallelism,
                                          AgentKind kind, int n) {
    if (alpha_steps < 2) throw std::invalid_argument("run_interpolation_campaign: need at least 2 alpha steps");
    CampaignResult campaign;
    const long total = static_cast<long>(alpha_steps) * runs_per_alpha;
    campaign.rows.resize(static_cast<std::size_t>(2 * total));

    parallel_runs(total, parallelism, [&](long i) {
        const int alpha_idx = static_cast<int>(i / runs_per_alpha);
        const long seed_idx = i % runs_per_alpha;
        const double alpha = static_cast<double>(alpha_idx) / static_cast<double>(alpha_steps - 1);

        RunRow base;
        base.run_index = i;
        // seed depends on the seed index only, so every alpha sees the same
        // family of environments
        base.seed = derive_seed(master_seed, static_cast<std::uint64_t>(seed_idx));
        base.agent = agent_kind_name(kind);
        base.group = "alpha=" + format_double_label(alpha);
        base.label = base.group;
        base.covariate = alpha;
        try {
            Rng rng(base.seed);
            SyntheticInstance inst = make_synthetic_instance(n, corruption_k, rng);
            const SimilarityMatrix interp = interpolate_kernel(inst.corrupted_kernel, inst.true_kernel, alpha);
            const std::uint64_t run_seed = derive_seed(base.seed, 0xA1, static_cast<std::uint64_t>(alpha_idx));
            const ValueExperimentResult res = run_value_experiment(interp, inst.truth, inst.true_kernel, cfg, run_seed, kind);
            base.alignment_full = res.alignment_full;
            base.alignment_pers = res.alignment_pers;
            base.alignment_cross = res.alignment_cross;

            RunRow pers = base;
            pers.phase = "personalization";
            pers.metrics = res.personalization;
            RunRow gen = base;
            gen.phase = "generalization";
            gen.metrics = res.generalization;
            campaign.rows[static_cast<std::size_t>(2 * i)] = std::move(pers);
            campaign.rows[static_cast<std::size_t>(2 * i + 1)] = std::move(gen);
        } catch (const std::exception& e) {
            base.phase = "personalization";
            base.error = e.what();
            campaign.rows[static_cast<std::size_t>(2 * i)] = base;
            base.phase = "generalization";
            campaign.rows[static_cast<std::size_t>(2 * i + 1)] = std::move(base);
        }
    });
    return campaign;
}

CampaignResult run_control_campaign(const ActionSet& actions, long runs_per_cell, std::uint64_t master_seed,
                                    const EpisodeConfig& cfg, int parallelism, AgentKind kind) {
    validate_actions(actions);
    const int n = actions.size();
    const ValueScores len_scores = length_scores(actions);
    const SimilarityMatrix len_kernel = length_kernel(actions);

    struct Cell {
        std::string kernel_name;
        std::string reward_name;
    };
    const std::vector<Cell> cells = {
        {"length", "length"}, {"random", "length"}, {"length", "random"}, {"random", "random"}};

    CampaignResult campaign;
    const long total = static_cast<long>(cells.size()) * runs_per_cell;
    campaign.rows.resize(static_cast<std::size_t>(2 * total));

    parallel_runs(total, parallelism, [&](long i) {
        const Cell& cell = cells[static_cast<std::size_t>(i / runs_per_cell)];
        RunRow base;
        base.run_index = i;
        base.seed = derive_seed(master_seed, static_cast<std::uint64_t>(i));
        base.agent = agent_kind_name(kind);
        base.group = "kernel=" + cell.kernel_name + ";reward=" + cell.reward_name;
        base.label = base.group;
        try {
            Rng rng(base.seed);

            // independent random scores on the same 0-100 scale
            ValueScores random_scores;
            random_scores.value_name = "random";
            random_scores.scale_min = 0.0;
            random_scores.scale_max = 100.0;
            random_scores.bad_threshold = 50.0;
            random_scores.scores.resize(n);
            for (int a = 0; a < n; ++a) random_scores.scores[a] = rng.uniform(0.0, 100.0);

            const ValueScores& reward = (cell.reward_name == "length") ? len_scores : random_scores;
            const SimilarityMatrix agent_kernel =
                (cell.kernel_name == "length") ? len_kernel : score_kernel(random_scores);
            const SimilarityMatrix reference = score_kernel(reward);

            const std::uint64_t run_seed = derive_seed(base.seed, 0xC0);
            const ValueExperimentResult res = run_value_experiment(agent_kernel, reward, reference, cfg, run_seed, kind);
            base.alignment_full = res.alignment_full;
            base.alignment_pers = res.alignment_pers;
            base.alignment_cross = res.alignment_cross;
            base.covariate = res.alignment_full;

            RunRow pers = base;
            pers.phase = "personalization";
            pers.metrics = res.personalization;
            RunRow gen = base;
            gen.phase = "generalization";
            gen.metrics = res.generalization;
            campaign.rows[static_cast<std::size_t>(2 * i)] = std::move(pers);
            campaign.rows[static_cast<std::size_t>(2 * i + 1)] = std::move(gen);
        } catch (const std::exception& e) {
            base.phase = "personalization";
            base.error = e.what();
            campaign.rows[static_cast<std::size_t>(2 * i)] = base;
            base.phase = "generalization";
            campaign.rows[static_cast<std::size_t>(2 * i + 1)] = std::move(base);
        }
    });
    return campaign;
}

const std::vector<std::string>& metric_names() {
    static const std::vector<std::string> names = {"mean_reward", "bad_actions", "non_optimal_actions",
                                                   "unique_actions", "iterations_to_convergence"};
    return names;
}

double metric_value(const RunMetrics& m, const std::string& name) {
    if (name == "mean_reward") return m.mean_reward;
    if (name == "bad_actions") return static_cast<double>(m.bad_actions);
    if (name == "non_optimal_actions") return static_cast<double>(m.non_optimal_actions);
    if (name == "unique_actions") return static_cast<double>(m.unique_actions);
    if (name == "iterations_to_convergence") {
        // censored at the steps taken when the run never converged
        return static_cast<double>(m.iterations_to_convergence.value_or(m.steps));
    }
    throw std::invalid_argument("metric_value: unknown metric " + name);
}

std::vector<SummaryRow> summarize_campaign(const CampaignResult& campaign, int n_shuffles,
                                           std::uint64_t seed) {
    struct Key {
        std::string group, phase;
        bool operator<(const Key& o) const { return std::tie(group, phase) < std::tie(o.group, o.phase); }
    };
    std::map<Key, std::vector<const RunRow*>> cells;
    for (const auto& row : campaign.rows) {
        if (!row.error.empty()) continue;
        cells[{row.group, row.phase}].push_back(&row);
    }

    const std::vector<std::pair<std::string, std::optional<double> RunRow::*>> variants = {
        {"full", &RunRow::alignment_full},
        {"pers", &RunRow::alignment_pers},
        {"cross", &RunRow::alignment_cross},
    };

    std::vector<SummaryRow> out;
    for (const auto& [key, rows] : cells) {
        for (const auto& [variant_name, member] : variants) {
            std::vector<double> x;
            x.reserve(rows.size());
            bool have = true;
            for (const RunRow* r : rows) {
                const auto& v = r->*member;
                if (!v.has_value()) {
                    have = false;
                    break;
                }
                x.push_back(*v);
            }
            if (!have || x.size() < 3) continue;

            for (const auto& metric : metric_names()) {
                std::vector<double> y;
                y.reserve(rows.size());
                for (const RunRow* r : rows) y.push_back(metric_value(r->metrics, metric));

                SummaryRow s;
                s.group = key.group;
                s.phase = key.phase;
                s.metric = metric;
                s.variant = variant_name;
                s.n = static_cast<long>(x.size());
                try {
                    Rng rng(derive_seed(seed, std::hash<std::string>{}(key.group + "|" + key.phase + "|" + metric),
                                        std::hash<std::string>{}(variant_name)));
                    const CorrelationTest test = spearman_with_pvalue(x, y, n_shuffles, rng);
                    s.spearman = test.rho;
                    s.p_value = test.p_value;
                } catch (const std::exception&) {
                    // constant metric or alignment: correlation undefined
                    s.spearman = std::numeric_limits<double>::quiet_NaN();
                    s.p_value = std::numeric_limits<double>::quiet_NaN();
                }
                out.push_back(std::move(s));
            }
        }
    }
    return out;
}

std::vector<BinnedRow> bin_campaign(const CampaignResult& campaign, double bin_width) {
    struct Key {
        std::string group, phase;
        bool operator<(const Key& o) const { return std::tie(group, phase) < std::tie(o.group, o.phase); }
    };
    std::map<Key, std::vector<const RunRow*>> cells;
    for (const auto& row : campaign.rows) {
        if (!row.error.empty() || !row.alignment_full.has_value()) continue;
        cells[{row.group, row.phase}].push_back(&row);
    }

    std::vector<BinnedRow> out;
    for (const auto& [key, rows] : cells) {
        for (const auto& metric : metric_names()) {
            std::vector<std::pair<double, double>> points;
            points.reserve(rows.size());
            for (const RunRow* r : rows) points.emplace_back(*r->alignment_full, metric_value(r->metrics, metric));
            const BinnedSeries series = bin_series(points, bin_width);
            for (const Bin& bin : series.bins) {
                out.push_back({key.group, key.phase, metric, series.bin_width, bin.center, bin.mean,
                               bin.standard_error, bin.count});
            }
        }
    }
    return out;
}

}  // namespace alignsim
