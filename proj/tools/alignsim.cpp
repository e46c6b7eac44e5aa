#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <thread>

#include "alignsim/io.hpp"
#include "alignsim/simulation.hpp"
#include "alignsim/theory.hpp"

namespace {

using namespace alignsim;

int default_parallelism() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void print_summary(const std::vector<SummaryRow>& summaries) {
    std::printf("%-28s %-16s %-26s %-6s %10s %10s %8s\n", "group", "phase", "metric", "corr", "spearman",
                "p_value", "n");
    for (const auto& s : summaries) {
        std::printf("%-28s %-16s %-26s %-6s %10.4f %10.5f %8ld\n", s.group.c_str(), s.phase.c_str(),
                    s.metric.c_str(), s.variant.c_str(), s.spearman, s.p_value, s.n);
    }
}

void emit_campaign(const CampaignResult& campaign, const std::string& out_dir, int shuffles,
                   std::uint64_t seed) {
    const auto summaries = summarize_campaign(campaign, shuffles, seed);
    const auto binned = bin_campaign(campaign);
    emit_results(campaign, summaries, binned, out_dir);
    print_summary(summaries);
    long failures = 0;
    for (const auto& r : campaign.rows) {
        if (!r.error.empty()) ++failures;
    }
    std::printf("wrote %s/runs.csv (%zu rows, %ld failed), summary.csv, binned.tsv\n", out_dir.c_str(),
                campaign.rows.size(), failures);
}

std::vector<AgentKind> parse_agent_list(const std::string& agent) {
    if (agent == "all") return {AgentKind::gp, AgentKind::kernel_ridge, AgentKind::svr};
    return {agent_kind_from_name(agent)};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kernel-bandit simulations of representational alignment and value learning"};
    app.require_subcommand(1);

    int parallelism = default_parallelism();
    app.add_option("--parallelism", parallelism, "worker threads for campaigns (results are thread-count independent)");

    // --- synthetic ------------------------------------------------------
    auto* synthetic = app.add_subcommand("synthetic", "corruption campaign over synthetic score environments");
    std::string syn_agent = "all";
    long syn_runs = 600;
    std::uint64_t syn_seed = 1;
    std::string syn_out = "out/synthetic";
    int syn_shuffles = 10000;
    EpisodeConfig syn_cfg = synthetic_episode_config();
    synthetic->add_option("--agent", syn_agent, "gp | kernel_ridge | svr | thompson_baseline | all")->capture_default_str();
    synthetic->add_option("--runs", syn_runs, "runs per agent kind")->capture_default_str();
    synthetic->add_option("--seed", syn_seed, "master seed")->capture_default_str();
    synthetic->add_option("--out", syn_out, "output directory")->capture_default_str();
    synthetic->add_option("--shuffles", syn_shuffles, "permutation-test shuffles")->capture_default_str();
    synthetic->add_option("--max-steps", syn_cfg.max_steps, "step cap per run")->capture_default_str();
    synthetic->add_option("--subset", syn_cfg.subset_size, "actions offered per step")->capture_default_str();

    // --- human-values ---------------------------------------------------
    auto* values = app.add_subcommand("human-values", "per-value campaign over kernel files");
    std::string hv_actions = "data/actions.csv";
    std::string hv_scores;
    std::string hv_value = "morality";
    std::string hv_kernels_dir;
    std::string hv_human_kernel;
    std::string hv_agent = "kernel_ridge";
    long hv_runs = 100;
    std::uint64_t hv_seed = 1;
    std::string hv_out = "out/human-values";
    int hv_shuffles = 10000;
    ScoreScale hv_scale;
    EpisodeConfig hv_cfg;
    values->add_option("--actions", hv_actions, "actions CSV")->capture_default_str();
    values->add_option("--scores", hv_scores, "scores CSV (action_id,value_name,score)")->required();
    values->add_option("--value", hv_value, "value name to select from the scores file")->capture_default_str();
    values->add_option("--kernels-dir", hv_kernels_dir, "directory of kernel CSV files, one per model")->required();
    values->add_option("--human-kernel", hv_human_kernel, "reference kernel CSV for alignment")->required();
    values->add_option("--agent", hv_agent, "agent kind")->capture_default_str();
    values->add_option("--runs", hv_runs, "runs per kernel")->capture_default_str();
    values->add_option("--seed", hv_seed, "master seed")->capture_default_str();
    values->add_option("--out", hv_out, "output directory")->capture_default_str();
    values->add_option("--shuffles", hv_shuffles, "permutation-test shuffles")->capture_default_str();
    values->add_option("--scale-min", hv_scale.scale_min, "score scale minimum")->capture_default_str();
    values->add_option("--scale-max", hv_scale.scale_max, "score scale maximum")->capture_default_str();
    values->add_option("--bad-threshold", hv_scale.bad_threshold, "bad-action threshold")->capture_default_str();
    values->add_option("--max-steps", hv_cfg.max_steps, "steps per phase")->capture_default_str();

    // --- theory-check ---------------------------------------------------
    auto* theory_cmd = app.add_subcommand("theory-check", "closed-form oracle suite; nonzero exit on any violation");
    long th_specs = 10000;
    long th_trials = 1000000;
    std::uint64_t th_seed = 7;
    theory_cmd->add_option("--specs", th_specs, "random spec count for the analytic checks")->capture_default_str();
    theory_cmd->add_option("--chebyshev-trials", th_trials, "Monte Carlo trials per grid cell")->capture_default_str();
    theory_cmd->add_option("--seed", th_seed, "rng seed")->capture_default_str();

    // --- interpolate ----------------------------------------------------
    auto* interp = app.add_subcommand("interpolate", "alpha sweep from a corrupted kernel toward the ground-truth kernel");
    int in_steps = 11;
    long in_runs = 100;
    int in_corrupt_k = 50;
    std::string in_agent = "kernel_ridge";
    std::uint64_t in_seed = 1;
    std::string in_out = "out/interpolate";
    int in_shuffles = 10000;
    EpisodeConfig in_cfg;
    interp->add_option("--steps", in_steps, "number of alpha points on [0, 1]")->capture_default_str();
    interp->add_option("--runs", in_runs, "runs per alpha")->capture_default_str();
    interp->add_option("--corrupt-k", in_corrupt_k, "corruption level of the starting kernel")->capture_default_str();
    interp->add_option("--agent", in_agent, "agent kind")->capture_default_str();
    interp->add_option("--seed", in_seed, "master seed")->capture_default_str();
    interp->add_option("--out", in_out, "output directory")->capture_default_str();
    interp->add_option("--shuffles", in_shuffles, "permutation-test shuffles")->capture_default_str();
    interp->add_option("--max-steps", in_cfg.max_steps, "steps per phase")->capture_default_str();

    // --- control --------------------------------------------------------
    auto* control = app.add_subcommand("control", "length kernel/reward cross grid");
    std::string ct_actions = "data/actions.csv";
    std::string ct_agent = "kernel_ridge";
    long ct_runs = 100;
    std::uint64_t ct_seed = 1;
    std::string ct_out = "out/control";
    int ct_shuffles = 10000;
    EpisodeConfig ct_cfg;
    control->add_option("--actions", ct_actions, "actions CSV")->capture_default_str();
    control->add_option("--agent", ct_agent, "agent kind")->capture_default_str();
    control->add_option("--runs", ct_runs, "runs per grid cell")->capture_default_str();
    control->add_option("--seed", ct_seed, "master seed")->capture_default_str();
    control->add_option("--out", ct_out, "output directory")->capture_default_str();
    control->add_option("--shuffles", ct_shuffles, "permutation-test shuffles")->capture_default_str();
    control->add_option("--max-steps", ct_cfg.max_steps, "steps per phase")->capture_default_str();

    // --- align ------------------------------------------------------------
    auto* align = app.add_subcommand("align", "print the three alignment variants between two kernel files");
    std::string al_a, al_b;
    std::uint64_t al_split_seed = 42;
    align->add_option("kernel_a", al_a, "first kernel CSV")->required();
    align->add_option("kernel_b", al_b, "second kernel CSV")->required();
    align->add_option("--split-seed", al_split_seed, "seed for the pers/cross split")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*synthetic) {
            const CampaignResult campaign =
                run_synthetic_campaign(parse_agent_list(syn_agent), syn_runs, syn_seed, syn_cfg, parallelism);
            emit_campaign(campaign, syn_out, syn_shuffles, syn_seed);
        } else if (*values) {
            const ActionSet actions = parse_actions(hv_actions);
            const ValueScores scores = parse_scores(hv_scores, hv_value, hv_scale, &actions);

            std::vector<std::string> warnings;
            const SimilarityMatrix human = parse_kernel(hv_human_kernel, &warnings);
            if (human.size() != actions.size()) {
                throw std::invalid_argument("human kernel dimension " + std::to_string(human.size()) +
                                            " does not match action count " + std::to_string(actions.size()));
            }

            std::vector<std::pair<std::string, SimilarityMatrix>> kernels;
            std::vector<std::filesystem::path> files;
            for (const auto& entry : std::filesystem::directory_iterator(hv_kernels_dir)) {
                if (entry.path().extension() == ".csv") files.push_back(entry.path());
            }
            std::sort(files.begin(), files.end());
            for (const auto& file : files) {
                SimilarityMatrix m = parse_kernel(file.string(), &warnings);
                if (m.size() != actions.size()) {
                    throw std::invalid_argument(file.string() + ": dimension does not match action count");
                }
                kernels.emplace_back(file.stem().string(), std::move(m));
            }
            if (kernels.empty()) throw std::invalid_argument("no kernel CSV files in " + hv_kernels_dir);
            for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";

            const CampaignResult campaign =
                run_value_campaign(kernels, scores, human, hv_runs, hv_seed, hv_cfg, parallelism,
                                   agent_kind_from_name(hv_agent));
            emit_campaign(campaign, hv_out, hv_shuffles, hv_seed);
        } else if (*theory_cmd) {
            const auto report = theory::run_theory_checks(th_specs, th_trials, th_seed);
            for (const auto& line : report.lines) {
                std::printf("[%s] %-42s %s\n", line.pass ? "PASS" : "FAIL", line.name.c_str(), line.detail.c_str());
            }
            if (!report.all_pass) {
                std::printf("theory-check: FAIL\n");
                return 2;
            }
            std::printf("theory-check: all checks passed\n");
        } else if (*interp) {
            const CampaignResult campaign = run_interpolation_campaign(
                in_steps, in_runs, in_corrupt_k, in_seed, in_cfg, parallelism, agent_kind_from_name(in_agent));
            emit_campaign(campaign, in_out, in_shuffles, in_seed);

            // aggregate generalization reward per alpha, then rank-correlate
            std::map<double, std::pair<double, long>> by_alpha;
            for (const auto& r : campaign.rows) {
                if (r.phase != "generalization" || !r.error.empty()) continue;
                auto& slot = by_alpha[r.covariate];
                slot.first += r.metrics.mean_reward;
                slot.second += 1;
            }
            std::vector<double> alphas, means;
            for (const auto& [alpha, slot] : by_alpha) {
                alphas.push_back(alpha);
                means.push_back(slot.first / static_cast<double>(slot.second));
            }
            if (alphas.size() >= 2) {
                std::printf("spearman(alpha, mean generalization reward over %ld runs/alpha) = %.4f\n", in_runs,
                            spearman(alphas, means));
            }
        } else if (*control) {
            const ActionSet actions = parse_actions(ct_actions);
            const CampaignResult campaign = run_control_campaign(actions, ct_runs, ct_seed, ct_cfg, parallelism,
                                                                 agent_kind_from_name(ct_agent));
            emit_campaign(campaign, ct_out, ct_shuffles, ct_seed);
        } else if (*align) {
            std::vector<std::string> warnings;
            const SimilarityMatrix a = parse_kernel(al_a, &warnings);
            const SimilarityMatrix b = parse_kernel(al_b, &warnings);
            for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
            if (a.size() != b.size()) throw std::invalid_argument("kernel dimensions differ");

            Rng rng(al_split_seed);
            const SplitSpec split = split_random(a.size(), rng);
            std::printf("full:  %.6f\n", alignment(a, b, full_variant()));
            std::printf("pers:  %.6f\n", alignment(a, b, pers_variant(split)));
            std::printf("cross: %.6f\n", alignment(a, b, cross_variant(split)));
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
