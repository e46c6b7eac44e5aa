#include "alignsim/agents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace alignsim {

std::string agent_kind_name(AgentKind kind) {
    switch (kind) {
        case AgentKind::gp: return "gp";
        case AgentKind::kernel_ridge: return "kernel_ridge";
        case AgentKind::svr: return "svr";
        case AgentKind::thompson_baseline: return "thompson_baseline";
    }
    throw std::logic_error("agent_kind_name: unknown kind");
}

AgentKind agent_kind_from_name(const std::string& name) {
    if (name == "gp") return AgentKind::gp;
    if (name == "kernel_ridge" || name == "kr") return AgentKind::kernel_ridge;
    if (name == "svr") return AgentKind::svr;
    if (name == "thompson_baseline" || name == "thompson") return AgentKind::thompson_baseline;
    throw std::invalid_argument("unknown agent kind: " + name);
}

double env_success_probability(double score, const ValueScores& scores) {
    const double range = scores.range();
    if (!(range > 0.0)) throw std::invalid_argument("env_success_probability: degenerate scale");
    const double z = (score - scores.midpoint()) / (range / 4.0);
    return 1.0 / (1.0 + std::exp(-z));
}

Agent::Agent(SimilarityMatrix kernel, AgentConfig config)
    : kernel_(std::move(kernel)), config_(config) {
    const auto violations = validate_kernel(kernel_);
    if (!violations.empty()) {
        throw std::invalid_argument("Agent: invalid kernel: " + violations.front());
    }
    const int n = kernel_.size();
    store_.counts.assign(static_cast<std::size_t>(n), 0);
    store_.reward_sums.assign(static_cast<std::size_t>(n), 0.0);
    successes_.assign(static_cast<std::size_t>(n), 0);
    prediction_cache_.assign(static_cast<std::size_t>(n), {});
    prediction_valid_.assign(static_cast<std::size_t>(n), 0);
    svr_state_.bias = 0.0;
}

void Agent::invalidate() {
    fit_valid_ = false;
    std::fill(prediction_valid_.begin(), prediction_valid_.end(), 0);
}

void Agent::observe(int action, double reward) {
    if (frozen_) throw std::logic_error("observe: agent is frozen");
    if (action < 0 || action >= kernel_.size()) throw std::invalid_argument("observe: action out of range");
    if (!std::isfinite(reward)) throw std::invalid_argument("observe: non-finite reward");

    store_.log.push_back({store_.total(), action, reward});
    store_.counts[static_cast<std::size_t>(action)] += 1;
    store_.reward_sums[static_cast<std::size_t>(action)] += reward;
    if (reward >= 0.5) successes_[static_cast<std::size_t>(action)] += 1;
    invalidate();
}

double Agent::centering_constant() const {
    if (!config_.center_rewards || store_.total() == 0) return 0.0;
    double sum = 0.0;
    for (double s : store_.reward_sums) sum += s;
    return sum / static_cast<double>(store_.total());
}

void Agent::refit_gp_like() {
    observed_ids_.clear();
    for (int a = 0; a < kernel_.size(); ++a) {
        if (store_.counts[static_cast<std::size_t>(a)] > 0) observed_ids_.push_back(a);
    }
    const int d = static_cast<int>(observed_ids_.size());
    if (d == 0) return;

    const double center = centering_constant();
    Eigen::VectorXd y(d);
    for (int i = 0; i < d; ++i) y[i] = store_.mean_reward(observed_ids_[static_cast<std::size_t>(i)]) - center;

    const double scale = config_.exploration_variance;
    Eigen::MatrixXd K(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) K(i, j) = kernel_.entries(observed_ids_[static_cast<std::size_t>(i)], observed_ids_[static_cast<std::size_t>(j)]);

    if (config_.kind == AgentKind::gp) {
        K *= scale;
        double jitter = config_.jitter;
        for (int attempt = 0;; ++attempt) {
            Eigen::MatrixXd sys = K;
            for (int i = 0; i < d; ++i) {
                sys(i, i) += config_.noise_variance / static_cast<double>(store_.counts[static_cast<std::size_t>(observed_ids_[static_cast<std::size_t>(i)])]) + jitter;
            }
            factor_.compute(sys);
            if (factor_.info() == Eigen::Success) break;
            if (attempt >= 6) throw std::runtime_error("gp fit: Cholesky failed after jitter escalation");
            jitter = std::max(jitter, 1e-12) * 10.0;
        }
    } else {  // kernel_ridge
        K.diagonal().array() += config_.ridge_lambda;
        factor_.compute(K);
        if (factor_.info() != Eigen::Success) throw std::runtime_error("kernel ridge fit: Cholesky failed");
    }
    alpha_ = factor_.solve(y);
}

namespace {

// One-dimensional exact objective change for the pairwise SVR update
// beta' = beta + delta * (e_i - e_j).
double pair_objective_delta(double delta, double eta, double gi, double gj, double eps, double bi, double bj) {
    return 0.5 * eta * delta * delta + delta * (gi - gj) +
           eps * (std::abs(bi + delta) - std::abs(bi) + std::abs(bj - delta) - std::abs(bj));
}

}  // namespace

void Agent::refit_svr() {
    observed_ids_.clear();
    for (int a = 0; a < kernel_.size(); ++a) {
        if (store_.counts[static_cast<std::size_t>(a)] > 0) observed_ids_.push_back(a);
    }
    const int d = static_cast<int>(observed_ids_.size());
    if (d == 0) {
        svr_state_.action_ids.clear();
        svr_state_.beta.resize(0);
        svr_state_.bias = 0.0;
        svr_state_.converged = true;
        svr_state_.kkt_violation = 0.0;
        return;
    }

    const double center = centering_constant();
    const double C = config_.svr_c;
    const double eps = config_.svr_epsilon;

    Eigen::VectorXd y(d);
    Eigen::MatrixXd Q(d, d);
    for (int i = 0; i < d; ++i) {
        y[i] = store_.mean_reward(observed_ids_[static_cast<std::size_t>(i)]) - center;
        for (int j = 0; j < d; ++j) Q(i, j) = kernel_.entries(observed_ids_[static_cast<std::size_t>(i)], observed_ids_[static_cast<std::size_t>(j)]);
    }

    // Warm start from the previous fit, matched by action id. The observed
    // set only grows, so every previous coefficient carries over and the
    // sum constraint stays satisfied.
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(d);
    if (svr_state_.beta.size() == static_cast<Eigen::Index>(svr_state_.action_ids.size())) {
        std::size_t prev = 0;
        for (int i = 0; i < d; ++i) {
            while (prev < svr_state_.action_ids.size() && svr_state_.action_ids[prev] < observed_ids_[static_cast<std::size_t>(i)]) ++prev;
            if (prev < svr_state_.action_ids.size() && svr_state_.action_ids[prev] == observed_ids_[static_cast<std::size_t>(i)]) {
                beta[i] = std::clamp(svr_state_.beta[static_cast<Eigen::Index>(prev)], -C, C);
            }
        }
    }

    Eigen::VectorXd G = Q * beta - y;

    const double snap = 1e-12 * std::max(1.0, C);
    auto nu_interval = [&](int i, double& lo, double& hi) {
        const double b = beta[i];
        if (b >= C - snap) {
            lo = -std::numeric_limits<double>::infinity();
            hi = -G[i] - eps;
        } else if (b > snap) {
            lo = hi = -G[i] - eps;
        } else if (b >= -snap) {
            lo = -G[i] - eps;
            hi = -G[i] + eps;
        } else if (b > -C + snap) {
            lo = hi = -G[i] + eps;
        } else {
            lo = -G[i] + eps;
            hi = std::numeric_limits<double>::infinity();
        }
    };

    int pass = 0;
    double violation = 0.0;
    bool converged = false;
    for (; pass < config_.svr_max_passes; ++pass) {
        int i_up = -1, j_dn = -1;
        double max_lo = -std::numeric_limits<double>::infinity();
        double min_hi = std::numeric_limits<double>::infinity();
        for (int i = 0; i < d; ++i) {
            double lo, hi;
            nu_interval(i, lo, hi);
            if (lo > max_lo) {
                max_lo = lo;
                i_up = i;
            }
            if (hi < min_hi) {
                min_hi = hi;
                j_dn = i;
            }
        }
        violation = max_lo - min_hi;
        if (violation <= config_.svr_tolerance) {
            converged = true;
            svr_state_.bias = 0.5 * (max_lo + min_hi);
            break;
        }

        // Optimize the maximal violating pair exactly. The line objective is
        // convex piecewise quadratic with kinks where a coefficient crosses 0.
        const int i = j_dn, j = i_up;  // move mass from the high-nu side to the low-nu side
        const double lower = std::max(-C - beta[i], beta[j] - C);
        const double upper = std::min(C - beta[i], beta[j] + C);
        const double eta = Q(i, i) + Q(j, j) - 2.0 * Q(i, j);

        std::vector<double> pts{lower, upper};
        if (-beta[i] > lower && -beta[i] < upper) pts.push_back(-beta[i]);
        if (beta[j] > lower && beta[j] < upper) pts.push_back(beta[j]);
        std::sort(pts.begin(), pts.end());
        std::vector<double> candidates = pts;
        if (eta > 0.0) {
            for (std::size_t s = 0; s + 1 < pts.size(); ++s) {
                const double mid = 0.5 * (pts[s] + pts[s + 1]);
                const double si = (beta[i] + mid > 0.0) ? 1.0 : ((beta[i] + mid < 0.0) ? -1.0 : 0.0);
                const double sj = (beta[j] - mid > 0.0) ? 1.0 : ((beta[j] - mid < 0.0) ? -1.0 : 0.0);
                const double stat = -(G[i] - G[j] + eps * (si + sj)) / eta;
                if (stat > pts[s] && stat < pts[s + 1]) candidates.push_back(stat);
            }
        }

        double best_delta = 0.0;
        double best_obj = 0.0;
        for (double delta : candidates) {
            const double obj = pair_objective_delta(delta, eta, G[i], G[j], eps, beta[i], beta[j]);
            if (obj < best_obj) {
                best_obj = obj;
                best_delta = delta;
            }
        }
        if (best_delta == 0.0) {
            // maximal violating pair cannot improve; stop rather than loop
            svr_state_.bias = 0.5 * (max_lo + min_hi);
            break;
        }

        beta[i] += best_delta;
        beta[j] -= best_delta;
        if (std::abs(beta[i]) < snap) beta[i] = 0.0;
        if (std::abs(beta[j]) < snap) beta[j] = 0.0;
        beta[i] = std::clamp(beta[i], -C, C);
        beta[j] = std::clamp(beta[j], -C, C);
        G += best_delta * (Q.col(i) - Q.col(j));
    }
    if (!converged && pass == config_.svr_max_passes) {
        // non-convergence is flagged, the fit is still returned
        double max_lo = -std::numeric_limits<double>::infinity();
        double min_hi = std::numeric_limits<double>::infinity();
        for (int i = 0; i < d; ++i) {
            double lo, hi;
            nu_interval(i, lo, hi);
            max_lo = std::max(max_lo, lo);
            min_hi = std::min(min_hi, hi);
        }
        violation = max_lo - min_hi;
        svr_state_.bias = 0.5 * (max_lo + min_hi);
    }

    svr_state_.action_ids = observed_ids_;
    svr_state_.beta = beta;
    svr_state_.converged = converged;
    svr_state_.kkt_violation = std::max(0.0, violation);
    svr_state_.passes = pass;
}

void Agent::ensure_fit() {
    if (fit_valid_) return;
    switch (config_.kind) {
        case AgentKind::gp:
        case AgentKind::kernel_ridge:
            refit_gp_like();
            break;
        case AgentKind::svr:
            refit_svr();
            break;
        case AgentKind::thompson_baseline:
            break;
    }
    fit_valid_ = true;
}

Prediction Agent::compute_prediction(int target) {
    const double scale = config_.exploration_variance;

    if (config_.kind == AgentKind::thompson_baseline) {
        const double s = static_cast<double>(successes_[static_cast<std::size_t>(target)]);
        const double f = static_cast<double>(store_.counts[static_cast<std::size_t>(target)]) - s;
        const double a = 1.0 + s;
        const double b = 1.0 + f;
        Prediction p;
        p.mean = a / (a + b);
        p.standard_deviation = std::sqrt(a * b / ((a + b) * (a + b) * (a + b + 1.0)));
        return p;
    }

    ensure_fit();
    const int d = static_cast<int>(observed_ids_.size());
    if (d == 0) {
        Prediction p;
        p.mean = config_.prior_mean;
        if (config_.kind == AgentKind::gp) {
            p.standard_deviation = std::sqrt(std::max(0.0, scale * kernel_.entries(target, target)));
        } else {
            p.standard_deviation = std::sqrt(scale);
        }
        return p;
    }

    const double center = centering_constant();
    Prediction p;

    if (config_.kind == AgentKind::gp) {
        Eigen::VectorXd k_star(d);
        for (int i = 0; i < d; ++i) k_star[i] = scale * kernel_.entries(observed_ids_[static_cast<std::size_t>(i)], target);
        p.mean = center + k_star.dot(alpha_);
        const Eigen::VectorXd v = factor_.solve(k_star);
        const double var = scale * kernel_.entries(target, target) - k_star.dot(v);
        p.standard_deviation = std::sqrt(std::max(0.0, var));
    } else if (config_.kind == AgentKind::kernel_ridge) {
        Eigen::VectorXd k_star(d);
        for (int i = 0; i < d; ++i) k_star[i] = kernel_.entries(observed_ids_[static_cast<std::size_t>(i)], target);
        p.mean = center + k_star.dot(alpha_);
        const double count = static_cast<double>(store_.counts[static_cast<std::size_t>(target)]);
        p.standard_deviation = std::sqrt(scale / (1.0 + count));
    } else {  // svr
        double f = svr_state_.bias;
        for (int i = 0; i < d; ++i) f += svr_state_.beta[i] * kernel_.entries(observed_ids_[static_cast<std::size_t>(i)], target);
        p.mean = center + f;
        const double count = static_cast<double>(store_.counts[static_cast<std::size_t>(target)]);
        p.standard_deviation = std::sqrt(scale / (1.0 + count));
    }
    return p;
}

Prediction Agent::predict_one(int target) {
    if (target < 0 || target >= kernel_.size()) throw std::invalid_argument("predict: target out of range");
    if (prediction_valid_[static_cast<std::size_t>(target)]) return prediction_cache_[static_cast<std::size_t>(target)];
    const Prediction p = compute_prediction(target);
    prediction_cache_[static_cast<std::size_t>(target)] = p;
    prediction_valid_[static_cast<std::size_t>(target)] = 1;
    return p;
}

std::vector<Prediction> Agent::predict(std::span<const int> targets) {
    std::vector<Prediction> out;
    out.reserve(targets.size());
    for (int t : targets) out.push_back(predict_one(t));
    return out;
}

int Agent::select_action(std::span<const int> available, Rng& rng) {
    if (available.empty()) throw std::invalid_argument("select_action: empty available set");

    double best = -std::numeric_limits<double>::infinity();
    std::vector<int> best_set;
    for (int a : available) {
        double draw;
        if (config_.kind == AgentKind::thompson_baseline) {
            const double s = static_cast<double>(successes_[static_cast<std::size_t>(a)]);
            const double f = static_cast<double>(store_.counts[static_cast<std::size_t>(a)]) - s;
            draw = rng.beta(1.0 + s, 1.0 + f);
        } else {
            const Prediction p = predict_one(a);
            draw = rng.normal(p.mean, p.standard_deviation);
        }
        if (draw > best) {
            best = draw;
            best_set.assign(1, a);
        } else if (draw == best) {
            best_set.push_back(a);
        }
    }
    if (best_set.size() == 1) return best_set.front();
    return best_set[static_cast<std::size_t>(rng.uniform_index(static_cast<int>(best_set.size())))];
}

SvrFit Agent::svr_fit() {
    if (config_.kind != AgentKind::svr) throw std::logic_error("svr_fit: agent is not an svr agent");
    if (store_.total() == 0) throw std::logic_error("svr_fit: needs at least one observation");
    ensure_fit();
    return svr_state_;
}

}  // namespace alignsim
