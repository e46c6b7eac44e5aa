#include "alignsim/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace alignsim {

SimilarityMatrix score_kernel(const ValueScores& scores) {
    validate_scores(scores);
    const double range = scores.range();
    if (!(range > 0.0)) throw std::invalid_argument("score_kernel: degenerate scale");

    const int n = scores.size();
    SimilarityMatrix m;
    m.provenance = Provenance::derived;
    m.entries.resize(n, n);
    for (int i = 0; i < n; ++i) {
        m.entries(i, i) = 1.0;
        for (int j = i + 1; j < n; ++j) {
            const double s = 1.0 - std::abs(scores.scores[i] - scores.scores[j]) / range;
            m.entries(i, j) = s;
            m.entries(j, i) = s;
        }
    }
    return m;
}

ValueScores corrupt_scores(const ValueScores& scores, const CorruptionSpec& spec, Rng& rng) {
    const int n = scores.size();
    if (spec.k < 0 || spec.k > n) throw std::invalid_argument("corrupt_scores: k outside [0, N]");
    if (spec.replacement_low < scores.scale_min || spec.replacement_high > scores.scale_max ||
        spec.replacement_low > spec.replacement_high) {
        throw std::invalid_argument("corrupt_scores: replacement bounds outside value scale");
    }

    ValueScores out = scores;
    if (spec.k == 0) return out;

    std::vector<int> chosen = rng.sample_without_replacement(n, spec.k);
    std::sort(chosen.begin(), chosen.end());
    for (int id : chosen) {
        out.scores[id] = rng.uniform(spec.replacement_low, spec.replacement_high);
    }
    return out;
}

SimilarityMatrix interpolate_kernel(const SimilarityMatrix& base, const SimilarityMatrix& target, double alpha) {
    if (base.size() != target.size()) throw std::invalid_argument("interpolate_kernel: dimension mismatch");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("interpolate_kernel: alpha outside [0, 1]");
    if (alpha == 0.0) return base;
    if (alpha == 1.0) return target;

    SimilarityMatrix out;
    out.provenance = Provenance::derived;
    out.entries = (1.0 - alpha) * base.entries + alpha * target.entries;
    return out;
}

SimilarityMatrix length_kernel(const ActionSet& actions) {
    validate_actions(actions);
    const int n = actions.size();
    std::vector<double> lens(static_cast<std::size_t>(n));
    double max_len = 0.0;
    for (int i = 0; i < n; ++i) {
        lens[static_cast<std::size_t>(i)] = static_cast<double>(actions.descriptions[static_cast<std::size_t>(i)].size());
        max_len = std::max(max_len, lens[static_cast<std::size_t>(i)]);
    }

    SimilarityMatrix raw;
    raw.provenance = Provenance::derived;
    raw.entries.resize(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            const double s = max_len - std::abs(lens[static_cast<std::size_t>(i)] - lens[static_cast<std::size_t>(j)]);
            raw.entries(i, j) = s;
            raw.entries(j, i) = s;
        }
    }
    return normalize_unit_diagonal(raw);
}

ValueScores length_scores(const ActionSet& actions) {
    validate_actions(actions);
    const int n = actions.size();
    Eigen::VectorXd lens(n);
    for (int i = 0; i < n; ++i) {
        lens[i] = static_cast<double>(actions.descriptions[static_cast<std::size_t>(i)].size());
    }
    const double lo = lens.minCoeff();
    const double hi = lens.maxCoeff();
    if (!(hi > lo)) throw std::invalid_argument("length_scores: all descriptions have equal length");

    ValueScores out;
    out.value_name = "length";
    out.scores = (lens.array() - lo) / (hi - lo) * 100.0;
    out.scale_min = 0.0;
    out.scale_max = 100.0;
    out.bad_threshold = 50.0;
    return out;
}

}  // namespace alignsim
