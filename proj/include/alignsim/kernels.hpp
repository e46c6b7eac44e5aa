#pragma once

#include "alignsim/domain.hpp"
#include "alignsim/rng.hpp"

namespace alignsim {

// Score-resampling corruption: k actions get a fresh score drawn uniformly
// from [replacement_low, replacement_high].
struct CorruptionSpec {
    int k = 0;
    double replacement_low = 0.0;
    double replacement_high = 0.0;
};

// Similarity from scalar scores: entries(i,j) = 1 - |s_i - s_j| / range.
SimilarityMatrix score_kernel(const ValueScores& scores);

// Resamples exactly spec.k distinct actions, chosen uniformly at random;
// every other score is untouched.
ValueScores corrupt_scores(const ValueScores& scores, const CorruptionSpec& spec, Rng& rng);

// Elementwise (1 - alpha) * base + alpha * target.
SimilarityMatrix interpolate_kernel(const SimilarityMatrix& base, const SimilarityMatrix& target, double alpha);

// Control-experiment kernel: with M the longest description,
// M - |len(a) - len(b)|, then normalized to unit diagonal.
SimilarityMatrix length_kernel(const ActionSet& actions);

// Control-experiment reward: description lengths rescaled to [0, 100].
ValueScores length_scores(const ActionSet& actions);

}  // namespace alignsim
