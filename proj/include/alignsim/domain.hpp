#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "alignsim/rng.hpp"

namespace alignsim {

// Ordered catalog of textual action descriptions; the index is the action id.
struct ActionSet {
    std::vector<std::string> descriptions;

    int size() const { return static_cast<int>(descriptions.size()); }
};

// Per-action scalar scores for one value dimension.
struct ValueScores {
    std::string value_name;
    Eigen::VectorXd scores;
    double scale_min = 0.0;
    double scale_max = 100.0;
    double bad_threshold = 50.0;

    int size() const { return static_cast<int>(scores.size()); }
    double midpoint() const { return 0.5 * (scale_min + scale_max); }
    double range() const { return scale_max - scale_min; }
};

enum class Provenance { synthetic, file, derived };

// Symmetric pairwise-similarity matrix; the agent's frozen representation.
struct SimilarityMatrix {
    Eigen::MatrixXd entries;
    Provenance provenance = Provenance::synthetic;

    int size() const { return static_cast<int>(entries.rows()); }
};

// Disjoint halves of the action catalog; ids are kept sorted.
struct SplitSpec {
    std::vector<int> personalization;
    std::vector<int> generalization;
};

// Per-experiment outcome record.
struct RunMetrics {
    double mean_reward = 0.0;
    long bad_actions = 0;
    long non_optimal_actions = 0;
    std::optional<long> iterations_to_convergence;
    long unique_actions = 0;
    bool converged = false;
    std::optional<double> alignment;
    long steps = 0;
};

void validate_actions(const ActionSet& actions);
void validate_scores(const ValueScores& scores);

// Empty result means all SimilarityMatrix invariants hold. Asymmetry is
// reported with the max |entries(i,j) - entries(j,i)|.
std::vector<std::string> validate_kernel(const SimilarityMatrix& m);

// Eigenvalue clipping: every eigenvalue below `floor` is raised to `floor`
// and the matrix is rebuilt and re-symmetrized. Inputs whose smallest
// eigenvalue is already >= floor pass through unchanged.
SimilarityMatrix nearest_psd(const SimilarityMatrix& m, double floor = 1e-8);

// Affine rescale of all entries to [0, 1] by the global min/max, then the
// diagonal is overwritten with exactly 1. Constant matrices map to all-ones.
SimilarityMatrix normalize_unit_diagonal(const SimilarityMatrix& m);

// Validation + normalization + PSD repair; what every kernel goes through
// before it is handed to an agent.
SimilarityMatrix prepare_agent_kernel(const SimilarityMatrix& m, double floor = 1e-8);

double min_eigenvalue(const SimilarityMatrix& m);

// Uniformly random partition into floor(n/2) personalization ids and the
// rest; deterministic given the rng state.
SplitSpec split_random(int n, Rng& rng);

}  // namespace alignsim
