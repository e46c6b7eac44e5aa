#include "alignsim/domain.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace alignsim {

namespace {

bool blank_after_trim(const std::string& s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

}  // namespace

void validate_actions(const ActionSet& actions) {
    if (actions.descriptions.empty()) throw std::invalid_argument("ActionSet: no actions");
    for (int i = 0; i < actions.size(); ++i) {
        if (blank_after_trim(actions.descriptions[static_cast<std::size_t>(i)])) {
            throw std::invalid_argument("ActionSet: empty description for id " + std::to_string(i));
        }
    }
}

void validate_scores(const ValueScores& scores) {
    if (!(scores.scale_min < scores.scale_max)) {
        throw std::invalid_argument("ValueScores: scale_min must be < scale_max");
    }
    if (scores.bad_threshold < scores.scale_min || scores.bad_threshold > scores.scale_max) {
        throw std::invalid_argument("ValueScores: bad_threshold outside scale");
    }
    for (int i = 0; i < scores.size(); ++i) {
        const double s = scores.scores[i];
        if (!std::isfinite(s) || s < scores.scale_min || s > scores.scale_max) {
            throw std::invalid_argument("ValueScores: score " + std::to_string(s) + " for action " +
                                        std::to_string(i) + " outside [" + std::to_string(scores.scale_min) +
                                        ", " + std::to_string(scores.scale_max) + "]");
        }
    }
}

std::vector<std::string> validate_kernel(const SimilarityMatrix& m) {
    std::vector<std::string> violations;
    const auto& e = m.entries;
    if (e.rows() != e.cols()) {
        violations.push_back("not square: " + std::to_string(e.rows()) + "x" + std::to_string(e.cols()));
        return violations;
    }
    if (e.rows() == 0) {
        violations.push_back("empty matrix");
        return violations;
    }

    bool finite = true;
    for (int i = 0; i < e.rows() && finite; ++i) {
        for (int j = 0; j < e.cols(); ++j) {
            if (!std::isfinite(e(i, j))) {
                violations.push_back("non-finite entry at (" + std::to_string(i) + ", " + std::to_string(j) + ")");
                finite = false;
                break;
            }
        }
    }
    if (!finite) return violations;

    double max_asym = 0.0;
    for (int i = 0; i < e.rows(); ++i) {
        for (int j = i + 1; j < e.cols(); ++j) {
            if (e(i, j) != e(j, i)) max_asym = std::max(max_asym, std::abs(e(i, j) - e(j, i)));
        }
    }
    if (max_asym > 0.0) {
        std::ostringstream os;
        os << "asymmetric: max |entries(i,j) - entries(j,i)| = " << max_asym;
        violations.push_back(os.str());
    }

    for (int i = 0; i < e.rows(); ++i) {
        const double row_max = e.row(i).maxCoeff();
        if (e(i, i) < row_max) {
            violations.push_back("diagonal not row max at row " + std::to_string(i));
            break;
        }
    }
    return violations;
}

double min_eigenvalue(const SimilarityMatrix& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.entries, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw std::runtime_error("min_eigenvalue: eigendecomposition failed");
    return es.eigenvalues().minCoeff();
}

SimilarityMatrix nearest_psd(const SimilarityMatrix& m, double floor) {
    if (!m.entries.allFinite()) throw std::runtime_error("nearest_psd: non-finite input");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.entries);
    if (es.info() != Eigen::Success) throw std::runtime_error("nearest_psd: eigendecomposition failed");

    if (es.eigenvalues().minCoeff() >= floor) return m;

    Eigen::VectorXd clipped = es.eigenvalues().cwiseMax(floor);
    Eigen::MatrixXd rebuilt = es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().transpose();
    SimilarityMatrix out = m;
    out.entries = 0.5 * (rebuilt + rebuilt.transpose());
    return out;
}

SimilarityMatrix normalize_unit_diagonal(const SimilarityMatrix& m) {
    SimilarityMatrix out = m;
    const double lo = m.entries.minCoeff();
    const double hi = m.entries.maxCoeff();
    if (hi > lo) {
        out.entries = (m.entries.array() - lo) / (hi - lo);
    } else {
        out.entries.setOnes();
    }
    out.entries.diagonal().setOnes();
    return out;
}

SimilarityMatrix prepare_agent_kernel(const SimilarityMatrix& m, double floor) {
    auto violations = validate_kernel(m);
    // Diagonal-dominance repair is exactly what normalization does; only
    // structural problems are fatal here.
    for (const auto& v : violations) {
        if (v.rfind("non-finite", 0) == 0 || v.rfind("not square", 0) == 0 || v.rfind("empty", 0) == 0 ||
            v.rfind("asymmetric", 0) == 0) {
            throw std::invalid_argument("prepare_agent_kernel: " + v);
        }
    }
    return nearest_psd(normalize_unit_diagonal(m), floor);
}

SplitSpec split_random(int n, Rng& rng) {
    if (n < 2) throw std::invalid_argument("split_random: n must be >= 2");
    std::vector<int> ids(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) ids[static_cast<std::size_t>(i)] = i;
    rng.shuffle(ids);

    const int half = n / 2;
    SplitSpec split;
    split.personalization.assign(ids.begin(), ids.begin() + half);
    split.generalization.assign(ids.begin() + half, ids.end());
    std::sort(split.personalization.begin(), split.personalization.end());
    std::sort(split.generalization.begin(), split.generalization.end());
    return split;
}

}  // namespace alignsim
