#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "alignsim/rng.hpp"

namespace alignsim::theory {

// Two training points, one test point, written in covariance terms.
struct TwoTrainSpec {
    double c0_g = 0.0;      // cov(train 0, test)
    double c1_g = 0.0;      // cov(train 1, test)
    double c_p = 0.0;       // cov(train 0, train 1)
    double sigma0_sq = 1.0; // var(train 0)
    double sigma1_sq = 1.0; // var(train 1)
    double y0 = 0.0;
    double y1 = 0.0;
};

// n equicorrelated training points (unit variance, pairwise covariance c_p)
// and m test points each with covariance c_g to every training point.
struct EquicorrelatedSpec {
    int n_train = 2;
    int m_test = 1;
    double c_p = 0.0;
    double c_g = 0.0;
    Eigen::VectorXd y_p;
};

// Exact evaluation of K_star^T K^{-1} y. No jitter, no noise; throws on a
// singular K.
Eigen::VectorXd gp_mean_general(const Eigen::MatrixXd& K, const Eigen::MatrixXd& K_star,
                                const Eigen::VectorXd& y);

// The analytic two-train prediction
// (c0g*y0*s1 - c0g*y1*cp + c1g*y1*s0 - c1g*y0*cp) / (s0*s1 - cp^2).
double two_train_prediction(const TwoTrainSpec& spec);

// Prediction error when the student's train-test covariance differs from the
// teacher's by epsilon, under the simplified equal-c_g equal-variance case.
double error_kstar(double epsilon, const TwoTrainSpec& spec);

// Prediction error when the student's train-train covariance differs from
// the teacher's by epsilon, same simplified case.
double error_k(double epsilon, const TwoTrainSpec& spec);

// Sherman-Morrison closed form for ((1-c)I + c ee^T)^{-1}.
Eigen::MatrixXd equicorrelated_inverse(int n, double c_p);

// Prediction for the equicorrelated system through the general solve (the
// ground-truth path the printed closed form is checked against).
Eigen::VectorXd equicorrelated_prediction(const EquicorrelatedSpec& spec);

struct ChebyshevResult {
    double empirical_prob = 0.0;
    double bound = 0.0;
};

// Draws (K_S, K_T) pairs from a zero-mean bivariate normal with common
// variance sigma^2 and correlation rho0 and measures how often
// |K_S - K_T| exceeds c*sigma*sqrt(2(1-rho0)), against the 1/c^2 bound.
ChebyshevResult chebyshev_check(double rho0, double sigma, double c, long trials, Rng& rng);

struct ScanViolation {
    std::string what;
    double epsilon = 0.0;
    int spec_index = 0;
};

struct ScanReport {
    std::vector<ScanViolation> violations;
    long specs_checked = 0;
};

using ErrorFn = std::function<double(double, const TwoTrainSpec&)>;

// Checks, for every spec on the grid: both errors are non-decreasing in
// epsilon, and the k_star error dominates the k error pointwise.
ScanReport monotonicity_scan(const std::vector<TwoTrainSpec>& specs, const std::vector<double>& eps_grid);

// Same scan with injectable error functions (negative-control seam).
ScanReport monotonicity_scan_with(const std::vector<TwoTrainSpec>& specs, const std::vector<double>& eps_grid,
                                  const ErrorFn& f_kstar, const ErrorFn& f_k);

// Random simplified specs (equal c_g, unit variances) drawn from the
// kernel-like family: nonnegative correlations with a PSD 3-point covariance.
std::vector<TwoTrainSpec> random_simplified_specs(int count, Rng& rng);

// Random fully general specs with a PD 2x2 training covariance.
std::vector<TwoTrainSpec> random_general_specs(int count, Rng& rng);

struct TheoryCheckLine {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct TheoryCheckReport {
    std::vector<TheoryCheckLine> lines;
    bool all_pass = true;
};

// The full oracle suite: analytic-vs-general agreement, inverse identity,
// linearity/sublinearity, error dominance, and the Chebyshev grid.
TheoryCheckReport run_theory_checks(long n_specs, long chebyshev_trials, std::uint64_t seed);

}  // namespace alignsim::theory
