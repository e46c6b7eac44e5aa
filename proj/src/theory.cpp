#include "alignsim/theory.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace alignsim::theory {

Eigen::VectorXd gp_mean_general(const Eigen::MatrixXd& K, const Eigen::MatrixXd& K_star,
                                const Eigen::VectorXd& y) {
    if (K.rows() != K.cols()) throw std::invalid_argument("gp_mean_general: K must be square");
    if (K_star.rows() != K.rows()) throw std::invalid_argument("gp_mean_general: K_star row mismatch");
    if (y.size() != K.rows()) throw std::invalid_argument("gp_mean_general: y length mismatch");

    Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
    if (!lu.isInvertible()) throw std::invalid_argument("gp_mean_general: singular K");
    return K_star.transpose() * lu.solve(y);
}

double two_train_prediction(const TwoTrainSpec& s) {
    const double denom = s.sigma0_sq * s.sigma1_sq - s.c_p * s.c_p;
    if (denom == 0.0) throw std::invalid_argument("two_train_prediction: zero denominator");
    return (s.c0_g * s.y0 * s.sigma1_sq - s.c0_g * s.y1 * s.c_p + s.c1_g * s.y1 * s.sigma0_sq -
            s.c1_g * s.y0 * s.c_p) /
           denom;
}

double error_kstar(double epsilon, const TwoTrainSpec& s) {
    const double denom = s.sigma0_sq + s.c_p;
    if (denom == 0.0) throw std::invalid_argument("error_kstar: zero denominator");
    return std::abs(epsilon * (s.y0 + s.y1) / denom);
}

double error_k(double epsilon, const TwoTrainSpec& s) {
    const double c_g = s.c0_g;
    const double teacher = s.sigma0_sq + s.c_p;
    const double student = s.sigma0_sq + s.c_p + epsilon;
    if (teacher == 0.0 || student == 0.0) throw std::invalid_argument("error_k: zero denominator");
    return std::abs(epsilon * c_g * (s.y0 + s.y1) / (teacher * student));
}

Eigen::MatrixXd equicorrelated_inverse(int n, double c_p) {
    if (n < 1) throw std::invalid_argument("equicorrelated_inverse: n must be >= 1");
    if (!(c_p < 1.0) || !(c_p > -1.0 / static_cast<double>(std::max(1, n - 1)))) {
        throw std::invalid_argument("equicorrelated_inverse: c_p violates positive definiteness");
    }
    const double scale = 1.0 / (1.0 - c_p);
    const double shrink = c_p / (1.0 + static_cast<double>(n - 1) * c_p);
    Eigen::MatrixXd inv = Eigen::MatrixXd::Constant(n, n, -scale * shrink);
    inv.diagonal().array() = scale * (1.0 - shrink);
    return inv;
}

Eigen::VectorXd equicorrelated_prediction(const EquicorrelatedSpec& spec) {
    const int n = spec.n_train;
    const int m = spec.m_test;
    if (n < 1 || m < 1) throw std::invalid_argument("equicorrelated_prediction: empty system");
    if (spec.y_p.size() != n) throw std::invalid_argument("equicorrelated_prediction: y_p length mismatch");
    if (!(spec.c_p < 1.0) || !(spec.c_p > -1.0 / static_cast<double>(std::max(1, n - 1)))) {
        throw std::invalid_argument("equicorrelated_prediction: c_p violates positive definiteness");
    }

    Eigen::MatrixXd K = Eigen::MatrixXd::Constant(n, n, spec.c_p);
    K.diagonal().setOnes();
    Eigen::MatrixXd K_star = Eigen::MatrixXd::Constant(n, m, spec.c_g);
    return gp_mean_general(K, K_star, spec.y_p);
}

ChebyshevResult chebyshev_check(double rho0, double sigma, double c, long trials, Rng& rng) {
    if (rho0 < -1.0 || rho0 > 1.0) throw std::invalid_argument("chebyshev_check: rho0 outside [-1, 1]");
    if (!(c > 0.0) || trials < 1) throw std::invalid_argument("chebyshev_check: need c > 0 and trials >= 1");

    const double threshold = c * sigma * std::sqrt(2.0 * (1.0 - rho0));
    const double mix = std::sqrt(std::max(0.0, 1.0 - rho0 * rho0));
    long exceed = 0;
    for (long t = 0; t < trials; ++t) {
        const double z1 = rng.normal();
        const double z2 = rng.normal();
        const double k_t = sigma * z1;
        const double k_s = sigma * (rho0 * z1 + mix * z2);
        // strict inequality keeps the rho0 = 1 case (threshold 0) vacuous
        if (std::abs(k_s - k_t) > threshold) ++exceed;
    }
    return {static_cast<double>(exceed) / static_cast<double>(trials), 1.0 / (c * c)};
}

ScanReport monotonicity_scan_with(const std::vector<TwoTrainSpec>& specs, const std::vector<double>& eps_grid,
                                  const ErrorFn& f_kstar, const ErrorFn& f_k) {
    ScanReport report;
    report.specs_checked = static_cast<long>(specs.size());
    const double slack = 1e-12;

    for (std::size_t si = 0; si < specs.size(); ++si) {
        const auto& spec = specs[si];
        double prev_kstar = -1.0, prev_k = -1.0;
        for (double eps : eps_grid) {
            const double ek_star = f_kstar(eps, spec);
            const double ek = f_k(eps, spec);
            if (ek_star < prev_kstar - slack) {
                report.violations.push_back({"error_kstar decreased", eps, static_cast<int>(si)});
            }
            if (ek < prev_k - slack) {
                report.violations.push_back({"error_k decreased", eps, static_cast<int>(si)});
            }
            if (ek > ek_star + slack) {
                report.violations.push_back({"error_k exceeds error_kstar", eps, static_cast<int>(si)});
            }
            prev_kstar = ek_star;
            prev_k = ek;
        }
    }
    return report;
}

ScanReport monotonicity_scan(const std::vector<TwoTrainSpec>& specs, const std::vector<double>& eps_grid) {
    return monotonicity_scan_with(
        specs, eps_grid, [](double e, const TwoTrainSpec& s) { return error_kstar(e, s); },
        [](double e, const TwoTrainSpec& s) { return error_k(e, s); });
}

std::vector<TwoTrainSpec> random_simplified_specs(int count, Rng& rng) {
    std::vector<TwoTrainSpec> specs;
    specs.reserve(static_cast<std::size_t>(count));
    while (static_cast<int>(specs.size()) < count) {
        TwoTrainSpec s;
        const double c_g = rng.uniform(0.0, 0.95);
        // PSD of the 3-point covariance [[1,cp,cg],[cp,1,cg],[cg,cg,1]]
        // needs cp >= 2*cg^2 - 1; the kernel-like family also keeps cp >= 0.
        const double cp_lo = std::max(0.0, 2.0 * c_g * c_g - 1.0);
        s.c_p = rng.uniform(cp_lo, 0.95);
        s.c0_g = c_g;
        s.c1_g = c_g;
        s.sigma0_sq = 1.0;
        s.sigma1_sq = 1.0;
        s.y0 = rng.uniform(-3.0, 3.0);
        s.y1 = rng.uniform(-3.0, 3.0);
        specs.push_back(s);
    }
    return specs;
}

std::vector<TwoTrainSpec> random_general_specs(int count, Rng& rng) {
    std::vector<TwoTrainSpec> specs;
    specs.reserve(static_cast<std::size_t>(count));
    while (static_cast<int>(specs.size()) < count) {
        TwoTrainSpec s;
        s.sigma0_sq = rng.uniform(0.2, 2.0);
        s.sigma1_sq = rng.uniform(0.2, 2.0);
        const double bound = std::sqrt(s.sigma0_sq * s.sigma1_sq);
        s.c_p = rng.uniform(-0.9, 0.9) * bound;
        if (std::abs(s.sigma0_sq * s.sigma1_sq - s.c_p * s.c_p) < 1e-6) continue;
        s.c0_g = rng.uniform(-1.0, 1.0);
        s.c1_g = rng.uniform(-1.0, 1.0);
        s.y0 = rng.uniform(-3.0, 3.0);
        s.y1 = rng.uniform(-3.0, 3.0);
        specs.push_back(s);
    }
    return specs;
}

namespace {

void add_line(TheoryCheckReport& report, const std::string& name, bool pass, const std::string& detail) {
    report.lines.push_back({name, pass, detail});
    report.all_pass = report.all_pass && pass;
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

}  // namespace

TheoryCheckReport run_theory_checks(long n_specs, long chebyshev_trials, std::uint64_t seed) {
    TheoryCheckReport report;
    Rng rng(seed);

    // (a) analytic two-train prediction vs the general solve
    {
        const auto specs = random_general_specs(static_cast<int>(n_specs), rng);
        double worst = 0.0;
        for (const auto& s : specs) {
            Eigen::MatrixXd K(2, 2);
            K << s.sigma0_sq, s.c_p, s.c_p, s.sigma1_sq;
            Eigen::MatrixXd K_star(2, 1);
            K_star << s.c0_g, s.c1_g;
            Eigen::VectorXd y(2);
            y << s.y0, s.y1;
            const double general = gp_mean_general(K, K_star, y)[0];
            worst = std::max(worst, std::abs(general - two_train_prediction(s)));
        }
        add_line(report, "two_train_prediction vs general solve", worst <= 1e-12,
                 "max |diff| = " + fmt(worst) + " over " + std::to_string(n_specs) + " specs (tol 1e-12)");
    }

    // (b) Sherman-Morrison inverse identity
    {
        double worst = 0.0;
        for (int n = 2; n <= 20; ++n) {
            const double lo = -1.0 / static_cast<double>(n - 1);
            for (int step = 1; step <= 19; ++step) {
                const double c_p = lo + (1.0 - lo) * static_cast<double>(step) / 20.0;
                Eigen::MatrixXd K = Eigen::MatrixXd::Constant(n, n, c_p);
                K.diagonal().setOnes();
                const Eigen::MatrixXd prod = K * equicorrelated_inverse(n, c_p);
                worst = std::max(worst, (prod - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff());
            }
        }
        add_line(report, "equicorrelated_inverse product identity", worst <= 1e-10,
                 "max |K K^-1 - I| = " + fmt(worst) + " for n in [2, 20] (tol 1e-10)");
    }

    // (c) error_kstar exactly linear, error_k(eps)/eps non-increasing
    {
        const auto specs = random_simplified_specs(200, rng);
        double worst_linearity = 0.0;
        bool sublinear = true;
        for (const auto& s : specs) {
            const double base = error_kstar(0.1, s);
            for (double eps = 0.05; eps <= 0.5001; eps += 0.05) {
                worst_linearity = std::max(worst_linearity, std::abs(error_kstar(eps, s) - base * eps / 0.1));
            }
            double prev_ratio = std::numeric_limits<double>::infinity();
            for (double eps = 0.05; eps <= 0.5001; eps += 0.05) {
                const double ratio = error_k(eps, s) / eps;
                if (ratio > prev_ratio + 1e-12) sublinear = false;
                prev_ratio = ratio;
            }
        }
        add_line(report, "error_kstar linear in epsilon", worst_linearity <= 1e-12,
                 "max linearity defect = " + fmt(worst_linearity) + " (tol 1e-12)");
        add_line(report, "error_k sublinear in epsilon", sublinear, "error_k(eps)/eps non-increasing on grid");
    }

    // (d) misalignment in K* dominates misalignment in K
    {
        const auto specs = random_simplified_specs(200, rng);
        std::vector<double> grid;
        for (double eps = 0.0; eps <= 0.5001; eps += 0.05) grid.push_back(eps);
        const auto scan = monotonicity_scan(specs, grid);
        std::string detail = std::to_string(scan.violations.size()) + " violations over " +
                             std::to_string(scan.specs_checked) + " specs";
        if (!scan.violations.empty()) {
            detail += " (first: " + scan.violations.front().what + " at eps=" + fmt(scan.violations.front().epsilon) + ")";
        }
        add_line(report, "monotone growth and k_star dominance", scan.violations.empty(), detail);
    }

    // (e) Chebyshev bound on the (rho0, c) grid
    {
        bool ok = true;
        double worst_margin = -1.0;
        for (double rho0 : {0.0, 0.25, 0.5, 0.75, 0.9}) {
            for (double c : {1.5, 2.0, 3.0}) {
                const auto res = chebyshev_check(rho0, 1.0, c, chebyshev_trials, rng);
                const double se = std::sqrt(res.bound * (1.0 - res.bound) / static_cast<double>(chebyshev_trials));
                const double margin = res.empirical_prob - (res.bound + 3.0 * se);
                worst_margin = std::max(worst_margin, margin);
                if (margin > 0.0) ok = false;
            }
        }
        add_line(report, "chebyshev_check within bound", ok,
                 "worst (empirical - allowed) = " + fmt(worst_margin) + " at " +
                     std::to_string(chebyshev_trials) + " trials");
    }

    return report;
}

}  // namespace alignsim::theory
