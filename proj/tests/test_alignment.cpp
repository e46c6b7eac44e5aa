#include <doctest.h>

#include <cmath>

#include "alignsim/alignment.hpp"
#include "alignsim/kernels.hpp"

using namespace alignsim;

namespace {

// Independent oracle: O(n^2) rank assignment (average ranks), then the
// textbook Pearson formula. Deliberately avoids the sort-based path used by
// the library.
double spearman_oracle(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    auto rank_of = [n](const std::vector<double>& v, std::size_t i) {
        double below = 0.0, equal = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (v[j] < v[i]) below += 1.0;
            if (j != i && v[j] == v[i]) equal += 1.0;
        }
        return 1.0 + below + equal / 2.0;
    };
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double rx = rank_of(x, i);
        const double ry = rank_of(y, i);
        sx += rx;
        sy += ry;
        sxx += rx * rx;
        syy += ry * ry;
        sxy += rx * ry;
    }
    const double nn = static_cast<double>(n);
    const double cov = sxy - sx * sy / nn;
    const double vx = sxx - sx * sx / nn;
    const double vy = syy - sy * sy / nn;
    return cov / std::sqrt(vx * vy);
}

SimilarityMatrix random_kernel(int n, Rng& rng) {
    SimilarityMatrix m;
    m.entries.resize(n, n);
    for (int i = 0; i < n; ++i) {
        m.entries(i, i) = 1.0;
        for (int j = i + 1; j < n; ++j) {
            const double v = rng.uniform(0.0, 1.0);
            m.entries(i, j) = v;
            m.entries(j, i) = v;
        }
    }
    return m;
}

}  // namespace

TEST_SUITE("alignment") {

TEST_CASE("spearman of identical ranks is 1") {
    const std::vector<double> v = {1.0, 2.0, 3.0};
    CHECK(spearman(v, v) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("spearman of reversed ranks is -1") {
    const std::vector<double> x = {1.0, 2.0, 3.0};
    const std::vector<double> y = {3.0, 2.0, 1.0};
    CHECK(spearman(x, y) == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("spearman with ties matches the rank-then-Pearson oracle") {
    const std::vector<double> x = {1.0, 2.0, 2.0, 4.0};
    const std::vector<double> y = {1.0, 3.0, 2.0, 4.0};
    CHECK(spearman(x, y) == doctest::Approx(spearman_oracle(x, y)).epsilon(1e-12));
}

TEST_CASE("spearman rejects constant input") {
    const std::vector<double> x = {1.0, 1.0, 1.0};
    const std::vector<double> y = {1.0, 2.0, 3.0};
    CHECK_THROWS_AS(spearman(x, y), std::invalid_argument);
    CHECK_THROWS_AS(spearman(y, x), std::invalid_argument);
}

TEST_CASE("spearman rejects mismatched or short input") {
    const std::vector<double> x = {1.0, 2.0};
    const std::vector<double> y = {1.0, 2.0, 3.0};
    CHECK_THROWS_AS(spearman(x, y), std::invalid_argument);
    const std::vector<double> one = {1.0};
    CHECK_THROWS_AS(spearman(one, one), std::invalid_argument);
}

TEST_CASE("spearman agrees with the oracle on 1000 random vectors incl. tie-heavy ones") {
    Rng rng(21);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 5 + rng.uniform_index(40);
        const bool tie_heavy = trial % 2 == 0;
        std::vector<double> x(static_cast<std::size_t>(n)), y(x);
        for (int i = 0; i < n; ++i) {
            if (tie_heavy) {
                x[static_cast<std::size_t>(i)] = static_cast<double>(rng.uniform_index(4));
                y[static_cast<std::size_t>(i)] = static_cast<double>(rng.uniform_index(4));
            } else {
                x[static_cast<std::size_t>(i)] = rng.uniform(-1.0, 1.0);
                y[static_cast<std::size_t>(i)] = rng.uniform(-1.0, 1.0);
            }
        }
        double lib, oracle;
        try {
            lib = spearman(x, y);
            oracle = spearman_oracle(x, y);
        } catch (const std::invalid_argument&) {
            continue;  // constant vector from the coarse generator
        }
        worst = std::max(worst, std::abs(lib - oracle));
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("spearman is invariant under strictly monotone transforms") {
    Rng rng(22);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> x(20), y(20);
        for (int i = 0; i < 20; ++i) {
            x[static_cast<std::size_t>(i)] = rng.uniform(-2.0, 2.0);
            y[static_cast<std::size_t>(i)] = rng.uniform(-2.0, 2.0);
        }
        const double base = spearman(x, y);
        std::vector<double> tx(20), ty(20);
        for (int i = 0; i < 20; ++i) {
            tx[static_cast<std::size_t>(i)] = std::exp(3.0 * x[static_cast<std::size_t>(i)]);
            ty[static_cast<std::size_t>(i)] = std::atan(y[static_cast<std::size_t>(i)]) * 7.0 + 2.0;
        }
        CHECK(spearman(tx, ty) == doctest::Approx(base).epsilon(1e-12));
    }
}

TEST_CASE("pair_vector lengths for n=50") {
    Rng rng(23);
    const auto m = random_kernel(50, rng);
    CHECK(pair_vector(m, full_variant()).size() == 1225);

    const auto split = split_random(50, rng);
    CHECK(pair_vector(m, pers_variant(split)).size() == 300);
    CHECK(pair_vector(m, cross_variant(split)).size() == 625);
}

TEST_CASE("pair_vector orders entries row-major and p-then-g") {
    SimilarityMatrix m;
    m.entries.resize(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) m.entries(i, j) = 10.0 * std::min(i, j) + std::max(i, j);

    const auto full = pair_vector(m, full_variant());
    CHECK(full == std::vector<double>{1, 2, 3, 12, 13, 23});

    SplitSpec split;
    split.personalization = {0, 2};
    split.generalization = {1, 3};
    CHECK(pair_vector(m, pers_variant(split)) == std::vector<double>{2});
    CHECK(pair_vector(m, cross_variant(split)) == std::vector<double>{1, 3, 12, 23});
}

TEST_CASE("pair_vector rejects out-of-range split ids") {
    Rng rng(24);
    const auto m = random_kernel(4, rng);
    SplitSpec split;
    split.personalization = {0, 7};
    split.generalization = {1, 2};
    CHECK_THROWS_AS(pair_vector(m, pers_variant(split)), std::invalid_argument);
}

TEST_CASE("self-alignment is 1 and alignment is symmetric") {
    Rng rng(25);
    const auto a = random_kernel(20, rng);
    const auto b = random_kernel(20, rng);
    CHECK(alignment(a, a, full_variant()) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(alignment(a, b, full_variant()) == doctest::Approx(alignment(b, a, full_variant())).epsilon(1e-12));
}

TEST_CASE("alignment of independent kernels is centered on zero") {
    double sum = 0.0;
    for (int seed = 0; seed < 1000; ++seed) {
        Rng rng(derive_seed(3000, static_cast<std::uint64_t>(seed)));
        const auto a = random_kernel(50, rng);
        const auto b = random_kernel(50, rng);
        sum += alignment(a, b, full_variant());
    }
    CHECK(std::abs(sum / 1000.0) < 0.05);
}

TEST_CASE("bin_series single point, degenerate bin") {
    const auto series = bin_series({{0.12, 5.0}}, 0.05);
    REQUIRE(series.bins.size() == 1);
    CHECK(series.bins[0].count == 1);
    CHECK(series.bins[0].mean == 5.0);
    CHECK(series.bins[0].standard_error == 0.0);
    CHECK(series.bins[0].center == doctest::Approx(0.125).epsilon(1e-12));
}

TEST_CASE("bin_series mean and standard error for two points") {
    // std = sqrt(2), se = sqrt(2)/sqrt(2) = 1
    const auto series = bin_series({{0.01, 1.0}, {0.02, 3.0}}, 0.05);
    REQUIRE(series.bins.size() == 1);
    CHECK(series.bins[0].mean == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(series.bins[0].standard_error == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(series.bins[0].count == 2);
}

TEST_CASE("bin_series splits across the floor boundary") {
    const auto series = bin_series({{0.01, 1.0}, {0.09, 2.0}}, 0.05);
    CHECK(series.bins.size() == 2);
}

TEST_CASE("bin_series handles negative alignments") {
    const auto series = bin_series({{-0.01, 1.0}, {0.01, 2.0}}, 0.05);
    REQUIRE(series.bins.size() == 2);
    CHECK(series.bins[0].center == doctest::Approx(-0.025).epsilon(1e-12));
    CHECK(series.bins[1].center == doctest::Approx(0.025).epsilon(1e-12));
}

TEST_CASE("permutation p-value is small for a real trend and large for noise") {
    Rng rng(26);
    std::vector<double> x(80), y(80), noise(80);
    for (int i = 0; i < 80; ++i) {
        x[static_cast<std::size_t>(i)] = rng.uniform(0.0, 1.0);
        y[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)] + rng.uniform(-0.2, 0.2);
        noise[static_cast<std::size_t>(i)] = rng.uniform(0.0, 1.0);
    }
    Rng pr(27);
    const auto strong = spearman_with_pvalue(x, y, 2000, pr);
    CHECK(strong.rho > 0.8);
    CHECK(strong.p_value <= 1.0 / 2001.0 + 1e-12);

    const auto weak = spearman_with_pvalue(x, noise, 2000, pr);
    CHECK(weak.p_value > 0.01);
}

}  // TEST_SUITE
