#include <doctest.h>

#include "alignsim/alignment.hpp"
#include "alignsim/kernels.hpp"

using namespace alignsim;

namespace {

ValueScores synthetic_scores(std::initializer_list<double> values) {
    ValueScores s;
    s.value_name = "synthetic";
    s.scale_min = -3.0;
    s.scale_max = 3.0;
    s.bad_threshold = 0.0;
    s.scores.resize(static_cast<long>(values.size()));
    long i = 0;
    for (double v : values) s.scores[i++] = v;
    return s;
}

ValueScores random_scores(int n, Rng& rng) {
    ValueScores s;
    s.value_name = "synthetic";
    s.scale_min = -3.0;
    s.scale_max = 3.0;
    s.bad_threshold = 0.0;
    s.scores.resize(n);
    for (int i = 0; i < n; ++i) s.scores[i] = rng.uniform(-3.0, 3.0);
    return s;
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("score_kernel maps identical scores to max similarity") {
    const auto m = score_kernel(synthetic_scores({-3.0, -3.0}));
    CHECK(m.entries(0, 1) == 1.0);
}

TEST_CASE("score_kernel maps extreme opposition to zero similarity") {
    const auto m = score_kernel(synthetic_scores({-3.0, 3.0}));
    CHECK(m.entries(0, 1) == 0.0);
}

TEST_CASE("score_kernel matches the formula on (0, 1.5, 3)") {
    const auto m = score_kernel(synthetic_scores({0.0, 1.5, 3.0}));
    CHECK(m.entries(0, 1) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(m.entries(0, 2) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(m.entries(1, 2) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(m.entries(0, 0) == 1.0);
}

TEST_CASE("score_kernel output satisfies all kernel invariants for random scores") {
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const auto scores = random_scores(2 + rng.uniform_index(40), rng);
        const auto m = score_kernel(scores);
        CHECK(validate_kernel(m).empty());
        CHECK(m.entries.maxCoeff() <= 1.0);
        CHECK(m.entries.minCoeff() >= 0.0);
    }
}

TEST_CASE("corrupt_scores with k=0 is the identity") {
    Rng rng(1);
    const auto scores = random_scores(50, rng);
    const auto out = corrupt_scores(scores, {0, -3.0, 3.0}, rng);
    CHECK(out.scores == scores.scores);
}

TEST_CASE("corrupt_scores with k=N stays within replacement bounds") {
    Rng rng(2);
    const auto scores = random_scores(50, rng);
    const auto out = corrupt_scores(scores, {50, -1.0, 1.0}, rng);
    CHECK(out.scores.minCoeff() >= -1.0);
    CHECK(out.scores.maxCoeff() <= 1.0);
}

TEST_CASE("corrupt_scores with k=10 leaves exactly 40 of 50 scores bit-identical") {
    Rng rng(4);
    const auto scores = random_scores(50, rng);
    const auto out = corrupt_scores(scores, {10, -3.0, 3.0}, rng);
    int unchanged = 0;
    for (int i = 0; i < 50; ++i) {
        if (out.scores[i] == scores.scores[i]) ++unchanged;
    }
    CHECK(unchanged == 40);
}

TEST_CASE("corrupt_scores rejects k > N") {
    Rng rng(5);
    const auto scores = random_scores(10, rng);
    CHECK_THROWS_AS(corrupt_scores(scores, {11, -3.0, 3.0}, rng), std::invalid_argument);
}

TEST_CASE("corrupt_scores is deterministic given the seed") {
    const auto scores = [&] {
        Rng rng(6);
        return random_scores(50, rng);
    }();
    Rng a(7), b(7);
    const auto oa = corrupt_scores(scores, {25, -3.0, 3.0}, a);
    const auto ob = corrupt_scores(scores, {25, -3.0, 3.0}, b);
    CHECK(oa.scores == ob.scores);
}

TEST_CASE("interpolate_kernel endpoints are exact") {
    Rng rng(8);
    const auto base = score_kernel(random_scores(10, rng));
    const auto target = score_kernel(random_scores(10, rng));
    CHECK(interpolate_kernel(base, target, 0.0).entries == base.entries);
    CHECK(interpolate_kernel(base, target, 1.0).entries == target.entries);
}

TEST_CASE("interpolate_kernel midpoint is the elementwise mean") {
    SimilarityMatrix base, target;
    base.entries = Eigen::MatrixXd::Constant(4, 4, 0.2);
    base.entries.diagonal().setOnes();
    target.entries = Eigen::MatrixXd::Constant(4, 4, 0.6);
    target.entries.diagonal().setOnes();
    const auto mid = interpolate_kernel(base, target, 0.5);
    CHECK(mid.entries(0, 1) == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(mid.entries(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("interpolate_kernel rejects dimension mismatch") {
    SimilarityMatrix a, b;
    a.entries = Eigen::MatrixXd::Identity(3, 3);
    b.entries = Eigen::MatrixXd::Identity(4, 4);
    CHECK_THROWS_AS(interpolate_kernel(a, b, 0.5), std::invalid_argument);
}

TEST_CASE("length_kernel matches the normalized pre-formula") {
    ActionSet actions;
    actions.descriptions = {std::string(10, 'a'), std::string(30, 'b'), std::string(20, 'c')};
    const auto out = length_kernel(actions);

    // raw oracle: M - |len_i - len_j| with M = 30, then the same
    // normalization rule
    SimilarityMatrix raw;
    raw.entries.resize(3, 3);
    const double lens[3] = {10, 30, 20};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) raw.entries(i, j) = 30.0 - std::abs(lens[i] - lens[j]);
    CHECK(raw.entries(0, 1) == 10.0);
    const auto expected = normalize_unit_diagonal(raw);
    CHECK((out.entries - expected.entries).cwiseAbs().maxCoeff() == 0.0);

    CHECK(validate_kernel(out).empty());
}

TEST_CASE("length_kernel of equal-length descriptions is all ones") {
    ActionSet actions;
    actions.descriptions = {"aaaa", "bbbb"};
    const auto out = length_kernel(actions);
    CHECK(out.entries.minCoeff() == 1.0);
}

TEST_CASE("length_scores rescales lengths to [0,100]") {
    ActionSet actions;
    actions.descriptions = {std::string(10, 'a'), std::string(30, 'b'), std::string(15, 'c')};
    const auto scores = length_scores(actions);
    CHECK(scores.scores[0] == 0.0);
    CHECK(scores.scores[1] == 100.0);
    CHECK(scores.scores[2] == doctest::Approx(25.0).epsilon(1e-15));
    CHECK(scores.scale_min == 0.0);
    CHECK(scores.scale_max == 100.0);
    CHECK(scores.bad_threshold == 50.0);
}

TEST_CASE("length_scores rejects uniform lengths") {
    ActionSet actions;
    actions.descriptions = {"aaa", "bbb"};
    CHECK_THROWS_AS(length_scores(actions), std::invalid_argument);
}

TEST_CASE("corrupting 0 actions keeps alignment exactly 1") {
    Rng rng(10);
    const auto scores = random_scores(50, rng);
    const auto truth = score_kernel(scores);
    const auto corrupted = score_kernel(corrupt_scores(scores, {0, -3.0, 3.0}, rng));
    CHECK(alignment(truth, corrupted, full_variant()) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("alignment decreases in expectation as corruption grows") {
    // Monte Carlo trend over 200 seeds per corruption level
    const int levels[] = {0, 10, 25, 50};
    double means[4] = {};
    for (int li = 0; li < 4; ++li) {
        double sum = 0.0;
        for (int seed = 0; seed < 200; ++seed) {
            Rng rng(derive_seed(1000, static_cast<std::uint64_t>(li), static_cast<std::uint64_t>(seed)));
            const auto scores = random_scores(50, rng);
            const auto corrupted = corrupt_scores(scores, {levels[li], -3.0, 3.0}, rng);
            sum += alignment(score_kernel(scores), score_kernel(corrupted), full_variant());
        }
        means[li] = sum / 200.0;
    }
    CHECK(means[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(means[0] > means[1]);
    CHECK(means[1] > means[2]);
    CHECK(means[2] > means[3]);
}

TEST_CASE("interpolation alignment toward the target rises with alpha") {
    double prev = -2.0;
    for (double alpha : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        double sum = 0.0;
        for (int seed = 0; seed < 50; ++seed) {
            Rng rng(derive_seed(2000, static_cast<std::uint64_t>(seed)));
            const auto base = score_kernel(random_scores(30, rng));
            const auto target = score_kernel(random_scores(30, rng));
            sum += alignment(interpolate_kernel(base, target, alpha), target, full_variant());
        }
        const double mean = sum / 50.0;
        CHECK(mean > prev);
        prev = mean;
    }
    CHECK(prev == doctest::Approx(1.0).epsilon(1e-12));
}

}  // TEST_SUITE
