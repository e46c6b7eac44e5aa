#pragma once

#include <span>
#include <utility>
#include <vector>

#include "alignsim/domain.hpp"
#include "alignsim/rng.hpp"

namespace alignsim {

enum class AlignmentKind { full, pers, cross };

// full uses every upper-off-diagonal pair; pers/cross restrict pairs to the
// given split and require one.
struct AlignmentVariant {
    AlignmentKind kind = AlignmentKind::full;
    SplitSpec split;
};

inline AlignmentVariant full_variant() { return {AlignmentKind::full, {}}; }
inline AlignmentVariant pers_variant(SplitSpec s) { return {AlignmentKind::pers, std::move(s)}; }
inline AlignmentVariant cross_variant(SplitSpec s) { return {AlignmentKind::cross, std::move(s)}; }

struct Bin {
    double center = 0.0;
    double mean = 0.0;
    double standard_error = 0.0;
    long count = 0;
};

struct BinnedSeries {
    double bin_width = 0.05;
    std::vector<Bin> bins;
};

// Average ranks (1-based); ties receive the mean of the ranks they span.
std::vector<double> average_ranks(std::span<const double> values);

double pearson(std::span<const double> x, std::span<const double> y);

// Pearson correlation of average-ranked values. Throws on length mismatch,
// length < 2, or a constant input (correlation undefined).
double spearman(std::span<const double> x, std::span<const double> y);

// The pair entries selected by the variant, in a fixed order: row-major upper
// triangle for full and pers, (p ascending, g ascending) for cross.
std::vector<double> pair_vector(const SimilarityMatrix& m, const AlignmentVariant& variant);

// Representational alignment: Spearman correlation of the two kernels' pair
// vectors under the same variant.
double alignment(const SimilarityMatrix& a, const SimilarityMatrix& b, const AlignmentVariant& variant);

// Groups points by floor(alignment / bin_width); empty bins are omitted.
// standard_error is sample-std/sqrt(count), reported as 0 for count-1 bins.
BinnedSeries bin_series(const std::vector<std::pair<double, double>>& points, double bin_width);

struct CorrelationTest {
    double rho = 0.0;
    double p_value = 1.0;
    long n = 0;
};

// Two-sided permutation test for Spearman's rho with add-one smoothing:
// p = (1 + #{|rho_perm| >= |rho_obs|}) / (n_shuffles + 1).
CorrelationTest spearman_with_pvalue(std::span<const double> x, std::span<const double> y, int n_shuffles,
                                     Rng& rng);

}  // namespace alignsim
