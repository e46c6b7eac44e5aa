#include "alignsim/alignment.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace alignsim {

std::vector<double> average_ranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        // positions i..j share the same value; assign the mean rank
        const double rank = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
        i = j + 1;
    }
    return ranks;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("pearson: length mismatch");
    if (x.size() < 2) throw std::invalid_argument("pearson: need at least 2 points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw std::invalid_argument("pearson: constant input, correlation undefined");
    return sxy / std::sqrt(sxx * syy);
}

double spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("spearman: length mismatch");
    if (x.size() < 2) throw std::invalid_argument("spearman: need at least 2 points");
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    return pearson(rx, ry);
}

namespace {

void check_split_ids(const std::vector<int>& ids, int n) {
    for (int id : ids) {
        if (id < 0 || id >= n) throw std::invalid_argument("pair_vector: split id " + std::to_string(id) + " out of range");
    }
}

}  // namespace

std::vector<double> pair_vector(const SimilarityMatrix& m, const AlignmentVariant& variant) {
    const int n = m.size();
    const auto& e = m.entries;
    std::vector<double> out;

    switch (variant.kind) {
        case AlignmentKind::full: {
            out.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j) out.push_back(e(i, j));
            break;
        }
        case AlignmentKind::pers: {
            const auto& p = variant.split.personalization;
            check_split_ids(p, n);
            out.reserve(p.size() * (p.size() - 1) / 2);
            for (std::size_t a = 0; a < p.size(); ++a)
                for (std::size_t b = a + 1; b < p.size(); ++b) out.push_back(e(p[a], p[b]));
            break;
        }
        case AlignmentKind::cross: {
            const auto& p = variant.split.personalization;
            const auto& g = variant.split.generalization;
            check_split_ids(p, n);
            check_split_ids(g, n);
            out.reserve(p.size() * g.size());
            for (int pi : p)
                for (int gi : g) out.push_back(e(pi, gi));
            break;
        }
    }
    return out;
}

double alignment(const SimilarityMatrix& a, const SimilarityMatrix& b, const AlignmentVariant& variant) {
    if (a.size() != b.size()) throw std::invalid_argument("alignment: dimension mismatch");
    const auto va = pair_vector(a, variant);
    const auto vb = pair_vector(b, variant);
    return spearman(va, vb);
}

BinnedSeries bin_series(const std::vector<std::pair<double, double>>& points, double bin_width) {
    if (!(bin_width > 0.0)) throw std::invalid_argument("bin_series: bin_width must be positive");

    struct Acc {
        double sum = 0.0, sum_sq = 0.0;
        long count = 0;
    };
    std::map<long, Acc> acc;
    for (const auto& [a, v] : points) {
        const long idx = static_cast<long>(std::floor(a / bin_width));
        auto& slot = acc[idx];
        slot.sum += v;
        slot.sum_sq += v * v;
        slot.count += 1;
    }

    BinnedSeries series;
    series.bin_width = bin_width;
    for (const auto& [idx, slot] : acc) {
        Bin bin;
        bin.center = (static_cast<double>(idx) + 0.5) * bin_width;
        bin.count = slot.count;
        bin.mean = slot.sum / static_cast<double>(slot.count);
        if (slot.count > 1) {
            const double var =
                std::max(0.0, (slot.sum_sq - slot.sum * slot.sum / static_cast<double>(slot.count)) /
                                  static_cast<double>(slot.count - 1));
            bin.standard_error = std::sqrt(var / static_cast<double>(slot.count));
        }
        series.bins.push_back(bin);
    }
    return series;
}

CorrelationTest spearman_with_pvalue(std::span<const double> x, std::span<const double> y, int n_shuffles,
                                     Rng& rng) {
    CorrelationTest result;
    result.n = static_cast<long>(x.size());
    const auto rx = average_ranks(x);
    auto ry = average_ranks(y);
    result.rho = pearson(rx, ry);

    // Permuting y and re-ranking is the same as permuting the ranks of y.
    const double target = std::abs(result.rho);
    long exceed = 0;
    for (int s = 0; s < n_shuffles; ++s) {
        rng.shuffle(ry);
        if (std::abs(pearson(rx, ry)) >= target) ++exceed;
    }
    result.p_value = static_cast<double>(1 + exceed) / static_cast<double>(n_shuffles + 1);
    return result;
}

}  // namespace alignsim
