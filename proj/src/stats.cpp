#include "metaselect/stats.hpp"

#include "metaselect/errors.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>

namespace metaselect {

ConfusionCounts confusion(const std::vector<int>& truth, const std::vector<int>& predicted) {
    if (truth.size() != predicted.size()) {
        throw DataError("confusion: truth and prediction lengths differ");
    }
    ConfusionCounts c;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] == 1) {
            (predicted[i] == 1 ? c.tp : c.fn)++;
        } else {
            (predicted[i] == 1 ? c.fp : c.tn)++;
        }
    }
    return c;
}

double recall(const ConfusionCounts& c) {
    if (c.tp + c.fn == 0) throw DataError("recall undefined: no positive examples");
    return static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
}

double recall_efficiency(double top_recommended_recall, double best_observed_recall) {
    if (best_observed_recall <= 0.0) {
        throw DataError("recall_efficiency: best observed recall must be positive");
    }
    return top_recommended_recall / best_observed_recall;
}

double spearman(const std::vector<int>& ranks_a, const std::vector<int>& ranks_b) {
    const std::size_t n = ranks_a.size();
    if (n != ranks_b.size()) throw DataError("spearman: length mismatch");
    if (n < 2) throw DataError("spearman: need at least 2 ranks");
    auto check_permutation = [n](const std::vector<int>& r) {
        std::vector<int> sorted = r;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < n; ++i) {
            if (sorted[i] != static_cast<int>(i) + 1) {
                throw DataError("spearman: ranks are not a permutation of 1..n");
            }
        }
    };
    check_permutation(ranks_a);
    check_permutation(ranks_b);
    double d2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double d = ranks_a[i] - ranks_b[i];
        d2 += d * d;
    }
    // single division so small rationals (e.g. -0.3) come out exactly
    double denom = static_cast<double>(n) * (static_cast<double>(n * n) - 1.0);
    return (denom - 6.0 * d2) / denom;
}

bool spearman_significant(double rho, std::size_t n) {
    // Two-sided critical values at alpha = 0.10 for tie-free permutations.
    static const std::map<std::size_t, double> critical = {
        {4, 1.000}, {5, 0.900}, {6, 0.829}, {7, 0.714},
        {8, 0.643}, {9, 0.600}, {10, 0.564}};
    auto it = critical.find(n);
    if (it == critical.end()) {
        throw ConfigError("spearman_significant: no critical value for n = " +
                          std::to_string(n));
    }
    return std::abs(rho) >= it->second;
}

double mean(const std::vector<double>& values) {
    if (values.empty()) throw DataError("mean of empty sample");
    double sum = 0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

double sample_stddev(const std::vector<double>& values) {
    if (values.size() < 2) return 0.0;
    double m = mean(values);
    double ss = 0;
    for (double v : values) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

double t_quantile(double p, double dof) {
    boost::math::students_t dist(dof);
    return boost::math::quantile(dist, p);
}

std::map<std::string, ConfidenceInterval> bonferroni_ci(
    const std::map<std::string, std::vector<double>>& samples, double family_confidence) {
    if (samples.empty()) throw DataError("bonferroni_ci: no samples");
    const double m = static_cast<double>(samples.size());
    const double alpha = (1.0 - family_confidence) / m;

    std::map<std::string, ConfidenceInterval> out;
    for (const auto& [id, values] : samples) {
        if (values.size() < 2) {
            throw DataError("bonferroni_ci: sample for " + id + " has fewer than 2 values");
        }
        const double n = static_cast<double>(values.size());
        const double mu = mean(values);
        const double sd = sample_stddev(values);
        const double half = sd == 0.0
                                ? 0.0
                                : t_quantile(1.0 - alpha / 2.0, n - 1.0) * sd / std::sqrt(n);
        out[id] = {mu - half, mu + half, mu};
    }
    return out;
}

bool intervals_overlap(const ConfidenceInterval& a, const ConfidenceInterval& b) {
    return a.lower <= b.upper && b.lower <= a.upper;
}

}  // namespace metaselect
