#ifndef METASELECT_STATS_HPP
#define METASELECT_STATS_HPP

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace metaselect {

struct ConfusionCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;
};

/// Build counts from 0/1 truth and prediction vectors (1 = positive/attack).
ConfusionCounts confusion(const std::vector<int>& truth, const std::vector<int>& predicted);

/// TP / (TP + FN); throws when no positive examples exist.
double recall(const ConfusionCounts& c);

/// E_R = recall of the top-recommended algorithm / best observed recall.
double recall_efficiency(double top_recommended_recall, double best_observed_recall);

/// Spearman rank correlation of two tie-free rank permutations of 1..n.
double spearman(const std::vector<int>& ranks_a, const std::vector<int>& ranks_b);

/// Two-sided significance test at family alpha 0.10 using critical values
/// for small n (exact permutation-based tables).
bool spearman_significant(double rho, std::size_t n);

struct ConfidenceInterval {
    double lower = 0.0;
    double upper = 0.0;
    double mean = 0.0;
};

/// Bonferroni-corrected t-intervals: per-comparison alpha is
/// (1 - family_confidence) / m across the m algorithms.
std::map<std::string, ConfidenceInterval> bonferroni_ci(
    const std::map<std::string, std::vector<double>>& samples, double family_confidence);

bool intervals_overlap(const ConfidenceInterval& a, const ConfidenceInterval& b);

double mean(const std::vector<double>& values);
double sample_stddev(const std::vector<double>& values);

/// Student-t upper quantile, t(p, dof).
double t_quantile(double p, double dof);

}  // namespace metaselect

#endif
