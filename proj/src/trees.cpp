#include "metaselect/trees.hpp"

#include "metaselect/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace metaselect {

namespace {

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double gini(std::size_t pos, std::size_t total) {
    if (total == 0) return 0.0;
    double p = static_cast<double>(pos) / static_cast<double>(total);
    return 2.0 * p * (1.0 - p);
}

}  // namespace

void DecisionTree::fit(const Eigen::MatrixXd& X, const std::vector<int>& y,
                       const Options& opts) {
    std::vector<std::size_t> rows(static_cast<std::size_t>(X.rows()));
    std::iota(rows.begin(), rows.end(), 0);
    fit_rows(X, y, rows, opts);
}

void DecisionTree::fit_rows(const Eigen::MatrixXd& X, const std::vector<int>& y,
                            const std::vector<std::size_t>& rows, const Options& opts) {
    if (rows.empty()) throw DataError("DecisionTree::fit: no training rows");
    nodes_.clear();
    std::vector<std::size_t> work = rows;
    build(X, y, work, 0, work.size(), 0, opts, opts.seed);
}

int DecisionTree::build(const Eigen::MatrixXd& X, const std::vector<int>& y,
                        std::vector<std::size_t>& rows, std::size_t lo, std::size_t hi,
                        int depth, const Options& opts, std::uint64_t node_seed) {
    const std::size_t n = hi - lo;
    std::size_t pos = 0;
    for (std::size_t i = lo; i < hi; ++i) pos += static_cast<std::size_t>(y[rows[i]]);

    auto make_leaf = [&]() {
        Node leaf;
        // tie goes to the negative class
        leaf.label = pos * 2 > n ? 1 : 0;
        nodes_.push_back(leaf);
        return static_cast<int>(nodes_.size() - 1);
    };

    const bool pure = pos == 0 || pos == n;
    if (pure || n < opts.min_samples_split ||
        (opts.max_depth >= 0 && depth >= opts.max_depth)) {
        return make_leaf();
    }

    const std::size_t d = static_cast<std::size_t>(X.cols());
    std::vector<std::size_t> features(d);
    std::iota(features.begin(), features.end(), 0);
    if (opts.features_per_split > 0 && opts.features_per_split < d) {
        std::mt19937_64 rng(node_seed);
        for (std::size_t i = 0; i < opts.features_per_split; ++i) {
            std::uniform_int_distribution<std::size_t> dist(i, d - 1);
            std::swap(features[i], features[dist(rng)]);
        }
        features.resize(opts.features_per_split);
        std::sort(features.begin(), features.end());
    }

    double best_impurity = std::numeric_limits<double>::infinity();
    int best_feature = -1;
    double best_threshold = 0.0;

    std::vector<std::pair<double, int>> vals;
    vals.reserve(n);
    for (std::size_t f : features) {
        vals.clear();
        for (std::size_t i = lo; i < hi; ++i) {
            vals.emplace_back(X(static_cast<Eigen::Index>(rows[i]),
                                static_cast<Eigen::Index>(f)),
                              y[rows[i]]);
        }
        std::sort(vals.begin(), vals.end());
        std::size_t left_pos = 0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            left_pos += static_cast<std::size_t>(vals[i].second);
            if (vals[i].first == vals[i + 1].first) continue;
            const std::size_t nl = i + 1;
            const std::size_t nr = n - nl;
            const double imp =
                (static_cast<double>(nl) * gini(left_pos, nl) +
                 static_cast<double>(nr) * gini(pos - left_pos, nr)) /
                static_cast<double>(n);
            if (imp < best_impurity) {
                best_impurity = imp;
                best_feature = static_cast<int>(f);
                best_threshold = vals[i].first + (vals[i + 1].first - vals[i].first) / 2.0;
            }
        }
    }

    if (best_feature < 0) return make_leaf();  // all candidate features constant

    auto mid_it = std::stable_partition(
        rows.begin() + static_cast<std::ptrdiff_t>(lo),
        rows.begin() + static_cast<std::ptrdiff_t>(hi), [&](std::size_t r) {
            return X(static_cast<Eigen::Index>(r),
                     static_cast<Eigen::Index>(best_feature)) <= best_threshold;
        });
    const std::size_t mid =
        static_cast<std::size_t>(mid_it - rows.begin());
    if (mid == lo || mid == hi) return make_leaf();

    Node node;
    node.feature = best_feature;
    node.threshold = best_threshold;
    nodes_.push_back(node);
    const int index = static_cast<int>(nodes_.size() - 1);
    const int left = build(X, y, rows, lo, mid, depth + 1, opts, mix_seed(node_seed, 1));
    const int right = build(X, y, rows, mid, hi, depth + 1, opts, mix_seed(node_seed, 2));
    nodes_[static_cast<std::size_t>(index)].left = left;
    nodes_[static_cast<std::size_t>(index)].right = right;
    return index;
}

int DecisionTree::predict(const Eigen::VectorXd& x) const {
    std::size_t at = 0;
    while (nodes_[at].feature >= 0) {
        at = static_cast<std::size_t>(x(nodes_[at].feature) <= nodes_[at].threshold
                                          ? nodes_[at].left
                                          : nodes_[at].right);
    }
    return nodes_[at].label;
}

void RandomForest::fit(const Eigen::MatrixXd& X, const std::vector<int>& y,
                       const Options& opts) {
    const std::size_t n = static_cast<std::size_t>(X.rows());
    const std::size_t d = static_cast<std::size_t>(X.cols());
    const auto mtry = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(d))));

    trees_.assign(opts.n_trees, DecisionTree());
    for (std::size_t t = 0; t < opts.n_trees; ++t) {
        std::mt19937_64 rng(mix_seed(opts.seed, t));
        std::uniform_int_distribution<std::size_t> dist(0, n - 1);
        std::vector<std::size_t> sample(n);
        for (auto& s : sample) s = dist(rng);

        DecisionTree::Options topt;
        topt.features_per_split = mtry;
        topt.seed = mix_seed(opts.seed, t * 2 + 1);
        trees_[t].fit_rows(X, y, sample, topt);
    }
}

int RandomForest::predict(const Eigen::VectorXd& x) const {
    std::size_t votes = 0;
    for (const auto& tree : trees_) {
        votes += static_cast<std::size_t>(tree.predict(x));
    }
    // majority, ties to the negative class
    return votes * 2 > trees_.size() ? 1 : 0;
}

}  // namespace metaselect
