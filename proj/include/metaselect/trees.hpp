#ifndef METASELECT_TREES_HPP
#define METASELECT_TREES_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace metaselect {

/// CART-style binary classification tree, Gini impurity splits.
class DecisionTree {
public:
    struct Options {
        int max_depth = -1;              // -1: unlimited
        std::size_t min_samples_split = 2;
        std::size_t features_per_split = 0;  // 0: all features
        std::uint64_t seed = 0;
    };

    void fit(const Eigen::MatrixXd& X, const std::vector<int>& y, const Options& opts);
    void fit_rows(const Eigen::MatrixXd& X, const std::vector<int>& y,
                  const std::vector<std::size_t>& rows, const Options& opts);
    int predict(const Eigen::VectorXd& x) const;

private:
    struct Node {
        int feature = -1;     // -1 marks a leaf
        double threshold = 0.0;
        int left = -1;
        int right = -1;
        int label = 0;
    };

    int build(const Eigen::MatrixXd& X, const std::vector<int>& y,
              std::vector<std::size_t>& rows, std::size_t lo, std::size_t hi, int depth,
              const Options& opts, std::uint64_t node_seed);

    std::vector<Node> nodes_;
};

/// Bootstrap ensemble of Gini trees with per-split feature subsampling.
class RandomForest {
public:
    struct Options {
        std::size_t n_trees = 100;
        std::uint64_t seed = 0;
    };

    void fit(const Eigen::MatrixXd& X, const std::vector<int>& y, const Options& opts);
    int predict(const Eigen::VectorXd& x) const;

private:
    std::vector<DecisionTree> trees_;
};

}  // namespace metaselect

#endif
