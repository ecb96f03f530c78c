#include "metaselect/learners.hpp"

#include "metaselect/errors.hpp"
#include "metaselect/svm.hpp"
#include "metaselect/trees.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace metaselect {

const std::vector<std::string>& known_algorithms() {
    static const std::vector<std::string> ids = {
        "decision_tree", "random_forest", "naive_bayes", "kernel_svc", "kernel_svr"};
    return ids;
}

std::vector<int> TrainedModel::predict(const Eigen::MatrixXd& X) const {
    if (X.rows() == 0) return {};
    if (static_cast<std::size_t>(X.cols()) != n_features_) {
        throw SchemaError("predict: model fitted on " + std::to_string(n_features_) +
                          " features, got " + std::to_string(X.cols()));
    }
    return predict_impl(X);
}

namespace {

class TreeModel : public TrainedModel {
public:
    TreeModel(const LearnerSpec& spec, const Eigen::MatrixXd& X, const std::vector<int>& y) {
        spec_ = spec;
        n_features_ = static_cast<std::size_t>(X.cols());
        DecisionTree::Options opts;
        opts.max_depth = static_cast<int>(spec.param("max_depth", -1));
        opts.min_samples_split = static_cast<std::size_t>(spec.param("min_samples_split", 2));
        opts.seed = spec.seed;
        tree_.fit(X, y, opts);
    }

protected:
    std::vector<int> predict_impl(const Eigen::MatrixXd& X) const override {
        std::vector<int> out(static_cast<std::size_t>(X.rows()));
        for (Eigen::Index r = 0; r < X.rows(); ++r) {
            out[static_cast<std::size_t>(r)] = tree_.predict(X.row(r).transpose());
        }
        return out;
    }

private:
    DecisionTree tree_;
};

class ForestModel : public TrainedModel {
public:
    ForestModel(const LearnerSpec& spec, const Eigen::MatrixXd& X, const std::vector<int>& y) {
        spec_ = spec;
        n_features_ = static_cast<std::size_t>(X.cols());
        RandomForest::Options opts;
        opts.n_trees = static_cast<std::size_t>(spec.param("n_trees", 100));
        opts.seed = spec.seed;
        forest_.fit(X, y, opts);
    }

protected:
    std::vector<int> predict_impl(const Eigen::MatrixXd& X) const override {
        std::vector<int> out(static_cast<std::size_t>(X.rows()));
        for (Eigen::Index r = 0; r < X.rows(); ++r) {
            out[static_cast<std::size_t>(r)] = forest_.predict(X.row(r).transpose());
        }
        return out;
    }

private:
    RandomForest forest_;
};

/// Gaussian per-feature likelihoods with variance smoothing.
class NaiveBayesModel : public TrainedModel {
public:
    NaiveBayesModel(const LearnerSpec& spec, const Eigen::MatrixXd& X,
                    const std::vector<int>& y) {
        spec_ = spec;
        n_features_ = static_cast<std::size_t>(X.cols());
        const Eigen::Index n = X.rows();
        const Eigen::Index d = X.cols();

        Eigen::VectorXd overall_mean = X.colwise().mean();
        Eigen::VectorXd overall_var =
            (X.rowwise() - overall_mean.transpose()).array().square().colwise().sum() /
            static_cast<double>(n);
        const double smoothing =
            spec.param("var_smoothing", 1e-9) * overall_var.maxCoeff();

        for (int c = 0; c < 2; ++c) {
            std::vector<Eigen::Index> rows;
            for (Eigen::Index r = 0; r < n; ++r) {
                if (y[static_cast<std::size_t>(r)] == c) rows.push_back(r);
            }
            const double nc = static_cast<double>(rows.size());
            log_prior_[c] = std::log(nc / static_cast<double>(n));
            mean_[c].setZero(d);
            var_[c].setZero(d);
            for (Eigen::Index r : rows) mean_[c] += X.row(r).transpose();
            mean_[c] /= nc;
            for (Eigen::Index r : rows) {
                var_[c] += (X.row(r).transpose() - mean_[c]).array().square().matrix();
            }
            var_[c] = (var_[c] / nc).array() + smoothing;
        }
    }

protected:
    std::vector<int> predict_impl(const Eigen::MatrixXd& X) const override {
        std::vector<int> out(static_cast<std::size_t>(X.rows()));
        for (Eigen::Index r = 0; r < X.rows(); ++r) {
            double score[2];
            for (int c = 0; c < 2; ++c) {
                Eigen::ArrayXd diff = X.row(r).transpose().array() - mean_[c].array();
                score[c] = log_prior_[c] -
                           0.5 * (diff.square() / var_[c].array()).sum() -
                           0.5 * (2.0 * M_PI * var_[c].array()).log().sum();
            }
            // equal scores fall to the negative class
            out[static_cast<std::size_t>(r)] = score[1] > score[0] ? 1 : 0;
        }
        return out;
    }

private:
    double log_prior_[2] = {0, 0};
    Eigen::VectorXd mean_[2];
    Eigen::VectorXd var_[2];
};

class SvcModel : public TrainedModel {
public:
    SvcModel(const LearnerSpec& spec, const Eigen::MatrixXd& X, const std::vector<int>& y) {
        spec_ = spec;
        n_features_ = static_cast<std::size_t>(X.cols());
        SvmConfig cfg;
        cfg.C = spec.param("C", 1.0);
        cfg.gamma = spec.param("gamma", rbf_gamma_scale(X));
        cfg.tol = spec.param("tol", 1e-3);
        svc_.fit(X, y, cfg);
    }

protected:
    std::vector<int> predict_impl(const Eigen::MatrixXd& X) const override {
        std::vector<int> out(static_cast<std::size_t>(X.rows()));
        for (Eigen::Index r = 0; r < X.rows(); ++r) {
            out[static_cast<std::size_t>(r)] = svc_.predict(X.row(r).transpose());
        }
        return out;
    }

private:
    KernelSvc svc_;
};

/// Regression on the 0/1-encoded target, thresholded at 0.5 for labels.
class SvrModel : public TrainedModel {
public:
    SvrModel(const LearnerSpec& spec, const Eigen::MatrixXd& X, const std::vector<int>& y) {
        spec_ = spec;
        n_features_ = static_cast<std::size_t>(X.cols());
        threshold_ = spec.param("threshold", 0.5);
        SvmConfig cfg;
        cfg.C = spec.param("C", 1.0);
        cfg.gamma = spec.param("gamma", rbf_gamma_scale(X));
        cfg.tol = spec.param("tol", 1e-3);
        cfg.epsilon = spec.param("epsilon", 0.1);
        std::vector<double> z(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) z[i] = static_cast<double>(y[i]);
        svr_.fit(X, z, cfg);
    }

protected:
    std::vector<int> predict_impl(const Eigen::MatrixXd& X) const override {
        std::vector<int> out(static_cast<std::size_t>(X.rows()));
        for (Eigen::Index r = 0; r < X.rows(); ++r) {
            out[static_cast<std::size_t>(r)] =
                svr_.predict(X.row(r).transpose()) > threshold_ ? 1 : 0;
        }
        return out;
    }

private:
    KernelSvr svr_;
    double threshold_ = 0.5;
};

}  // namespace

std::unique_ptr<TrainedModel> train(const LearnerSpec& spec, const Eigen::MatrixXd& X,
                                    const std::vector<int>& y) {
    if (static_cast<std::size_t>(X.rows()) != y.size()) {
        throw DataError("train: X has " + std::to_string(X.rows()) + " rows but y has " +
                        std::to_string(y.size()));
    }
    if (y.size() < 2) throw DataError("train: need at least 2 rows");
    if (!X.allFinite()) throw DataError("train: non-finite values in X");
    bool has_pos = std::find(y.begin(), y.end(), 1) != y.end();
    bool has_neg = std::find(y.begin(), y.end(), 0) != y.end();
    if (!has_pos || !has_neg) throw DataError("train: both classes must be present");

    if (spec.algorithm_id == "decision_tree") {
        return std::make_unique<TreeModel>(spec, X, y);
    }
    if (spec.algorithm_id == "random_forest") {
        return std::make_unique<ForestModel>(spec, X, y);
    }
    if (spec.algorithm_id == "naive_bayes") {
        return std::make_unique<NaiveBayesModel>(spec, X, y);
    }
    if (spec.algorithm_id == "kernel_svc") {
        return std::make_unique<SvcModel>(spec, X, y);
    }
    if (spec.algorithm_id == "kernel_svr") {
        return std::make_unique<SvrModel>(spec, X, y);
    }
    throw ConfigError("unknown algorithm: " + spec.algorithm_id);
}

double measure_runtime(const LearnerSpec& spec, const Eigen::MatrixXd& X_train,
                       const std::vector<int>& y_train, const Eigen::MatrixXd& X_test) {
    const auto start = std::chrono::steady_clock::now();
    auto model = train(spec, X_train, y_train);
    (void)model->predict(X_test);
    const auto end = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(end - start).count();
}

}  // namespace metaselect
