#ifndef METASELECT_LEARNERS_HPP
#define METASELECT_LEARNERS_HPP

#include "metaselect/preprocess.hpp"

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace metaselect {

struct LearnerSpec {
    std::string algorithm_id;  // decision_tree, random_forest, naive_bayes,
                               // kernel_svc, kernel_svr
    std::map<std::string, double> hyperparams;
    std::uint64_t seed = 0;

    double param(const std::string& key, double fallback) const {
        auto it = hyperparams.find(key);
        return it == hyperparams.end() ? fallback : it->second;
    }
};

const std::vector<std::string>& known_algorithms();

class TrainedModel {
public:
    virtual ~TrainedModel() = default;

    /// One 0/1 label per row; throws SchemaError when the column count does
    /// not match the training schema.
    std::vector<int> predict(const Eigen::MatrixXd& X) const;

    const LearnerSpec& spec() const { return spec_; }
    std::size_t n_features() const { return n_features_; }

protected:
    virtual std::vector<int> predict_impl(const Eigen::MatrixXd& X) const = 0;

    LearnerSpec spec_;
    std::size_t n_features_ = 0;
};

std::unique_ptr<TrainedModel> train(const LearnerSpec& spec, const Eigen::MatrixXd& X,
                                    const std::vector<int>& y);

/// Wall-clock seconds for one train + predict pass.
double measure_runtime(const LearnerSpec& spec, const Eigen::MatrixXd& X_train,
                       const std::vector<int>& y_train, const Eigen::MatrixXd& X_test);

}  // namespace metaselect

#endif
