#ifndef METASELECT_PREPROCESS_HPP
#define METASELECT_PREPROCESS_HPP

#include "metaselect/dataset.hpp"

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

namespace metaselect {

/// Dense real feature matrix fed to the base learners.
struct NumericMatrix {
    Eigen::MatrixXd values;
    std::vector<std::string> col_names;

    std::size_t rows() const { return static_cast<std::size_t>(values.rows()); }
    std::size_t cols() const { return static_cast<std::size_t>(values.cols()); }
};

struct MinMaxParams {
    double min = 0.0;
    double max = 0.0;
};

struct PcaParams {
    Eigen::VectorXd means;
    Eigen::MatrixXd components;    // columns are principal axes, descending variance
    Eigen::VectorXd explained_variance;
};

/// Fitted preprocessing pipeline: per-column min-max, joint PCA rotation over
/// the numeric block, per-component min-max, and one-hot category lists.
struct PreprocessModel {
    std::vector<std::string> numeric_cols;
    std::vector<std::string> categorical_cols;
    std::vector<MinMaxParams> minmax1;     // one per numeric column
    PcaParams pca;
    std::vector<MinMaxParams> minmax2;     // one per principal component
    std::vector<std::vector<std::string>> onehot;  // per categorical column
};

/// Scale to [0,1]. With params absent, fits (x-min)/(max-min); a constant
/// column maps to zeros. With params present, applies them and clamps.
std::pair<std::vector<double>, MinMaxParams> minmax_scale(
    const std::vector<double>& column, const MinMaxParams* params = nullptr);

/// One indicator column per category in first-occurrence order. Unseen
/// categories at apply time produce an all-zero row.
std::pair<Eigen::MatrixXd, std::vector<std::string>> onehot_encode(
    const std::vector<std::string>& column,
    const std::vector<std::string>* categories = nullptr);

/// Full-rank PCA rotation (no dimensionality reduction). Component signs are
/// fixed so the largest-magnitude loading of each component is positive.
std::pair<Eigen::MatrixXd, PcaParams> pca_rotate(const Eigen::MatrixXd& matrix,
                                                 const PcaParams* model = nullptr);

PreprocessModel fit_pipeline(const DatasetTable& train);
NumericMatrix transform(const PreprocessModel& model, const DatasetTable& table);

/// Versioned JSON export/import of a fitted pipeline.
std::string preprocess_model_to_json(const PreprocessModel& model);
PreprocessModel preprocess_model_from_json(const std::string& json_text);

}  // namespace metaselect

#endif
