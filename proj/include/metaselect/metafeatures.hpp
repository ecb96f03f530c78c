#ifndef METASELECT_METAFEATURES_HPP
#define METASELECT_METAFEATURES_HPP

#include "metaselect/dataset.hpp"

#include <array>
#include <string>
#include <vector>

namespace metaselect {

/// The 12 dataset descriptors used as meta-learner predictors.
struct MetaFeatureVector {
    double n_rows = 0;
    double n_cols = 0;
    double rows_to_cols = 0;
    double n_discrete = 0;
    double max_factors = 0;
    double min_factors = 0;
    double avg_factors = 0;
    double n_continuous = 0;
    double grad_avg = 0;
    double grad_min = 0;
    double grad_max = 0;
    double grad_std = 0;

    std::array<double, 12> as_array() const {
        return {n_rows,     n_cols,     rows_to_cols, n_discrete,
                max_factors, min_factors, avg_factors, n_continuous,
                grad_avg,   grad_min,   grad_max,     grad_std};
    }

    /// Field value by name; throws ConfigError for unknown names.
    double field(const std::string& name) const;

    static const std::array<const char*, 12>& field_names();
};

/// Mean absolute consecutive difference of the min-max-scaled column, in
/// stored row order. Constant columns give 0.
double column_gradient(const std::vector<double>& column);

MetaFeatureVector extract(const DatasetTable& table);

std::string metafeatures_to_json(const MetaFeatureVector& mf);
MetaFeatureVector metafeatures_from_json(const std::string& json_text);

}  // namespace metaselect

#endif
