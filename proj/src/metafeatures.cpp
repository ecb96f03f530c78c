#include "metaselect/metafeatures.hpp"

#include "metaselect/errors.hpp"
#include "metaselect/preprocess.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace metaselect {

using nlohmann::json;

const std::array<const char*, 12>& MetaFeatureVector::field_names() {
    static const std::array<const char*, 12> names = {
        "n_rows",      "n_cols",      "rows_to_cols", "n_discrete",
        "max_factors", "min_factors", "avg_factors",  "n_continuous",
        "grad_avg",    "grad_min",    "grad_max",     "grad_std"};
    return names;
}

double MetaFeatureVector::field(const std::string& name) const {
    const auto& names = field_names();
    const auto values = as_array();
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (name == names[i]) return values[i];
    }
    throw ConfigError("unknown meta-feature: " + name);
}

double column_gradient(const std::vector<double>& column) {
    if (column.empty()) throw DataError("column_gradient: empty column");
    if (column.size() < 2) return 0.0;  // no consecutive pairs
    auto [scaled, params] = minmax_scale(column);
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < scaled.size(); ++i) {
        sum += std::abs(scaled[i + 1] - scaled[i]);
    }
    return sum / static_cast<double>(scaled.size() - 1);
}

MetaFeatureVector extract(const DatasetTable& table) {
    if (table.row_count < 2) throw DataError("extract: need at least 2 rows");
    auto preds = table.predictors();
    if (preds.empty()) throw DataError("extract: table has no predictor columns");

    MetaFeatureVector mf;
    mf.n_rows = static_cast<double>(table.row_count);
    mf.n_cols = static_cast<double>(preds.size());
    mf.rows_to_cols = mf.n_rows / mf.n_cols;

    std::vector<double> factor_counts;
    std::vector<double> gradients;
    for (const Column* c : preds) {
        if (c->kind == ColumnKind::Categorical) {
            std::set<std::string> distinct(c->categorical.begin(), c->categorical.end());
            factor_counts.push_back(static_cast<double>(distinct.size()));
        } else {
            gradients.push_back(column_gradient(c->numeric));
        }
    }

    mf.n_discrete = static_cast<double>(factor_counts.size());
    mf.n_continuous = static_cast<double>(gradients.size());
    if (!factor_counts.empty()) {
        mf.max_factors = *std::max_element(factor_counts.begin(), factor_counts.end());
        mf.min_factors = *std::min_element(factor_counts.begin(), factor_counts.end());
        double sum = 0;
        for (double f : factor_counts) sum += f;
        mf.avg_factors = sum / static_cast<double>(factor_counts.size());
    }
    if (!gradients.empty()) {
        mf.grad_max = *std::max_element(gradients.begin(), gradients.end());
        mf.grad_min = *std::min_element(gradients.begin(), gradients.end());
        double sum = 0;
        for (double g : gradients) sum += g;
        mf.grad_avg = sum / static_cast<double>(gradients.size());
        double ss = 0;
        for (double g : gradients) ss += (g - mf.grad_avg) * (g - mf.grad_avg);
        mf.grad_std = std::sqrt(ss / static_cast<double>(gradients.size()));
    }
    return mf;
}

std::string metafeatures_to_json(const MetaFeatureVector& mf) {
    // ordered_json keeps the fields in their canonical order
    nlohmann::ordered_json doc;
    const auto& names = MetaFeatureVector::field_names();
    const auto values = mf.as_array();
    for (std::size_t i = 0; i < names.size(); ++i) doc[names[i]] = values[i];
    return doc.dump(2);
}

MetaFeatureVector metafeatures_from_json(const std::string& json_text) {
    json doc = json::parse(json_text);
    MetaFeatureVector mf;
    mf.n_rows = doc.at("n_rows");
    mf.n_cols = doc.at("n_cols");
    mf.rows_to_cols = doc.at("rows_to_cols");
    mf.n_discrete = doc.at("n_discrete");
    mf.max_factors = doc.at("max_factors");
    mf.min_factors = doc.at("min_factors");
    mf.avg_factors = doc.at("avg_factors");
    mf.n_continuous = doc.at("n_continuous");
    mf.grad_avg = doc.at("grad_avg");
    mf.grad_min = doc.at("grad_min");
    mf.grad_max = doc.at("grad_max");
    mf.grad_std = doc.at("grad_std");
    return mf;
}

}  // namespace metaselect
