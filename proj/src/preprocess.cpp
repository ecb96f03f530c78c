#include "metaselect/preprocess.hpp"

#include "metaselect/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace metaselect {

using nlohmann::json;

std::pair<std::vector<double>, MinMaxParams> minmax_scale(
    const std::vector<double>& column, const MinMaxParams* params) {
    if (column.empty()) throw DataError("minmax_scale: empty column");
    MinMaxParams p;
    if (params) {
        p = *params;
    } else {
        auto [mn, mx] = std::minmax_element(column.begin(), column.end());
        p.min = *mn;
        p.max = *mx;
    }
    std::vector<double> out(column.size());
    const double range = p.max - p.min;
    for (std::size_t i = 0; i < column.size(); ++i) {
        double v = range == 0.0 ? 0.0 : (column[i] - p.min) / range;
        out[i] = std::clamp(v, 0.0, 1.0);
    }
    return {std::move(out), p};
}

std::pair<Eigen::MatrixXd, std::vector<std::string>> onehot_encode(
    const std::vector<std::string>& column, const std::vector<std::string>* categories) {
    if (column.empty()) throw DataError("onehot_encode: empty column");
    std::vector<std::string> cats;
    if (categories) {
        cats = *categories;
    } else {
        for (const auto& v : column) {
            if (std::find(cats.begin(), cats.end(), v) == cats.end()) cats.push_back(v);
        }
    }
    Eigen::MatrixXd ind = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(column.size()),
                                                static_cast<Eigen::Index>(cats.size()));
    for (std::size_t r = 0; r < column.size(); ++r) {
        auto it = std::find(cats.begin(), cats.end(), column[r]);
        if (it != cats.end()) {
            ind(static_cast<Eigen::Index>(r),
                static_cast<Eigen::Index>(it - cats.begin())) = 1.0;
        }
    }
    return {std::move(ind), std::move(cats)};
}

std::pair<Eigen::MatrixXd, PcaParams> pca_rotate(const Eigen::MatrixXd& matrix,
                                                 const PcaParams* model) {
    PcaParams p;
    if (model) {
        p = *model;
        if (p.components.rows() != matrix.cols()) {
            throw SchemaError("pca_rotate: fitted on " + std::to_string(p.components.rows()) +
                              " columns, applied to " + std::to_string(matrix.cols()));
        }
    } else {
        if (matrix.rows() < 2) throw DataError("pca_rotate: need at least 2 rows to fit");
        p.means = matrix.colwise().mean();
        Eigen::MatrixXd centered = matrix.rowwise() - p.means.transpose();
        Eigen::MatrixXd cov = centered.transpose() * centered /
                              static_cast<double>(matrix.rows() - 1);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
        if (solver.info() != Eigen::Success) {
            throw DataError("pca_rotate: eigendecomposition failed");
        }
        const Eigen::Index d = matrix.cols();
        p.components.resize(d, d);
        p.explained_variance.resize(d);
        // Eigen returns ascending eigenvalues; reverse to descending.
        for (Eigen::Index j = 0; j < d; ++j) {
            p.components.col(j) = solver.eigenvectors().col(d - 1 - j);
            p.explained_variance(j) = solver.eigenvalues()(d - 1 - j);
        }
        // Sign convention: largest-magnitude loading positive.
        for (Eigen::Index j = 0; j < d; ++j) {
            Eigen::Index argmax = 0;
            p.components.col(j).cwiseAbs().maxCoeff(&argmax);
            if (p.components(argmax, j) < 0) p.components.col(j) = -p.components.col(j);
        }
    }
    Eigen::MatrixXd rotated = (matrix.rowwise() - p.means.transpose()) * p.components;
    return {std::move(rotated), std::move(p)};
}

namespace {

void check_schema(const PreprocessModel& model, const DatasetTable& table) {
    for (const auto& name : model.numeric_cols) {
        const Column* c = table.find_column(name);
        if (!c || c->kind != ColumnKind::Numeric) {
            throw SchemaError("schema mismatch: expected numeric column " + name);
        }
    }
    for (const auto& name : model.categorical_cols) {
        const Column* c = table.find_column(name);
        if (!c || c->kind != ColumnKind::Categorical) {
            throw SchemaError("schema mismatch: expected categorical column " + name);
        }
    }
}

}  // namespace

PreprocessModel fit_pipeline(const DatasetTable& train) {
    PreprocessModel model;
    for (const Column* c : train.predictors()) {
        if (c->kind == ColumnKind::Numeric) {
            model.numeric_cols.push_back(c->name);
        } else {
            model.categorical_cols.push_back(c->name);
        }
    }

    if (!model.numeric_cols.empty()) {
        Eigen::MatrixXd block(static_cast<Eigen::Index>(train.row_count),
                              static_cast<Eigen::Index>(model.numeric_cols.size()));
        for (std::size_t j = 0; j < model.numeric_cols.size(); ++j) {
            auto [scaled, params] = minmax_scale(train.column(model.numeric_cols[j]).numeric);
            model.minmax1.push_back(params);
            for (std::size_t r = 0; r < scaled.size(); ++r) {
                block(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = scaled[r];
            }
        }
        auto [rotated, pca] = pca_rotate(block);
        model.pca = std::move(pca);
        for (Eigen::Index j = 0; j < rotated.cols(); ++j) {
            std::vector<double> comp(rotated.col(j).data(),
                                     rotated.col(j).data() + rotated.rows());
            auto [scaled, params] = minmax_scale(comp);
            model.minmax2.push_back(params);
        }
    }

    for (const auto& name : model.categorical_cols) {
        auto [ind, cats] = onehot_encode(train.column(name).categorical);
        model.onehot.push_back(std::move(cats));
    }
    return model;
}

NumericMatrix transform(const PreprocessModel& model, const DatasetTable& table) {
    check_schema(model, table);
    const auto n = static_cast<Eigen::Index>(table.row_count);

    std::size_t total_cols = model.minmax2.size();
    for (const auto& cats : model.onehot) total_cols += cats.size();

    NumericMatrix out;
    out.values.resize(n, static_cast<Eigen::Index>(total_cols));
    Eigen::Index at = 0;

    if (!model.numeric_cols.empty()) {
        Eigen::MatrixXd block(n, static_cast<Eigen::Index>(model.numeric_cols.size()));
        for (std::size_t j = 0; j < model.numeric_cols.size(); ++j) {
            auto [scaled, params] =
                minmax_scale(table.column(model.numeric_cols[j]).numeric, &model.minmax1[j]);
            for (std::size_t r = 0; r < scaled.size(); ++r) {
                block(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = scaled[r];
            }
        }
        auto [rotated, pca] = pca_rotate(block, &model.pca);
        for (Eigen::Index j = 0; j < rotated.cols(); ++j) {
            std::vector<double> comp(rotated.col(j).data(),
                                     rotated.col(j).data() + rotated.rows());
            auto [scaled, params] =
                minmax_scale(comp, &model.minmax2[static_cast<std::size_t>(j)]);
            for (Eigen::Index r = 0; r < n; ++r) {
                out.values(r, at) = scaled[static_cast<std::size_t>(r)];
            }
            out.col_names.push_back("pc" + std::to_string(j + 1));
            ++at;
        }
    }

    for (std::size_t k = 0; k < model.categorical_cols.size(); ++k) {
        auto [ind, cats] =
            onehot_encode(table.column(model.categorical_cols[k]).categorical,
                          &model.onehot[k]);
        out.values.block(0, at, n, ind.cols()) = ind;
        for (const auto& cat : cats) {
            out.col_names.push_back(model.categorical_cols[k] + "=" + cat);
        }
        at += ind.cols();
    }
    return out;
}

namespace {

json vector_to_json(const Eigen::VectorXd& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

Eigen::VectorXd vector_from_json(const json& arr) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
    for (std::size_t i = 0; i < arr.size(); ++i) v(static_cast<Eigen::Index>(i)) = arr[i];
    return v;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
    // row-major nested arrays
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const json& rows) {
    if (rows.empty()) return {};
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(rows[0].size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < rows[r].size(); ++c) {
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
        }
    }
    return m;
}

}  // namespace

std::string preprocess_model_to_json(const PreprocessModel& model) {
    json doc;
    doc["format"] = "metaselect-preprocess";
    doc["version"] = 1;
    doc["numeric_cols"] = model.numeric_cols;
    doc["categorical_cols"] = model.categorical_cols;
    json mm1 = json::array();
    for (const auto& p : model.minmax1) mm1.push_back({{"min", p.min}, {"max", p.max}});
    doc["minmax1"] = std::move(mm1);
    doc["pca"] = {{"means", vector_to_json(model.pca.means)},
                  {"components", matrix_to_json(model.pca.components)},
                  {"explained_variance", vector_to_json(model.pca.explained_variance)}};
    json mm2 = json::array();
    for (const auto& p : model.minmax2) mm2.push_back({{"min", p.min}, {"max", p.max}});
    doc["minmax2"] = std::move(mm2);
    doc["onehot"] = model.onehot;
    return doc.dump(2);
}

PreprocessModel preprocess_model_from_json(const std::string& json_text) {
    json doc = json::parse(json_text);
    if (doc.value("format", "") != "metaselect-preprocess" || doc.value("version", 0) != 1) {
        throw ConfigError("unrecognized preprocess model document");
    }
    PreprocessModel model;
    model.numeric_cols = doc["numeric_cols"].get<std::vector<std::string>>();
    model.categorical_cols = doc["categorical_cols"].get<std::vector<std::string>>();
    for (const auto& p : doc["minmax1"]) {
        model.minmax1.push_back({p["min"].get<double>(), p["max"].get<double>()});
    }
    model.pca.means = vector_from_json(doc["pca"]["means"]);
    model.pca.components = matrix_from_json(doc["pca"]["components"]);
    model.pca.explained_variance = vector_from_json(doc["pca"]["explained_variance"]);
    for (const auto& p : doc["minmax2"]) {
        model.minmax2.push_back({p["min"].get<double>(), p["max"].get<double>()});
    }
    model.onehot = doc["onehot"].get<std::vector<std::vector<std::string>>>();
    return model;
}

}  // namespace metaselect
