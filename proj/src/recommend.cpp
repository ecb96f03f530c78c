#include "metaselect/recommend.hpp"

#include "metaselect/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <set>

namespace metaselect {

using nlohmann::json;

int Ranking::rank_of(const std::string& algorithm_id) const {
    for (const auto& e : entries) {
        if (e.algorithm_id == algorithm_id) return e.rank;
    }
    throw ConfigError("algorithm not in ranking: " + algorithm_id);
}

const std::string& Ranking::top() const {
    if (entries.empty()) throw ConfigError("empty ranking");
    return entries.front().algorithm_id;
}

Ranking make_ranking(const std::map<std::string, double>& scores,
                     const std::string& strategy) {
    Ranking r;
    r.strategy = strategy;
    for (const auto& [id, score] : scores) r.entries.push_back({id, score, 0});
    std::sort(r.entries.begin(), r.entries.end(), [](const auto& a, const auto& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.algorithm_id < b.algorithm_id;
    });
    for (std::size_t i = 0; i < r.entries.size(); ++i) {
        r.entries[i].rank = static_cast<int>(i) + 1;
    }
    return r;
}

void RuleTree::validate() const {
    if (nodes.empty()) throw ConfigError("rule tree has no nodes");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const Node& n = nodes[i];
        if (n.is_leaf()) {
            if (n.order.empty()) {
                throw ConfigError("rule tree leaf " + std::to_string(i) + " has no order");
            }
            std::set<std::string> distinct(n.order.begin(), n.order.end());
            if (distinct.size() != n.order.size()) {
                throw ConfigError("rule tree leaf " + std::to_string(i) +
                                  " repeats an algorithm");
            }
        } else {
            if (n.if_true < 0 || n.if_false < 0 ||
                static_cast<std::size_t>(n.if_true) >= nodes.size() ||
                static_cast<std::size_t>(n.if_false) >= nodes.size()) {
                throw ConfigError("rule tree node " + std::to_string(i) +
                                  " has invalid children");
            }
            // children strictly after the parent, so every walk terminates
            if (static_cast<std::size_t>(n.if_true) <= i ||
                static_cast<std::size_t>(n.if_false) <= i) {
                throw ConfigError("rule tree node " + std::to_string(i) +
                                  " points backwards");
            }
            const bool comparison = !n.feature.empty();
            const bool tag_test = !n.tag.empty();
            if (comparison == tag_test) {
                throw ConfigError("rule tree node " + std::to_string(i) +
                                  " must have exactly one predicate");
            }
        }
    }
}

namespace {

bool compare(double lhs, const std::string& op, double rhs) {
    if (op == "<") return lhs < rhs;
    if (op == "<=") return lhs <= rhs;
    if (op == ">") return lhs > rhs;
    if (op == ">=") return lhs >= rhs;
    if (op == "==") return lhs == rhs;
    throw ConfigError("unknown rule operator: " + op);
}

bool has_tag(const ProblemCharacterization& pc, const std::string& factor,
             const std::string& tag) {
    if (factor == "data") return pc.data_considerations.count(tag) > 0;
    if (factor == "resources") return pc.resource_considerations.count(tag) > 0;
    if (factor == "experience") return pc.experience_considerations.count(tag) > 0;
    throw ConfigError("unknown factor in rule tree: " + factor);
}

}  // namespace

const std::vector<std::string>& RuleTree::leaf_for(const MetaFeatureVector& mf,
                                                   const ProblemCharacterization& pc) const {
    std::size_t at = 0;
    while (!nodes[at].is_leaf()) {
        const Node& n = nodes[at];
        bool taken = n.feature.empty() ? has_tag(pc, n.tag_factor, n.tag)
                                       : compare(mf.field(n.feature), n.op, n.value);
        at = static_cast<std::size_t>(taken ? n.if_true : n.if_false);
    }
    return nodes[at].order;
}

RuleTree rule_tree_from_json(const std::string& json_text) {
    json doc = json::parse(json_text);
    RuleTree tree;
    for (const auto& jn : doc.at("nodes")) {
        RuleTree::Node n;
        if (jn.contains("order")) {
            n.order = jn["order"].get<std::vector<std::string>>();
        } else {
            if (jn.contains("feature")) {
                n.feature = jn["feature"].get<std::string>();
                n.op = jn.at("op").get<std::string>();
                n.value = jn.at("value").get<double>();
            } else {
                n.tag_factor = jn.at("factor").get<std::string>();
                n.tag = jn.at("tag").get<std::string>();
            }
            n.if_true = jn.at("if_true").get<int>();
            n.if_false = jn.at("if_false").get<int>();
        }
        tree.nodes.push_back(std::move(n));
    }
    tree.validate();
    return tree;
}

std::string rule_tree_to_json(const RuleTree& tree) {
    json nodes = json::array();
    for (const auto& n : tree.nodes) {
        json jn;
        if (n.is_leaf()) {
            jn["order"] = n.order;
        } else {
            if (!n.feature.empty()) {
                jn["feature"] = n.feature;
                jn["op"] = n.op;
                jn["value"] = n.value;
            } else {
                jn["factor"] = n.tag_factor;
                jn["tag"] = n.tag;
            }
            jn["if_true"] = n.if_true;
            jn["if_false"] = n.if_false;
        }
        nodes.push_back(std::move(jn));
    }
    return json{{"nodes", nodes}}.dump(2);
}

Ranking rank_rules(const RuleTree& tree, const MetaFeatureVector& mf,
                   const ProblemCharacterization& pc,
                   const std::vector<std::string>& candidates) {
    if (candidates.empty()) throw ConfigError("rank_rules: no candidates");
    tree.validate();
    const auto& order = tree.leaf_for(mf, pc);

    Ranking r;
    r.strategy = "rules";
    const std::set<std::string> wanted(candidates.begin(), candidates.end());
    for (const auto& id : order) {
        if (!wanted.count(id)) continue;
        RankingEntry e;
        e.algorithm_id = id;
        e.rank = static_cast<int>(r.entries.size()) + 1;
        e.score = static_cast<double>(wanted.size() - r.entries.size());
        r.entries.push_back(std::move(e));
    }
    if (r.entries.size() != candidates.size()) {
        for (const auto& id : candidates) {
            if (std::none_of(order.begin(), order.end(),
                             [&](const std::string& o) { return o == id; })) {
                throw ConfigError("rule tree leaf omits candidate: " + id);
            }
        }
    }
    return r;
}

MetaModel MetaModel::train(const std::vector<ExperienceRecord>& experience) {
    if (experience.empty()) throw DataError("train_meta: empty experience");

    std::map<std::string, std::vector<const ExperienceRecord*>> by_algo;
    for (const auto& rec : experience) {
        if (rec.mean_recall < 0.0 || rec.mean_recall > 1.0) {
            throw DataError("train_meta: recall out of [0,1] for " + rec.algorithm_id);
        }
        by_algo[rec.algorithm_id].push_back(&rec);
    }
    for (const auto& [id, recs] : by_algo) {
        if (recs.size() < 2) {
            throw DataError("train_meta: algorithm " + id +
                            " has fewer than 2 training pairs");
        }
    }

    MetaModel model;
    // scaling ranges over the whole experience set
    model.scaling_.resize(12);
    for (std::size_t d = 0; d < 12; ++d) {
        std::vector<double> column;
        column.reserve(experience.size());
        for (const auto& rec : experience) column.push_back(rec.meta_features.as_array()[d]);
        auto [scaled, params] = minmax_scale(column);
        model.scaling_[d] = params;
    }

    auto scale_row = [&](const MetaFeatureVector& mf) {
        Eigen::VectorXd row(12);
        const auto raw = mf.as_array();
        for (std::size_t d = 0; d < 12; ++d) {
            std::vector<double> one = {raw[d]};
            row(static_cast<Eigen::Index>(d)) =
                minmax_scale(one, &model.scaling_[d]).first[0];
        }
        return row;
    };

    for (const auto& [id, recs] : by_algo) {
        Eigen::MatrixXd X(static_cast<Eigen::Index>(recs.size()), 12);
        std::vector<double> z(recs.size());
        for (std::size_t i = 0; i < recs.size(); ++i) {
            X.row(static_cast<Eigen::Index>(i)) = scale_row(recs[i]->meta_features);
            z[i] = recs[i]->mean_recall;
        }
        SvmConfig cfg;
        cfg.C = 1.0;
        cfg.gamma = rbf_gamma_scale(X);
        cfg.epsilon = 0.1;
        cfg.tol = 1e-3;
        model.regressors_[id].fit(X, z, cfg);
    }
    return model;
}

std::map<std::string, double> MetaModel::predict_recall(const MetaFeatureVector& mf) const {
    if (regressors_.empty()) throw ConfigError("meta-model is not fitted");
    Eigen::VectorXd row(12);
    const auto raw = mf.as_array();
    for (std::size_t d = 0; d < 12; ++d) {
        std::vector<double> one = {raw[d]};
        row(static_cast<Eigen::Index>(d)) = minmax_scale(one, &scaling_[d]).first[0];
    }
    std::map<std::string, double> out;
    for (const auto& [id, svr] : regressors_) out[id] = svr.predict(row);
    return out;
}

Ranking MetaModel::rank(const MetaFeatureVector& mf) const {
    return make_ranking(predict_recall(mf), "meta");
}

std::vector<std::string> MetaModel::algorithms() const {
    std::vector<std::string> out;
    for (const auto& [id, svr] : regressors_) out.push_back(id);
    return out;
}

std::string MetaModel::to_json() const {
    json doc;
    doc["format"] = "metaselect-metamodel";
    doc["version"] = 1;
    json scaling = json::array();
    for (const auto& p : scaling_) scaling.push_back({{"min", p.min}, {"max", p.max}});
    doc["scaling"] = std::move(scaling);
    json regs;
    for (const auto& [id, svr] : regressors_) {
        json sv = json::array();
        for (Eigen::Index r = 0; r < svr.support_vectors().rows(); ++r) {
            json row = json::array();
            for (Eigen::Index c = 0; c < svr.support_vectors().cols(); ++c) {
                row.push_back(svr.support_vectors()(r, c));
            }
            sv.push_back(std::move(row));
        }
        regs[id] = {{"support_vectors", std::move(sv)},
                    {"dual_coef", svr.dual_coef()},
                    {"bias", svr.bias()},
                    {"gamma", svr.gamma()}};
    }
    doc["regressors"] = std::move(regs);
    return doc.dump(2);
}

MetaModel MetaModel::from_json(const std::string& json_text) {
    json doc = json::parse(json_text);
    if (doc.value("format", "") != "metaselect-metamodel" || doc.value("version", 0) != 1) {
        throw ConfigError("unrecognized meta-model document");
    }
    MetaModel model;
    for (const auto& p : doc.at("scaling")) {
        model.scaling_.push_back({p["min"].get<double>(), p["max"].get<double>()});
    }
    if (model.scaling_.size() != 12) {
        throw ConfigError("meta-model scaling must have 12 entries");
    }
    for (const auto& [id, jr] : doc.at("regressors").items()) {
        const auto& jsv = jr.at("support_vectors");
        Eigen::MatrixXd sv(static_cast<Eigen::Index>(jsv.size()), 12);
        for (std::size_t r = 0; r < jsv.size(); ++r) {
            for (std::size_t c = 0; c < 12; ++c) {
                sv(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = jsv[r][c];
            }
        }
        KernelSvr svr;
        svr.restore(std::move(sv), jr.at("dual_coef").get<std::vector<double>>(),
                    jr.at("bias").get<double>(), jr.at("gamma").get<double>());
        model.regressors_[id] = std::move(svr);
    }
    return model;
}

}  // namespace metaselect
