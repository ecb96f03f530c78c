#ifndef METASELECT_RECOMMEND_HPP
#define METASELECT_RECOMMEND_HPP

#include "metaselect/metafeatures.hpp"
#include "metaselect/preprocess.hpp"
#include "metaselect/svm.hpp"
#include "metaselect/taxonomy.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace metaselect {

struct RankingEntry {
    std::string algorithm_id;
    double score = 0.0;
    int rank = 0;  // 1 = most preferred
};

struct Ranking {
    std::vector<RankingEntry> entries;  // rank order
    std::string strategy;               // "rules" or "meta"

    int rank_of(const std::string& algorithm_id) const;
    const std::string& top() const;
};

/// Score-ordered ranking: descending score, ties broken by algorithm id.
Ranking make_ranking(const std::map<std::string, double>& scores,
                     const std::string& strategy);

/// Hand-authored logical decision tree over meta-features and
/// characterization tags; leaves carry a total preference order.
struct RuleTree {
    struct Node {
        // internal node: either a meta-feature comparison ...
        std::string feature;
        std::string op;  // one of <, <=, >, >=, ==
        double value = 0.0;
        // ... or a tag-membership test
        std::string tag_factor;  // data / resources / experience
        std::string tag;
        int if_true = -1;
        int if_false = -1;
        // leaf
        std::vector<std::string> order;

        bool is_leaf() const { return if_true < 0 && if_false < 0; }
    };

    std::vector<Node> nodes;  // node 0 is the root

    const std::vector<std::string>& leaf_for(const MetaFeatureVector& mf,
                                             const ProblemCharacterization& pc) const;
    void validate() const;
};

RuleTree rule_tree_from_json(const std::string& json_text);
std::string rule_tree_to_json(const RuleTree& tree);

Ranking rank_rules(const RuleTree& tree, const MetaFeatureVector& mf,
                   const ProblemCharacterization& pc,
                   const std::vector<std::string>& candidates);

struct ExperienceRecord {
    MetaFeatureVector meta_features;
    std::string algorithm_id;
    double mean_recall = 0.0;
};

/// One RBF kernel regressor per candidate algorithm, predicting recall from
/// the min-max-scaled meta-feature vector.
class MetaModel {
public:
    static MetaModel train(const std::vector<ExperienceRecord>& experience);

    std::map<std::string, double> predict_recall(const MetaFeatureVector& mf) const;
    Ranking rank(const MetaFeatureVector& mf) const;

    std::vector<std::string> algorithms() const;

    std::string to_json() const;
    static MetaModel from_json(const std::string& json_text);

private:
    std::vector<MinMaxParams> scaling_;  // one per meta-feature dimension
    std::map<std::string, KernelSvr> regressors_;
};

}  // namespace metaselect

#endif
