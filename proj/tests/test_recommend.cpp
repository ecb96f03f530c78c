#include "metaselect/recommend.hpp"
#include "metaselect/errors.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <cmath>

using namespace metaselect;

namespace {

ProblemCharacterization detection_pc() {
    ProblemCharacterization pc;
    pc.assigned_task = "classify";
    pc.data_considerations = {"labeled", "tabular"};
    pc.resource_considerations = {"cpu"};
    pc.experience_considerations = {"practitioner"};
    return pc;
}

MetaFeatureVector mf_with_rows(double n_rows, double n_discrete = 0) {
    MetaFeatureVector mf;
    mf.n_rows = n_rows;
    mf.n_cols = 10;
    mf.rows_to_cols = n_rows / 10.0;
    mf.n_discrete = n_discrete;
    mf.n_continuous = 10 - n_discrete;
    mf.grad_avg = 0.4;
    mf.grad_min = 0.2;
    mf.grad_max = 0.6;
    mf.grad_std = 0.1;
    return mf;
}

const char* kSmallTree = R"({
  "nodes": [
    {"feature": "n_rows", "op": ">=", "value": 100, "if_true": 1, "if_false": 2},
    {"factor": "data", "tag": "labeled", "if_true": 3, "if_false": 4},
    {"order": ["c", "a", "b"]},
    {"order": ["a", "b", "c"]},
    {"order": ["b", "c", "a"]}
  ]
})";

}  // namespace

TEST_CASE("make_ranking orders by descending score with id tie-break") {
    Ranking r = make_ranking({{"zeta", 0.5}, {"alpha", 0.9}, {"mid", 0.5}}, "meta");
    CHECK(r.strategy == "meta");
    REQUIRE(r.entries.size() == 3);
    CHECK(r.entries[0].algorithm_id == "alpha");
    CHECK(r.entries[1].algorithm_id == "mid");  // tie broken alphabetically
    CHECK(r.entries[2].algorithm_id == "zeta");
    CHECK(r.entries[0].rank == 1);
    CHECK(r.entries[2].rank == 3);
    CHECK(r.rank_of("zeta") == 3);
    CHECK(r.top() == "alpha");
}

TEST_CASE("ranking lookups on missing or empty input throw") {
    Ranking r = make_ranking({{"a", 1.0}}, "meta");
    CHECK_THROWS_AS(r.rank_of("b"), ConfigError);
    Ranking empty;
    CHECK_THROWS_AS(empty.top(), ConfigError);
}

TEST_CASE("rule tree walks comparison and tag nodes") {
    RuleTree tree = rule_tree_from_json(kSmallTree);
    CHECK_NOTHROW(tree.validate());

    ProblemCharacterization pc = detection_pc();
    CHECK(tree.leaf_for(mf_with_rows(500), pc) ==
          std::vector<std::string>{"a", "b", "c"});
    pc.data_considerations = {"tabular"};  // tag test now falls through
    CHECK(tree.leaf_for(mf_with_rows(500), pc) ==
          std::vector<std::string>{"b", "c", "a"});
    CHECK(tree.leaf_for(mf_with_rows(50), pc) ==
          std::vector<std::string>{"c", "a", "b"});
}

TEST_CASE("rule tree validation rejects malformed trees") {
    RuleTree backwards;
    backwards.nodes.resize(2);
    backwards.nodes[0].feature = "n_rows";
    backwards.nodes[0].op = ">=";
    backwards.nodes[0].if_true = 0;  // self-reference
    backwards.nodes[0].if_false = 1;
    backwards.nodes[1].order = {"a"};
    CHECK_THROWS_AS(backwards.validate(), ConfigError);

    RuleTree dual;
    dual.nodes.resize(2);
    dual.nodes[0].feature = "n_rows";
    dual.nodes[0].op = ">=";
    dual.nodes[0].tag_factor = "data";
    dual.nodes[0].tag = "labeled";  // both predicates set
    dual.nodes[0].if_true = 1;
    dual.nodes[0].if_false = 1;
    dual.nodes[1].order = {"a"};
    CHECK_THROWS_AS(dual.validate(), ConfigError);

    RuleTree empty_leaf;
    empty_leaf.nodes.resize(1);
    CHECK_THROWS_AS(empty_leaf.validate(), ConfigError);

    RuleTree repeated;
    repeated.nodes.resize(1);
    repeated.nodes[0].order = {"a", "a"};
    CHECK_THROWS_AS(repeated.validate(), ConfigError);
}

TEST_CASE("rule tree json round-trips") {
    RuleTree tree = rule_tree_from_json(kSmallTree);
    RuleTree back = rule_tree_from_json(rule_tree_to_json(tree));
    REQUIRE(back.nodes.size() == tree.nodes.size());
    CHECK(back.nodes[0].feature == "n_rows");
    CHECK(back.nodes[1].tag == "labeled");
    CHECK(back.nodes[2].order == tree.nodes[2].order);
}

TEST_CASE("rank_rules restricts the leaf order to the candidates") {
    RuleTree tree = rule_tree_from_json(kSmallTree);
    Ranking r = rank_rules(tree, mf_with_rows(500), detection_pc(), {"a", "b"});
    REQUIRE(r.entries.size() == 2);
    CHECK(r.entries[0].algorithm_id == "a");  // leaf is a,b,c with c filtered out
    CHECK(r.entries[1].algorithm_id == "b");
    CHECK(r.entries[0].rank == 1);
    CHECK(r.entries[0].score > r.entries[1].score);
}

TEST_CASE("rank_rules flags a leaf that omits a candidate") {
    RuleTree tree = rule_tree_from_json(kSmallTree);
    CHECK_THROWS_WITH_AS(
        rank_rules(tree, mf_with_rows(500), detection_pc(), {"a", "ghost"}),
        doctest::Contains("omits candidate"), ConfigError);
    CHECK_THROWS_AS(rank_rules(tree, mf_with_rows(500), detection_pc(), {}), ConfigError);
}

TEST_CASE("default registry rule tree reproduces the high-volume leaf") {
    MappingRegistry reg = load_registry(test_util::registry_path());
    RuleTree tree = rule_tree_from_json(reg.rule_tree_json);

    MetaFeatureVector mf = mf_with_rows(22544, 3);
    mf.n_cols = 41;
    mf.rows_to_cols = 22544.0 / 41.0;
    mf.n_continuous = 38;
    Ranking r = rank_rules(tree, mf, detection_pc(),
                           {"decision_tree", "random_forest", "naive_bayes",
                            "kernel_svc", "kernel_svr"});
    CHECK(r.top() == "kernel_svr");
    CHECK(r.rank_of("naive_bayes") == 2);
    CHECK(r.rank_of("random_forest") == 3);
    CHECK(r.rank_of("decision_tree") == 4);
    CHECK(r.rank_of("kernel_svc") == 5);
}

TEST_CASE("meta-model learns per-algorithm recall levels") {
    std::vector<ExperienceRecord> experience;
    for (double rows : {100.0, 200.0, 400.0, 800.0}) {
        experience.push_back({mf_with_rows(rows), "strong", 0.9});
        experience.push_back({mf_with_rows(rows), "weak", 0.4});
    }
    MetaModel model = MetaModel::train(experience);
    CHECK(model.algorithms() == std::vector<std::string>{"strong", "weak"});

    auto predicted = model.predict_recall(mf_with_rows(300));
    CHECK(predicted.at("strong") > predicted.at("weak"));
    CHECK(std::abs(predicted.at("strong") - 0.9) < 0.15);
    CHECK(std::abs(predicted.at("weak") - 0.4) < 0.15);

    Ranking r = model.rank(mf_with_rows(300));
    CHECK(r.top() == "strong");
    CHECK(r.strategy == "meta");
}

TEST_CASE("meta-model tracks a trend in the meta-features") {
    std::vector<ExperienceRecord> experience;
    for (double rows : {100.0, 300.0, 500.0, 700.0, 900.0}) {
        // "grower" improves with data volume, "shrinker" degrades
        const double t = (rows - 100.0) / 800.0;
        experience.push_back({mf_with_rows(rows), "grower", 0.2 + 0.7 * t});
        experience.push_back({mf_with_rows(rows), "shrinker", 0.9 - 0.7 * t});
    }
    MetaModel model = MetaModel::train(experience);
    CHECK(model.rank(mf_with_rows(900)).top() == "grower");
    CHECK(model.rank(mf_with_rows(100)).top() == "shrinker");
}

TEST_CASE("meta-model training validates its experience") {
    CHECK_THROWS_AS(MetaModel::train({}), DataError);

    std::vector<ExperienceRecord> single = {{mf_with_rows(100), "a", 0.5},
                                            {mf_with_rows(200), "a", 0.6},
                                            {mf_with_rows(100), "b", 0.5}};
    CHECK_THROWS_AS(MetaModel::train(single), DataError);  // b has one pair

    std::vector<ExperienceRecord> bad = {{mf_with_rows(100), "a", 1.5},
                                         {mf_with_rows(200), "a", 0.6}};
    CHECK_THROWS_AS(MetaModel::train(bad), DataError);

    MetaModel unfitted;
    CHECK_THROWS_AS(unfitted.predict_recall(mf_with_rows(100)), ConfigError);
}

TEST_CASE("meta-model json round-trip preserves predictions") {
    std::vector<ExperienceRecord> experience;
    for (double rows : {100.0, 250.0, 600.0}) {
        experience.push_back({mf_with_rows(rows), "a", 0.8});
        experience.push_back({mf_with_rows(rows), "b", 0.3});
    }
    MetaModel model = MetaModel::train(experience);
    MetaModel restored = MetaModel::from_json(model.to_json());

    auto before = model.predict_recall(mf_with_rows(400));
    auto after = restored.predict_recall(mf_with_rows(400));
    REQUIRE(before.size() == after.size());
    for (const auto& [id, score] : before) {
        CHECK(after.at(id) == score);
    }
    CHECK_THROWS_AS(MetaModel::from_json(R"({"format": "x", "version": 1})"), ConfigError);
}
