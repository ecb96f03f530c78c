// Acceptance suite: one PASS/FAIL/SKIP line per criterion, nonzero exit on
// any failure. Criterion 4 needs the public NSL-KDD files and is skipped
// with a notice when they are not available.

#include "metaselect/dataset.hpp"
#include "metaselect/errors.hpp"
#include "metaselect/experiment.hpp"
#include "metaselect/learners.hpp"
#include "metaselect/metafeatures.hpp"
#include "metaselect/preprocess.hpp"
#include "metaselect/recommend.hpp"
#include "metaselect/stats.hpp"
#include "metaselect/taxonomy.hpp"

#include "test_util.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

using namespace metaselect;
using nlohmann::json;

namespace {

int g_failures = 0;

void report_line(int criterion, const std::string& label, const std::string& status,
                 const std::string& detail) {
    std::cout << status << " criterion " << criterion << " (" << label << ")";
    if (!detail.empty()) std::cout << ": " << detail;
    std::cout << "\n";
}

void run_criterion(int criterion, const std::string& label,
                   const std::function<void()>& body) {
    try {
        body();
        report_line(criterion, label, "PASS", "");
    } catch (const std::exception& e) {
        ++g_failures;
        report_line(criterion, label, "FAIL", e.what());
    }
}

void require(bool ok, const std::string& message) {
    if (!ok) throw std::runtime_error(message);
}

ProblemCharacterization detection_pc() {
    ProblemCharacterization pc;
    pc.assigned_task = "classify";
    pc.data_considerations = {"labeled", "tabular"};
    pc.resource_considerations = {"cpu"};
    pc.experience_considerations = {"practitioner"};
    return pc;
}

json dataset_entry(const std::string& path, const std::string& name) {
    return {{"path", path}, {"target", "t"}, {"positive_label", "pos"}, {"name", name}};
}

/// Separable table with a margin around the 0.5 boundary (labels are still
/// pos iff feature0 > 0.5; the gap just keeps the problem noise-free).
DatasetTable margin_table(const std::string& name, std::size_t rows,
                          std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> f0(rows), noise(rows);
    std::vector<std::string> t(rows);
    for (std::size_t i = 0; i < rows; ++i) {
        double a = unif(rng);
        a = a < 0.5 ? a * 0.8 : 0.6 + (a - 0.5) * 0.8;  // [0,0.4] or [0.6,1.0]
        f0[i] = a;
        noise[i] = unif(rng);
        t[i] = a > 0.5 ? "pos" : "neg";
    }
    return test_util::make_table(name, {test_util::numeric_col("feature0", std::move(f0)),
                                        test_util::numeric_col("noise", std::move(noise)),
                                        test_util::cat_col("t", std::move(t))});
}

json synthetic_manifest(const test_util::TempDir& dir, int n_train, std::size_t rows,
                        std::size_t repetitions) {
    json training = json::array();
    for (int i = 0; i < n_train; ++i) {
        const std::string name = "train" + std::to_string(i);
        save_csv(margin_table(name, rows, 300 + static_cast<std::uint64_t>(i)),
                 dir.file(name + ".csv"));
        training.push_back(dataset_entry(dir.file(name + ".csv"), name));
    }
    save_csv(margin_table("testset", rows, 777), dir.file("test.csv"));
    json doc;
    doc["format"] = "metaselect-manifest";
    doc["version"] = 1;
    doc["name"] = "acceptance";
    doc["training_datasets"] = training;
    doc["test_dataset"] = dataset_entry(dir.file("test.csv"), "testset");
    doc["repetitions"] = repetitions;
    doc["seed"] = 13;
    doc["registry"] = test_util::registry_path();
    doc["characterization"] = {{"assigned_task", "classify"},
                               {"data", {"labeled", "tabular"}},
                               {"resources", {"cpu"}},
                               {"experience", {"practitioner"}}};
    return doc;
}

void criterion_1() {
    const double e = recall_efficiency(0.962446436, 0.982216595);
    // 0.962446436 / 0.982216595 = 0.97987189...; the paper reports 0.98
    require(std::abs(e - 0.9798718947525011) < 1e-6, "recall efficiency mismatch");
    require(std::round(e * 100.0) / 100.0 == 0.98, "does not round to 0.98");
}

void criterion_2() {
    const std::vector<int> observed = {2, 1, 5, 4, 3};
    const double rho_meta = spearman({5, 3, 2, 4, 1}, observed);
    const double rho_rules = spearman({4, 3, 2, 5, 1}, observed);
    require(rho_meta == -0.3, "meta rho is not exactly -0.300");
    require(rho_rules == -0.1, "rules rho is not exactly -0.100");
    require(!spearman_significant(rho_meta, 5), "meta rho wrongly significant");
    require(!spearman_significant(rho_rules, 5), "rules rho wrongly significant");
}

void criterion_3() {
    MappingRegistry reg = load_registry(test_util::registry_path());
    RuleTree tree = rule_tree_from_json(reg.rule_tree_json);

    // KDDTest+ meta-features: 22544 rows, 41 predictors, 3 symbolic
    MetaFeatureVector mf;
    mf.n_rows = 22544;
    mf.n_cols = 41;
    mf.rows_to_cols = 22544.0 / 41.0;
    mf.n_discrete = 3;
    mf.n_continuous = 38;
    const std::vector<std::string> candidates = {"decision_tree", "random_forest",
                                                 "naive_bayes", "kernel_svc",
                                                 "kernel_svr"};
    Ranking rules = rank_rules(tree, mf, detection_pc(), candidates);
    require(rules.rank_of("kernel_svr") == 1 && rules.rank_of("naive_bayes") == 2 &&
                rules.rank_of("random_forest") == 3 &&
                rules.rank_of("decision_tree") == 4 && rules.rank_of("kernel_svc") == 5,
            "rule tree ranks are not (SVR,NB,RF,DT,SVC)");

    // published predicted-recall column
    Ranking meta = make_ranking({{"decision_tree", 0.891227551},
                                 {"random_forest", 0.935765698},
                                 {"naive_bayes", 0.952576618},
                                 {"kernel_svc", 0.925262066},
                                 {"kernel_svr", 0.96525973}},
                                "meta");
    require(meta.rank_of("kernel_svr") == 1 && meta.rank_of("naive_bayes") == 2 &&
                meta.rank_of("random_forest") == 3 && meta.rank_of("kernel_svc") == 4 &&
                meta.rank_of("decision_tree") == 5,
            "meta ranks are not (SVR 1, NB 2, RF 3, SVC 4, DT 5)");
}

std::string nslkdd_dir() {
    namespace fs = std::filesystem;
    std::vector<std::string> candidates;
    if (const char* env = std::getenv("METASELECT_NSLKDD_DIR")) candidates.push_back(env);
    if (const char* src = std::getenv("METASELECT_SOURCE_DIR")) {
        candidates.push_back(std::string(src) + "/data/nsl-kdd");
    }
    candidates.push_back("data/nsl-kdd");
    for (const auto& dir : candidates) {
        if (fs::exists(fs::path(dir) / "KDDTrain+.txt") &&
            fs::exists(fs::path(dir) / "KDDTest+.txt")) {
            return dir;
        }
    }
    return "";
}

void criterion_4(const std::string& dir) {
    ExperimentManifest m;
    m.name = "nslkdd";
    m.subset_source = DatasetSpec{dir + "/KDDTrain+.txt", "nslkdd", "", "", {}, "KDDTrain+"};
    m.subset_count = 9;
    m.test = DatasetSpec{dir + "/KDDTest+.txt", "nslkdd", "", "", {}, "KDDTest+"};
    m.repetitions = 20;
    m.seed = 1;
    m.registry_path = test_util::registry_path();
    m.characterization = detection_pc();
    m.algorithms = known_algorithms();

    RankingReport report = run_experiment(m);
    const std::map<std::string, double> expected = {{"decision_tree", 0.9753},
                                                    {"random_forest", 0.9822},
                                                    {"naive_bayes", 0.8634},
                                                    {"kernel_svc", 0.9593},
                                                    {"kernel_svr", 0.9624}};
    for (const auto& [algo, target] : expected) {
        const AlgorithmRow& row = report.row(algo);
        require(std::abs(row.observed_mean_recall - target) <= 0.05,
                algo + " recall " + std::to_string(row.observed_mean_recall) +
                    " is not within 0.05 of " + std::to_string(target));
        require(row.observed_recall_sd <= 0.02,
                algo + " recall SD exceeds 0.02");
    }
    require(report.row("random_forest").observed_rank == 1,
            "random forest is not the top observed algorithm");
    require(report.row("naive_bayes").observed_rank == 5,
            "naive bayes is not the lowest observed algorithm");

    const auto& svc = report.row("kernel_svc").bonferroni;
    const auto& svr = report.row("kernel_svr").bonferroni;
    require(svc.upper >= svc.lower && svr.upper >= svr.lower,
            "Bonferroni intervals missing for kernel_svc/kernel_svr");
    (void)intervals_overlap(svc, svr);  // overlap status is in the report pairs
}

void criterion_5() {
    // minmax conventions
    {
        auto [scaled, params] = minmax_scale({2, 4, 6});
        require(scaled == std::vector<double>{0, 0.5, 1.0}, "minmax range");
        auto [constant, cp] = minmax_scale({5, 5, 5});
        require(constant == std::vector<double>{0, 0, 0}, "minmax constant");
        MinMaxParams stored{0, 10};
        require(minmax_scale({-5, 15}, &stored).first == std::vector<double>{0, 1},
                "minmax clamp");
    }
    // one-hot conventions
    {
        auto [ind, cats] = onehot_encode({"a", "b", "a"});
        for (Eigen::Index r = 0; r < ind.rows(); ++r) {
            require(ind.row(r).sum() == 1.0, "one-hot row sum");
        }
        std::vector<std::string> fitted = {"a", "b"};
        auto [unseen, uc] = onehot_encode({"c"}, &fitted);
        require(unseen.row(0).sum() == 0.0, "unseen category row");
    }
    // PCA orthonormality + variance preservation on 100 random matrices
    {
        std::mt19937_64 rng(5);
        std::normal_distribution<double> norm(0, 1);
        for (int trial = 0; trial < 100; ++trial) {
            std::uniform_int_distribution<int> dims(2, 5);
            const int rows = dims(rng) + 5;
            const int cols = dims(rng);
            Eigen::MatrixXd m(rows, cols);
            for (int r = 0; r < rows; ++r) {
                for (int c = 0; c < cols; ++c) m(r, c) = norm(rng);
            }
            auto [rotated, params] = pca_rotate(m);
            Eigen::MatrixXd gram = params.components.transpose() * params.components;
            require((gram - Eigen::MatrixXd::Identity(cols, cols)).cwiseAbs().maxCoeff() <
                        1e-8,
                    "PCA components not orthonormal");
            auto total_var = [](const Eigen::MatrixXd& x) {
                Eigen::RowVectorXd mu = x.colwise().mean();
                return (x.rowwise() - mu).array().square().sum() /
                       static_cast<double>(x.rows() - 1);
            };
            require(std::abs(total_var(rotated) - total_var(m)) <
                        1e-8 * std::max(1.0, total_var(m)),
                    "PCA does not preserve total variance");
        }
    }
    // meta-feature hand-computed oracle
    {
        auto table = test_util::make_table(
            "mixed", {test_util::numeric_col("x", {0.0, 0.5, 1.0, 0.25}),
                      test_util::numeric_col("y", {0.0, 1.0, 2.0, 0.5}),
                      test_util::cat_col("c", {"a", "b", "a", "b"}),
                      test_util::cat_col("t", {"pos", "neg", "pos", "neg"})});
        MetaFeatureVector mf = extract(table);
        require(mf.n_rows == 4 && mf.n_cols == 3 && mf.n_discrete == 1 &&
                    mf.n_continuous == 2 && mf.avg_factors == 2.0,
                "meta-feature counts");
        require(std::abs(mf.grad_avg - 0.5833333333333334) < 1e-12 &&
                    std::abs(mf.grad_std) < 1e-12,
                "meta-feature gradient oracle");
    }
    // stratified split class-count bound over randomized tables
    {
        std::mt19937_64 rng(17);
        for (int trial = 0; trial < 20; ++trial) {
            std::uniform_int_distribution<std::size_t> nrows(10, 50);
            DatasetTable table =
                test_util::separable_table("prop", nrows(rng), rng());
            auto [pos, neg] = table.class_counts();
            if (pos < 2 || neg < 2) continue;
            SplitPair split = stratified_split(table, 0.8, rng());
            auto [tp, tn] = split.train.class_counts();
            require(std::abs(static_cast<double>(tp) -
                             0.8 * static_cast<double>(pos)) <= 1.0,
                    "stratified split positive-class bound");
            require(std::abs(static_cast<double>(tn) -
                             0.8 * static_cast<double>(neg)) <= 1.0,
                    "stratified split negative-class bound");
        }
    }
    // make_subsets partition property
    {
        DatasetTable table = test_util::separable_table("pool", 90, 23);
        auto subsets = make_subsets(table, 5, 3);
        std::vector<double> joined;
        for (const auto& s : subsets) {
            const auto& vals = s.column("feature0").numeric;
            joined.insert(joined.end(), vals.begin(), vals.end());
        }
        require(joined == table.column("feature0").numeric,
                "make_subsets does not partition the parent");
    }
    // ranking permutation property under random scores
    {
        std::mt19937_64 rng(29);
        std::uniform_real_distribution<double> unif(0, 1);
        for (int trial = 0; trial < 50; ++trial) {
            std::map<std::string, double> scores;
            for (int i = 0; i < 5; ++i) {
                scores["algo" + std::to_string(i)] = unif(rng);
            }
            Ranking r = make_ranking(scores, "meta");
            std::vector<int> ranks;
            for (const auto& e : r.entries) ranks.push_back(e.rank);
            std::sort(ranks.begin(), ranks.end());
            require(ranks == std::vector<int>{1, 2, 3, 4, 5},
                    "ranking is not a permutation");
        }
    }
    // spearman identities
    {
        require(spearman({1, 2, 3, 4}, {1, 2, 3, 4}) == 1.0, "spearman self");
        require(spearman({1, 2, 3, 4}, {4, 3, 2, 1}) == -1.0, "spearman reverse");
        require(spearman({2, 1, 4, 3}, {1, 3, 2, 4}) ==
                    spearman({1, 3, 2, 4}, {2, 1, 4, 3}),
                "spearman symmetry");
    }
    // end-to-end determinism on a synthetic 3-dataset manifest
    {
        test_util::TempDir dir;
        json doc = synthetic_manifest(dir, 3, 50, 2);
        doc["algorithms"] = {"decision_tree", "naive_bayes", "random_forest"};
        ExperimentManifest m = manifest_from_json(doc.dump(), "");
        RankingReport a = run_experiment(m);
        RankingReport b = run_experiment(m);
        require(report_to_json(a, false) == report_to_json(b, false),
                "repeated runs are not byte-identical");
    }
}

void criterion_6() {
    test_util::TempDir dir;
    json doc = synthetic_manifest(dir, 2, 200, 2);
    ExperimentManifest m = manifest_from_json(doc.dump(), "");
    RankingReport report = run_experiment(m);

    for (const auto& row : report.rows) {
        require(row.observed_mean_recall >= 0.99,
                row.algorithm_id + " recall " +
                    std::to_string(row.observed_mean_recall) + " below 0.99");
    }
    require(report.recall_efficiency_rules >= 0.99,
            "rules top pick recall efficiency below 0.99");
    require(report.recall_efficiency_meta >= 0.99,
            "meta top pick recall efficiency below 0.99");
}

}  // namespace

int main() {
    run_criterion(1, "recall efficiency reproduction", criterion_1);
    run_criterion(2, "rank correlation arithmetic", criterion_2);
    run_criterion(3, "reference ranking fixtures", criterion_3);

    const std::string kdd = nslkdd_dir();
    if (kdd.empty()) {
        report_line(4, "NSL-KDD reproduction", "SKIP",
                    "KDDTrain+.txt / KDDTest+.txt not found; set "
                    "METASELECT_NSLKDD_DIR or place them under data/nsl-kdd/");
    } else {
        run_criterion(4, "NSL-KDD reproduction", [&] { criterion_4(kdd); });
    }

    run_criterion(5, "property suites", criterion_5);
    run_criterion(6, "synthetic end-to-end sanity", criterion_6);

    return g_failures == 0 ? 0 : 1;
}
