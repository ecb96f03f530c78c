#include "metaselect/experiment.hpp"

#include "metaselect/errors.hpp"
#include "metaselect/learners.hpp"
#include "metaselect/preprocess.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace metaselect {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string resolve(const std::string& base_dir, const std::string& path) {
    fs::path p(path);
    if (p.is_absolute() || base_dir.empty()) return path;
    return (fs::path(base_dir) / p).string();
}

DatasetSpec dataset_spec_from_json(const json& j, const std::string& base_dir) {
    DatasetSpec spec;
    spec.path = resolve(base_dir, j.at("path").get<std::string>());
    spec.format = j.value("format", "csv");
    spec.target = j.value("target", "");
    spec.positive_label = j.value("positive_label", "");
    spec.name = j.value("name", j.at("path").get<std::string>());
    if (j.contains("kind_overrides")) {
        for (const auto& [col, kind] : j["kind_overrides"].items()) {
            const std::string k = kind.get<std::string>();
            if (k != "numeric" && k != "categorical") {
                throw ConfigError("kind override must be numeric or categorical, got " + k);
            }
            spec.kind_overrides[col] =
                k == "numeric" ? ColumnKind::Numeric : ColumnKind::Categorical;
        }
    }
    return spec;
}

}  // namespace

void ExperimentManifest::validate() const {
    if (repetitions < 1) throw ConfigError("repetitions must be >= 1");
    if (!(split_ratio > 0.0 && split_ratio < 1.0)) {
        throw ConfigError("split ratio must be in (0,1)");
    }
    if (leakage_mode != "strict" && leakage_mode != "paper") {
        throw ConfigError("leakage mode must be strict or paper, got " + leakage_mode);
    }
    if (training.empty() && !subset_source) {
        throw ConfigError("manifest needs at least one training dataset");
    }
    for (const auto& id : algorithms) {
        const auto& known = known_algorithms();
        if (std::find(known.begin(), known.end(), id) == known.end()) {
            throw ConfigError("unknown algorithm in manifest: " + id);
        }
    }
}

ExperimentManifest manifest_from_json(const std::string& json_text,
                                      const std::string& base_dir) {
    json doc = json::parse(json_text);
    if (doc.value("format", "") != "metaselect-manifest" || doc.value("version", 0) != 1) {
        throw ConfigError("unrecognized manifest document (need metaselect-manifest v1)");
    }
    ExperimentManifest m;
    m.name = doc.value("name", "experiment");
    for (const auto& j : doc.at("training_datasets")) {
        m.training.push_back(dataset_spec_from_json(j, base_dir));
    }
    m.test = dataset_spec_from_json(doc.at("test_dataset"), base_dir);
    if (doc.contains("subset_source")) {
        m.subset_source = dataset_spec_from_json(doc["subset_source"], base_dir);
        m.subset_count = doc["subset_source"].value("k", 9);
    }
    m.repetitions = doc.value("repetitions", 20);
    m.split_ratio = doc.value("split_ratio", 0.8);
    m.seed = doc.value("seed", 0ULL);
    m.leakage_mode = doc.value("leakage_mode", "strict");
    if (doc.contains("algorithms")) {
        m.algorithms = doc["algorithms"].get<std::vector<std::string>>();
    }
    if (m.algorithms.empty()) m.algorithms = known_algorithms();
    if (doc.contains("registry")) {
        m.registry_path = resolve(base_dir, doc["registry"].get<std::string>());
    }
    if (doc.contains("characterization")) {
        m.characterization = characterization_from_json(doc["characterization"].dump());
    } else {
        m.characterization.assigned_task = "classify";
    }
    if (const char* env = std::getenv("METASELECT_SEED")) {
        m.seed = std::strtoull(env, nullptr, 10);
    }
    m.validate();
    return m;
}

ExperimentManifest load_manifest(const std::string& path) {
    return manifest_from_json(read_file(path), fs::path(path).parent_path().string());
}

DatasetTable load_dataset(const DatasetSpec& spec) {
    DatasetTable table;
    if (spec.format == "nslkdd") {
        table = load_nslkdd(spec.path);
    } else if (spec.format == "csv") {
        if (spec.target.empty()) {
            throw ConfigError("csv dataset " + spec.name + " needs a target column");
        }
        table = load_csv(spec.path, spec.target, spec.positive_label, spec.kind_overrides);
    } else {
        throw ConfigError("unknown dataset format: " + spec.format);
    }
    table.name = spec.name;
    return table;
}

std::uint64_t derive_seed(std::uint64_t global_seed, const std::string& dataset_id,
                          std::size_t repetition, const std::string& algorithm_id) {
    std::uint64_t z = global_seed;
    z ^= fnv1a(dataset_id) + 0x9e3779b97f4a7c15ULL + (z << 6) + (z >> 2);
    z ^= (repetition + 1) * 0xbf58476d1ce4e5b9ULL + (z << 6) + (z >> 2);
    z ^= fnv1a(algorithm_id) + 0x94d049bb133111ebULL + (z << 6) + (z >> 2);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

namespace {

bool schema_compatible(const DatasetTable& train, const DatasetTable& test) {
    for (const Column* c : train.predictors()) {
        const Column* t = test.find_column(c->name);
        if (!t || t->kind != c->kind) return false;
    }
    return true;
}

/// Marks an error already wrapped with cell provenance, so the outer
/// dataset-level handler rethrows instead of recording it twice.
struct RunAborted : Error {
    using Error::Error;
};

struct Cell {
    std::size_t dataset = 0;
    std::size_t repetition = 0;
    std::string algorithm_id;
    double recall_value = 0.0;
    double runtime_s = 0.0;
    bool on_test = false;
};

}  // namespace

const AlgorithmRow& RankingReport::row(const std::string& algorithm_id) const {
    for (const auto& r : rows) {
        if (r.algorithm_id == algorithm_id) return r;
    }
    throw ConfigError("no report row for algorithm: " + algorithm_id);
}

RankingReport run_experiment(const ExperimentManifest& manifest, bool keep_going,
                             MetaModel* export_meta) {
    manifest.validate();

    MappingRegistry registry;
    if (!manifest.registry_path.empty()) {
        registry = load_registry(manifest.registry_path);
        validate_characterization(registry, manifest.characterization);
    }
    if (registry.rule_tree_json.empty()) {
        throw ConfigError("registry has no rule tree; the rules strategy needs one");
    }
    RuleTree tree = rule_tree_from_json(registry.rule_tree_json);

    std::vector<DatasetTable> training;
    for (const auto& spec : manifest.training) training.push_back(load_dataset(spec));
    if (manifest.subset_source) {
        DatasetTable source = load_dataset(*manifest.subset_source);
        auto subsets = make_subsets(source, manifest.subset_count,
                                    derive_seed(manifest.seed, source.name, 0, "subsets"));
        for (auto& s : subsets) training.push_back(std::move(s));
    }
    DatasetTable test = load_dataset(manifest.test);
    const MetaFeatureVector test_mf = extract(test);
    const std::vector<int> test_labels = test.binary_labels();

    RankingReport report;
    report.experiment_name = manifest.name;
    report.seed = manifest.seed;
    report.leakage_mode = manifest.leakage_mode;

    std::vector<Cell> cells;
    std::vector<MetaFeatureVector> train_mfs;
    std::vector<bool> compatible;
    for (const auto& ds : training) {
        train_mfs.push_back(extract(ds));
        compatible.push_back(schema_compatible(ds, test));
    }

    for (std::size_t di = 0; di < training.size(); ++di) {
        const DatasetTable& ds = training[di];
        for (std::size_t rep = 0; rep < manifest.repetitions; ++rep) {
            const std::uint64_t split_seed = derive_seed(manifest.seed, ds.name, rep, "split");
            try {
                // In paper mode the pipeline is fitted on the whole dataset
                // before splitting; strict mode fits on the train partition.
                SplitPair split = stratified_split(ds, manifest.split_ratio, split_seed);
                PreprocessModel pp = manifest.leakage_mode == "paper"
                                         ? fit_pipeline(ds)
                                         : fit_pipeline(split.train);
                NumericMatrix X_train = transform(pp, split.train);
                std::vector<int> y_train = split.train.binary_labels();

                const DatasetTable& eval_set = compatible[di] ? test : split.test;
                NumericMatrix X_eval = transform(pp, eval_set);
                std::vector<int> y_eval_local;
                if (!compatible[di]) {
                    y_eval_local = split.test.binary_labels();
                }
                const std::vector<int>& truth = compatible[di] ? test_labels : y_eval_local;

                for (const auto& algo : manifest.algorithms) {
                    LearnerSpec spec;
                    spec.algorithm_id = algo;
                    spec.seed = derive_seed(manifest.seed, ds.name, rep, algo);
                    try {
                        const auto start = std::chrono::steady_clock::now();
                        auto model = train(spec, X_train.values, y_train);
                        std::vector<int> predicted = model->predict(X_eval.values);
                        const auto end = std::chrono::steady_clock::now();

                        Cell cell;
                        cell.dataset = di;
                        cell.repetition = rep;
                        cell.algorithm_id = algo;
                        cell.recall_value = recall(confusion(truth, predicted));
                        cell.runtime_s = std::chrono::duration<double>(end - start).count();
                        cell.on_test = compatible[di];
                        cells.push_back(std::move(cell));
                    } catch (const std::exception& e) {
                        CellFailure f{ds.name, algo, rep, e.what()};
                        if (!keep_going) {
                            throw RunAborted("cell (" + ds.name + ", " + algo + ", rep " +
                                             std::to_string(rep) + ") failed: " + e.what());
                        }
                        report.failures.push_back(std::move(f));
                    }
                }
            } catch (const RunAborted&) {
                throw;
            } catch (const std::exception& e) {
                if (!keep_going) {
                    throw Error("dataset " + ds.name + ", rep " + std::to_string(rep) +
                                " failed: " + e.what());
                }
                report.failures.push_back({ds.name, "*", rep, e.what()});
            }
        }
    }

    // Meta-learner experience: one (meta-features, mean recall) pair per
    // (training dataset, algorithm).
    std::vector<ExperienceRecord> experience;
    for (std::size_t di = 0; di < training.size(); ++di) {
        for (const auto& algo : manifest.algorithms) {
            std::vector<double> recalls;
            for (const auto& c : cells) {
                if (c.dataset == di && c.algorithm_id == algo) {
                    recalls.push_back(c.recall_value);
                }
            }
            if (recalls.empty()) continue;
            experience.push_back({train_mfs[di], algo, mean(recalls)});
        }
    }
    MetaModel meta = MetaModel::train(experience);
    if (export_meta) *export_meta = meta;
    const std::map<std::string, double> predicted = meta.predict_recall(test_mf);
    const Ranking meta_ranking = meta.rank(test_mf);
    const Ranking rules_ranking =
        rank_rules(tree, test_mf, manifest.characterization, manifest.algorithms);

    // Observed recall: per repetition, mean over the datasets evaluated on
    // the designated test set (all datasets when none are test-compatible).
    const bool any_on_test = std::any_of(cells.begin(), cells.end(),
                                         [](const Cell& c) { return c.on_test; });
    std::map<std::string, std::vector<double>> samples;
    std::map<std::string, std::vector<double>> runtimes;
    for (const auto& algo : manifest.algorithms) {
        std::vector<double> per_rep;
        for (std::size_t rep = 0; rep < manifest.repetitions; ++rep) {
            std::vector<double> vals;
            for (const auto& c : cells) {
                if (c.algorithm_id != algo || c.repetition != rep) continue;
                if (any_on_test && !c.on_test) continue;
                vals.push_back(c.recall_value);
            }
            if (!vals.empty()) per_rep.push_back(mean(vals));
        }
        if (per_rep.empty()) {
            throw Error("no successful cells for algorithm " + algo);
        }
        samples[algo] = std::move(per_rep);
        for (const auto& c : cells) {
            if (c.algorithm_id == algo) runtimes[algo].push_back(c.runtime_s);
        }
    }

    std::map<std::string, double> observed_means;
    for (const auto& [algo, vals] : samples) observed_means[algo] = mean(vals);
    const Ranking observed_ranking = make_ranking(observed_means, "observed");

    std::map<std::string, ConfidenceInterval> intervals;
    bool have_intervals = manifest.repetitions >= 2;
    if (have_intervals) intervals = bonferroni_ci(samples, 0.90);

    for (const auto& algo : manifest.algorithms) {
        AlgorithmRow row;
        row.algorithm_id = algo;
        row.observed_mean_recall = observed_means[algo];
        row.observed_recall_sd = sample_stddev(samples[algo]);
        row.mean_runtime_s = mean(runtimes[algo]);
        row.meta_predicted_recall_raw = predicted.at(algo);
        row.meta_predicted_recall = std::clamp(predicted.at(algo), 0.0, 1.0);
        row.observed_rank = observed_ranking.rank_of(algo);
        row.rules_rank = rules_ranking.rank_of(algo);
        row.meta_rank = meta_ranking.rank_of(algo);
        row.per_repetition_recalls = samples[algo];
        if (have_intervals) row.bonferroni = intervals[algo];
        report.rows.push_back(std::move(row));
    }

    const double best_observed =
        observed_means.at(observed_ranking.top());
    report.recall_efficiency_rules =
        recall_efficiency(observed_means.at(rules_ranking.top()), best_observed);
    report.recall_efficiency_meta =
        recall_efficiency(observed_means.at(meta_ranking.top()), best_observed);

    if (manifest.algorithms.size() >= 2) {
        std::vector<int> obs, rules, metar;
        for (const auto& algo : manifest.algorithms) {
            obs.push_back(observed_ranking.rank_of(algo));
            rules.push_back(rules_ranking.rank_of(algo));
            metar.push_back(meta_ranking.rank_of(algo));
        }
        report.spearman_rules = spearman(rules, obs);
        report.spearman_meta = spearman(metar, obs);
        if (manifest.algorithms.size() >= 4 && manifest.algorithms.size() <= 10) {
            report.spearman_rules_significant =
                spearman_significant(report.spearman_rules, manifest.algorithms.size());
            report.spearman_meta_significant =
                spearman_significant(report.spearman_meta, manifest.algorithms.size());
        }
    }

    if (have_intervals) {
        for (auto a = intervals.begin(); a != intervals.end(); ++a) {
            for (auto b = std::next(a); b != intervals.end(); ++b) {
                if (intervals_overlap(a->second, b->second)) {
                    report.overlapping_intervals.emplace_back(a->first, b->first);
                }
            }
        }
    }

    // provenance
    json canon;
    canon["name"] = manifest.name;
    canon["seed"] = manifest.seed;
    canon["repetitions"] = manifest.repetitions;
    canon["split_ratio"] = manifest.split_ratio;
    canon["leakage_mode"] = manifest.leakage_mode;
    canon["algorithms"] = manifest.algorithms;
    report.manifest_hash = hex64(fnv1a(canon.dump()));
    {
        std::time_t now = std::time(nullptr);
        char buf[32];
        std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        report.timestamp = buf;
    }

    validate_report(report);
    return report;
}

void validate_report(const RankingReport& report) {
    const std::size_t n = report.rows.size();
    auto check_permutation = [n](const char* what, std::vector<int> ranks) {
        std::sort(ranks.begin(), ranks.end());
        for (std::size_t i = 0; i < n; ++i) {
            if (ranks[i] != static_cast<int>(i) + 1) {
                throw Error(std::string("report invalid: ") + what +
                            " ranks are not a permutation");
            }
        }
    };
    std::vector<int> obs, rules, metar;
    for (const auto& r : report.rows) {
        obs.push_back(r.observed_rank);
        rules.push_back(r.rules_rank);
        metar.push_back(r.meta_rank);
    }
    check_permutation("observed", obs);
    check_permutation("rules", rules);
    check_permutation("meta", metar);

    double best = 0.0;
    double rules_top = 0.0, meta_top = 0.0;
    for (const auto& r : report.rows) {
        best = std::max(best, r.observed_mean_recall);
        if (r.rules_rank == 1) rules_top = r.observed_mean_recall;
        if (r.meta_rank == 1) meta_top = r.observed_mean_recall;
    }
    if (std::abs(report.recall_efficiency_rules - rules_top / best) > 1e-12 ||
        std::abs(report.recall_efficiency_meta - meta_top / best) > 1e-12) {
        throw Error("report invalid: recall efficiency is not consistent with rows");
    }
}

}  // namespace metaselect
