#ifndef METASELECT_EXPERIMENT_HPP
#define METASELECT_EXPERIMENT_HPP

#include "metaselect/dataset.hpp"
#include "metaselect/metafeatures.hpp"
#include "metaselect/recommend.hpp"
#include "metaselect/stats.hpp"
#include "metaselect/taxonomy.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace metaselect {

struct DatasetSpec {
    std::string path;
    std::string format = "csv";  // csv | nslkdd
    std::string target;
    std::string positive_label;
    std::map<std::string, ColumnKind> kind_overrides;
    std::string name;  // defaults to the path
};

struct ExperimentManifest {
    std::string name = "experiment";
    std::vector<DatasetSpec> training;
    DatasetSpec test;
    std::optional<DatasetSpec> subset_source;
    std::size_t subset_count = 9;
    std::size_t repetitions = 20;
    double split_ratio = 0.8;
    std::uint64_t seed = 0;
    std::string leakage_mode = "strict";  // strict | paper
    std::vector<std::string> algorithms;
    std::string registry_path;
    ProblemCharacterization characterization;

    void validate() const;
};

/// Parse a manifest file; relative dataset paths resolve against the
/// manifest's directory and METASELECT_SEED overrides the stored seed.
ExperimentManifest load_manifest(const std::string& path);
ExperimentManifest manifest_from_json(const std::string& json_text,
                                      const std::string& base_dir);

DatasetTable load_dataset(const DatasetSpec& spec);

struct AlgorithmRow {
    std::string algorithm_id;
    double observed_mean_recall = 0.0;
    double observed_recall_sd = 0.0;
    double mean_runtime_s = 0.0;
    double meta_predicted_recall_raw = 0.0;
    double meta_predicted_recall = 0.0;  // clamped to [0,1] for display
    int observed_rank = 0;
    int rules_rank = 0;
    int meta_rank = 0;
    std::vector<double> per_repetition_recalls;
    ConfidenceInterval bonferroni;
};

struct CellFailure {
    std::string dataset;
    std::string algorithm_id;
    std::size_t repetition = 0;
    std::string message;
};

struct RankingReport {
    std::string experiment_name;
    std::vector<AlgorithmRow> rows;
    double recall_efficiency_rules = 0.0;
    double recall_efficiency_meta = 0.0;
    double spearman_rules = 0.0;
    double spearman_meta = 0.0;
    bool spearman_rules_significant = false;
    bool spearman_meta_significant = false;
    std::vector<std::pair<std::string, std::string>> overlapping_intervals;
    std::vector<CellFailure> failures;
    // provenance
    std::string manifest_hash;
    std::uint64_t seed = 0;
    std::string leakage_mode;
    std::string aggregation = "mean over (training set x repetition) cells";
    std::string timestamp;

    const AlgorithmRow& row(const std::string& algorithm_id) const;
};

/// Runs the full pipeline. When export_meta is non-null the fitted
/// meta-model is copied out for later `recommend` runs.
RankingReport run_experiment(const ExperimentManifest& manifest, bool keep_going = false,
                             MetaModel* export_meta = nullptr);

/// Structural checks: rank columns are permutations and the recall
/// efficiencies are recomputable from the rows.
void validate_report(const RankingReport& report);

/// With include_volatile = false the timestamp and wall-clock runtimes are
/// omitted, so two runs of the same manifest serialize byte-identically.
std::string report_to_json(const RankingReport& report, bool include_volatile = true);
RankingReport report_from_json(const std::string& json_text);
std::string report_to_text(const RankingReport& report);
std::string report_to_csv(const RankingReport& report);

/// Writes report.json, report.txt and report.csv under out_dir.
void emit_report(const RankingReport& report, const std::string& out_dir);

/// Deterministic per-cell RNG stream derivation.
std::uint64_t derive_seed(std::uint64_t global_seed, const std::string& dataset_id,
                          std::size_t repetition, const std::string& algorithm_id);

}  // namespace metaselect

#endif
