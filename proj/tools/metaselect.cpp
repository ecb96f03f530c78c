#include "metaselect/errors.hpp"
#include "metaselect/experiment.hpp"
#include "metaselect/learners.hpp"
#include "metaselect/metafeatures.hpp"
#include "metaselect/recommend.hpp"
#include "metaselect/taxonomy.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace metaselect;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int cmd_characterize(const std::string& characterization_path,
                     const std::string& registry_path) {
    MappingRegistry registry = load_registry(registry_path);
    ProblemCharacterization pc = load_characterization(characterization_path);
    validate_characterization(registry, pc);

    auto categories = map_task_to_categories(registry, pc.assigned_task);
    auto approaches = map_categories_to_approaches(registry, categories);
    std::cout << "task: " << pc.assigned_task << "\ncategories:";
    for (const auto& c : categories) std::cout << ' ' << c;
    std::cout << "\napproaches:";
    for (const auto& a : approaches) std::cout << ' ' << a;
    std::cout << "\ncandidates:\n";

    auto candidates = filter_techniques(registry, pc);
    if (candidates.empty()) {
        std::cerr << "warning: no technique matches this characterization\n";
    }
    for (const auto& t : candidates) {
        std::cout << "  " << t.id << " (" << t.display_name << ")\n";
    }
    return 0;
}

int cmd_metafeatures(const std::string& dataset_path, const std::string& target,
                     const std::string& positive_label, const std::string& format) {
    DatasetSpec spec;
    spec.path = dataset_path;
    spec.name = dataset_path;
    spec.format = format;
    spec.target = target;
    spec.positive_label = positive_label;
    DatasetTable table = load_dataset(spec);
    std::cout << metafeatures_to_json(extract(table)) << "\n";
    return 0;
}

int cmd_experiment(const std::string& manifest_path, const std::string& out_dir,
                   bool keep_going, const std::string& export_model_path) {
    ExperimentManifest manifest = load_manifest(manifest_path);
    MetaModel meta;
    RankingReport report = run_experiment(manifest, keep_going, &meta);
    emit_report(report, out_dir);
    std::cout << report_to_text(report);
    if (!export_model_path.empty()) {
        std::ofstream out(export_model_path);
        if (!out) throw DataError("cannot write meta-model: " + export_model_path);
        out << meta.to_json();
        std::cout << "meta-model exported to " << export_model_path << "\n";
    }
    std::cout << "reports written to " << out_dir << "\n";
    return 0;
}

int cmd_recommend(const std::string& manifest_path, const std::string& model_path) {
    ExperimentManifest manifest = load_manifest(manifest_path);
    if (manifest.registry_path.empty()) {
        throw ConfigError("manifest must name a taxonomy registry");
    }
    MappingRegistry registry = load_registry(manifest.registry_path);
    if (registry.rule_tree_json.empty()) {
        throw ConfigError("registry has no rule tree");
    }
    RuleTree tree = rule_tree_from_json(registry.rule_tree_json);
    MetaModel meta = MetaModel::from_json(read_file(model_path));

    DatasetTable test = load_dataset(manifest.test);
    MetaFeatureVector mf = extract(test);

    Ranking rules =
        rank_rules(tree, mf, manifest.characterization, manifest.algorithms);
    Ranking meta_ranking = meta.rank(mf);

    std::cout << "rules-of-thumb ranking:\n";
    for (const auto& e : rules.entries) {
        std::cout << "  " << e.rank << ". " << e.algorithm_id << "\n";
    }
    std::cout << "meta-learner ranking:\n";
    for (const auto& e : meta_ranking.entries) {
        std::cout << "  " << e.rank << ". " << e.algorithm_id
                  << " (predicted recall " << e.score << ")\n";
    }
    return 0;
}

int cmd_validate(const std::string& registry_path) {
    MappingRegistry registry = load_registry(registry_path);
    if (!registry.rule_tree_json.empty()) {
        rule_tree_from_json(registry.rule_tree_json);
    }
    std::cout << "registry ok: " << registry.techniques.size() << " techniques, "
              << registry.task_to_categories.size() << " tasks\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"algorithm selection framework for classification problems"};
    app.require_subcommand(1);

    std::string characterization_path, registry_path = "data/registry.json";
    auto* characterize = app.add_subcommand(
        "characterize", "filter the technique taxonomy for a problem characterization");
    characterize->add_option("characterization", characterization_path,
                             "characterization JSON file")->required();
    characterize->add_option("--registry", registry_path, "taxonomy registry file");

    std::string dataset_path, target, positive_label, format = "csv";
    auto* metafeat = app.add_subcommand("metafeatures",
                                        "print the 12 meta-features of a dataset");
    metafeat->add_option("dataset", dataset_path, "dataset file")->required();
    metafeat->add_option("--target", target, "target column (csv format)");
    metafeat->add_option("--positive-label", positive_label, "positive class label");
    metafeat->add_option("--format", format, "csv or nslkdd");

    std::string manifest_path, out_dir = "results", model_path, export_model;
    bool keep_going = false;
    auto* experiment = app.add_subcommand("experiment",
                                          "run the full base-learning experiment");
    experiment->add_option("manifest", manifest_path, "experiment manifest")->required();
    experiment->add_option("--out", out_dir, "output directory for reports");
    experiment->add_flag("--keep-going", keep_going,
                         "record failed grid cells instead of aborting");
    experiment->add_option("--export-model", export_model,
                           "write the fitted meta-model JSON to this path");

    auto* recommend = app.add_subcommand(
        "recommend", "rank candidates without base learning (needs an exported meta-model)");
    recommend->add_option("manifest", manifest_path, "experiment manifest")->required();
    recommend->add_option("--model", model_path, "exported meta-model JSON")->required();

    std::string validate_path;
    auto* taxonomy = app.add_subcommand("taxonomy", "taxonomy registry utilities");
    auto* validate = taxonomy->add_subcommand("validate", "check a registry file");
    validate->add_option("registry", validate_path, "registry JSON file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*characterize) return cmd_characterize(characterization_path, registry_path);
        if (*metafeat) return cmd_metafeatures(dataset_path, target, positive_label, format);
        if (*experiment) return cmd_experiment(manifest_path, out_dir, keep_going, export_model);
        if (*recommend) return cmd_recommend(manifest_path, model_path);
        if (*validate) return cmd_validate(validate_path);
        std::cerr << "no subcommand\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
