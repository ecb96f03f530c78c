#include "metaselect/errors.hpp"
#include "metaselect/experiment.hpp"

#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace metaselect {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

const char* display_name(const std::string& id) {
    if (id == "decision_tree") return "Decision Tree";
    if (id == "random_forest") return "Random Forest";
    if (id == "naive_bayes") return "Naive Bayes";
    if (id == "kernel_svc") return "SVM";
    if (id == "kernel_svr") return "SVR";
    return id.c_str();
}

std::string fixed(double v, int prec) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(prec) << v;
    return os.str();
}

}  // namespace

std::string report_to_json(const RankingReport& report, bool include_volatile) {
    ordered_json doc;
    doc["format"] = "metaselect-report";
    doc["version"] = 1;
    doc["experiment"] = report.experiment_name;
    ordered_json rows = ordered_json::array();
    for (const auto& r : report.rows) {
        ordered_json jr;
        jr["algorithm"] = r.algorithm_id;
        jr["observed_mean_recall"] = r.observed_mean_recall;
        jr["observed_recall_sd"] = r.observed_recall_sd;
        if (include_volatile) jr["mean_runtime_s"] = r.mean_runtime_s;
        jr["meta_predicted_recall"] = r.meta_predicted_recall;
        jr["meta_predicted_recall_raw"] = r.meta_predicted_recall_raw;
        jr["observed_rank"] = r.observed_rank;
        jr["rules_rank"] = r.rules_rank;
        jr["meta_rank"] = r.meta_rank;
        jr["per_repetition_recalls"] = r.per_repetition_recalls;
        jr["bonferroni"] = {{"lower", r.bonferroni.lower},
                            {"upper", r.bonferroni.upper},
                            {"mean", r.bonferroni.mean}};
        rows.push_back(std::move(jr));
    }
    doc["rows"] = std::move(rows);
    doc["recall_efficiency"] = {{"rules", report.recall_efficiency_rules},
                                {"meta", report.recall_efficiency_meta}};
    doc["spearman"] = {{"rules", report.spearman_rules},
                       {"meta", report.spearman_meta},
                       {"rules_significant", report.spearman_rules_significant},
                       {"meta_significant", report.spearman_meta_significant}};
    ordered_json overlaps = ordered_json::array();
    for (const auto& [a, b] : report.overlapping_intervals) {
        overlaps.push_back({a, b});
    }
    doc["overlapping_intervals"] = std::move(overlaps);
    ordered_json failures = ordered_json::array();
    for (const auto& f : report.failures) {
        failures.push_back({{"dataset", f.dataset},
                            {"algorithm", f.algorithm_id},
                            {"repetition", f.repetition},
                            {"message", f.message}});
    }
    doc["failures"] = std::move(failures);
    ordered_json prov;
    prov["manifest_hash"] = report.manifest_hash;
    prov["seed"] = report.seed;
    prov["leakage_mode"] = report.leakage_mode;
    prov["aggregation"] = report.aggregation;
    if (include_volatile) prov["timestamp"] = report.timestamp;
    doc["provenance"] = std::move(prov);
    return doc.dump(2);
}

RankingReport report_from_json(const std::string& json_text) {
    ordered_json doc = ordered_json::parse(json_text);
    if (doc.value("format", "") != "metaselect-report" || doc.value("version", 0) != 1) {
        throw ConfigError("unrecognized report document");
    }
    RankingReport report;
    report.experiment_name = doc.at("experiment");
    for (const auto& jr : doc.at("rows")) {
        AlgorithmRow r;
        r.algorithm_id = jr.at("algorithm");
        r.observed_mean_recall = jr.at("observed_mean_recall");
        r.observed_recall_sd = jr.at("observed_recall_sd");
        r.mean_runtime_s = jr.value("mean_runtime_s", 0.0);
        r.meta_predicted_recall = jr.at("meta_predicted_recall");
        r.meta_predicted_recall_raw = jr.at("meta_predicted_recall_raw");
        r.observed_rank = jr.at("observed_rank");
        r.rules_rank = jr.at("rules_rank");
        r.meta_rank = jr.at("meta_rank");
        r.per_repetition_recalls = jr.at("per_repetition_recalls").get<std::vector<double>>();
        r.bonferroni.lower = jr.at("bonferroni").at("lower");
        r.bonferroni.upper = jr.at("bonferroni").at("upper");
        r.bonferroni.mean = jr.at("bonferroni").at("mean");
        report.rows.push_back(std::move(r));
    }
    report.recall_efficiency_rules = doc.at("recall_efficiency").at("rules");
    report.recall_efficiency_meta = doc.at("recall_efficiency").at("meta");
    report.spearman_rules = doc.at("spearman").at("rules");
    report.spearman_meta = doc.at("spearman").at("meta");
    report.spearman_rules_significant = doc.at("spearman").at("rules_significant");
    report.spearman_meta_significant = doc.at("spearman").at("meta_significant");
    for (const auto& pair : doc.at("overlapping_intervals")) {
        report.overlapping_intervals.emplace_back(pair[0], pair[1]);
    }
    for (const auto& jf : doc.at("failures")) {
        report.failures.push_back({jf.at("dataset"), jf.at("algorithm"),
                                   jf.at("repetition"), jf.at("message")});
    }
    const auto& prov = doc.at("provenance");
    report.manifest_hash = prov.at("manifest_hash");
    report.seed = prov.at("seed");
    report.leakage_mode = prov.at("leakage_mode");
    report.aggregation = prov.at("aggregation");
    report.timestamp = prov.value("timestamp", "");
    return report;
}

std::string report_to_text(const RankingReport& report) {
    static const char* headers[] = {"",
                                    "Observed Mean Recall",
                                    "Meta-Learner Predicted Recall",
                                    "Mean Runtime (s)",
                                    "SD of Observed Recall",
                                    "Observed Ranks",
                                    "Rules-of-Thumb Predicted Ranks",
                                    "Meta-Learner Predicted Ranks"};
    std::vector<std::vector<std::string>> grid;
    grid.emplace_back(std::begin(headers), std::end(headers));
    for (const auto& r : report.rows) {
        grid.push_back({display_name(r.algorithm_id), fixed(r.observed_mean_recall, 9),
                        fixed(r.meta_predicted_recall, 9), fixed(r.mean_runtime_s, 6),
                        fixed(r.observed_recall_sd, 6), std::to_string(r.observed_rank),
                        std::to_string(r.rules_rank), std::to_string(r.meta_rank)});
    }
    std::vector<std::size_t> widths(grid[0].size(), 0);
    for (const auto& row : grid) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            widths[c] = std::max(widths[c], row[c].size());
        }
    }
    std::ostringstream os;
    os << "Experiment: " << report.experiment_name << "\n";
    for (std::size_t ri = 0; ri < grid.size(); ++ri) {
        for (std::size_t c = 0; c < grid[ri].size(); ++c) {
            os << std::left << std::setw(static_cast<int>(widths[c]) + 2) << grid[ri][c];
        }
        os << "\n";
        if (ri == 0) {
            std::size_t total = 0;
            for (std::size_t w : widths) total += w + 2;
            os << std::string(total, '-') << "\n";
        }
    }
    os << "\nRecall efficiency: rules " << fixed(report.recall_efficiency_rules, 6)
       << ", meta " << fixed(report.recall_efficiency_meta, 6) << "\n";
    os << "Spearman vs observed: rules " << fixed(report.spearman_rules, 3)
       << (report.spearman_rules_significant ? " (significant)" : " (not significant)")
       << ", meta " << fixed(report.spearman_meta, 3)
       << (report.spearman_meta_significant ? " (significant)" : " (not significant)")
       << "\n";
    os << "90% Bonferroni intervals:\n";
    for (const auto& r : report.rows) {
        os << "  " << display_name(r.algorithm_id) << ": [" << fixed(r.bonferroni.lower, 6)
           << ", " << fixed(r.bonferroni.upper, 6) << "]\n";
    }
    if (!report.overlapping_intervals.empty()) {
        os << "Overlapping interval pairs:\n";
        for (const auto& [a, b] : report.overlapping_intervals) {
            os << "  " << display_name(a) << " / " << display_name(b) << "\n";
        }
    }
    if (!report.failures.empty()) {
        os << "Failures (" << report.failures.size() << "):\n";
        for (const auto& f : report.failures) {
            os << "  " << f.dataset << " / " << f.algorithm_id << " / rep " << f.repetition
               << ": " << f.message << "\n";
        }
    }
    return os.str();
}

std::string report_to_csv(const RankingReport& report) {
    std::ostringstream os;
    os << "algorithm,observed_mean_recall,meta_predicted_recall,mean_runtime_s,"
          "observed_recall_sd,observed_rank,rules_rank,meta_rank\n";
    for (const auto& r : report.rows) {
        os << r.algorithm_id << ',' << fixed(r.observed_mean_recall, 9) << ','
           << fixed(r.meta_predicted_recall, 9) << ',' << fixed(r.mean_runtime_s, 6) << ','
           << fixed(r.observed_recall_sd, 6) << ',' << r.observed_rank << ','
           << r.rules_rank << ',' << r.meta_rank << '\n';
    }
    return os.str();
}

void emit_report(const RankingReport& report, const std::string& out_dir) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    auto write = [&](const char* file, const std::string& text) {
        const std::string path = (fs::path(out_dir) / file).string();
        std::ofstream out(path);
        if (!out) throw DataError("cannot write report file: " + path);
        out << text;
    };
    write("report.json", report_to_json(report));
    write("report.txt", report_to_text(report));
    write("report.csv", report_to_csv(report));
}

}  // namespace metaselect
