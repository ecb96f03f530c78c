#include "metaselect/taxonomy.hpp"

#include "metaselect/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace metaselect {

using nlohmann::json;

namespace {

std::set<std::string> to_set(const json& arr) {
    std::set<std::string> out;
    for (const auto& v : arr) out.insert(v.get<std::string>());
    return out;
}

json from_set(const std::set<std::string>& s) {
    json arr = json::array();
    for (const auto& v : s) arr.push_back(v);
    return arr;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

void MappingRegistry::validate() const {
    std::set<std::string> approach_universe;
    for (const auto& [cat, apps] : category_to_approaches) {
        approach_universe.insert(apps.begin(), apps.end());
    }
    for (const auto& [task, cats] : task_to_categories) {
        if (cats.empty()) throw ConfigError("task '" + task + "' maps to no categories");
        for (const auto& c : cats) {
            if (!category_to_approaches.count(c)) {
                throw ConfigError("task '" + task + "' references unknown category '" + c + "'");
            }
        }
    }
    std::set<std::string> ids;
    for (const auto& t : techniques) {
        if (t.approaches.empty() || t.categories.empty()) {
            throw ConfigError("technique '" + t.id +
                              "' must declare approaches and categories");
        }
        if (!ids.insert(t.id).second) {
            throw ConfigError("duplicate technique id '" + t.id + "'");
        }
        for (const auto& a : t.approaches) {
            if (!approach_universe.count(a)) {
                throw ConfigError("technique '" + t.id + "' references unknown approach '" +
                                  a + "'");
            }
        }
    }
}

std::set<std::string> map_task_to_categories(const MappingRegistry& registry,
                                             const std::string& task) {
    auto it = registry.task_to_categories.find(task);
    if (it == registry.task_to_categories.end()) {
        throw ConfigError("unknown assigned task: " + task);
    }
    return it->second;
}

std::set<std::string> map_categories_to_approaches(const MappingRegistry& registry,
                                                   const std::set<std::string>& categories) {
    if (categories.empty()) throw ConfigError("no categories of analysis given");
    std::set<std::string> out;
    for (const auto& c : categories) {
        auto it = registry.category_to_approaches.find(c);
        if (it == registry.category_to_approaches.end()) {
            throw ConfigError("unknown category of analysis: " + c);
        }
        out.insert(it->second.begin(), it->second.end());
    }
    return out;
}

std::vector<TechniqueDescriptor> filter_techniques(const MappingRegistry& registry,
                                                   const ProblemCharacterization& pc) {
    if (pc.assigned_task.empty()) throw ConfigError("characterization has no assigned task");
    auto categories = map_task_to_categories(registry, pc.assigned_task);
    auto approaches = map_categories_to_approaches(registry, categories);

    auto subset_of = [](const std::set<std::string>& required,
                        const std::set<std::string>& available) {
        return std::includes(available.begin(), available.end(), required.begin(),
                             required.end());
    };

    std::vector<TechniqueDescriptor> out;
    for (const auto& t : registry.techniques) {
        bool approach_match = std::any_of(t.approaches.begin(), t.approaches.end(),
                                          [&](const std::string& a) {
                                              return approaches.count(a) > 0;
                                          });
        if (!approach_match) continue;
        if (!subset_of(t.required_data_tags, pc.data_considerations)) continue;
        if (!subset_of(t.required_resource_tags, pc.resource_considerations)) continue;
        out.push_back(t);
    }
    return out;
}

MappingRegistry registry_from_json(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw SchemaError(std::string("registry is not valid JSON: ") + e.what());
    }
    if (doc.value("format", "") != "metaselect-registry" || doc.value("version", 0) != 1) {
        throw SchemaError("unrecognized registry document (need metaselect-registry v1)");
    }
    MappingRegistry reg;
    for (const auto& [task, cats] : doc.at("tasks").items()) {
        reg.task_to_categories[task] = to_set(cats);
    }
    for (const auto& [cat, apps] : doc.at("categories").items()) {
        reg.category_to_approaches[cat] = to_set(apps);
    }
    if (doc.contains("considerations")) {
        for (const auto& [factor, tags] : doc["considerations"].items()) {
            reg.considerations[factor] = to_set(tags);
        }
    }
    for (const auto& jt : doc.at("techniques")) {
        TechniqueDescriptor t;
        t.id = jt.at("id").get<std::string>();
        t.display_name = jt.value("display_name", t.id);
        t.approaches = to_set(jt.at("approaches"));
        t.categories = to_set(jt.at("categories"));
        if (jt.contains("training_styles")) t.training_styles = to_set(jt["training_styles"]);
        if (jt.contains("required_data_tags")) {
            t.required_data_tags = to_set(jt["required_data_tags"]);
        }
        if (jt.contains("required_resource_tags")) {
            t.required_resource_tags = to_set(jt["required_resource_tags"]);
        }
        reg.techniques.push_back(std::move(t));
    }
    if (doc.contains("rule_tree")) reg.rule_tree_json = doc["rule_tree"].dump();
    reg.validate();
    return reg;
}

std::string registry_to_json(const MappingRegistry& registry) {
    json doc;
    doc["format"] = "metaselect-registry";
    doc["version"] = 1;
    json tasks;
    for (const auto& [task, cats] : registry.task_to_categories) tasks[task] = from_set(cats);
    doc["tasks"] = std::move(tasks);
    json cats;
    for (const auto& [cat, apps] : registry.category_to_approaches) cats[cat] = from_set(apps);
    doc["categories"] = std::move(cats);
    json cons;
    for (const auto& [factor, tags] : registry.considerations) cons[factor] = from_set(tags);
    doc["considerations"] = std::move(cons);
    json techniques = json::array();
    for (const auto& t : registry.techniques) {
        json jt;
        jt["id"] = t.id;
        jt["display_name"] = t.display_name;
        jt["approaches"] = from_set(t.approaches);
        jt["categories"] = from_set(t.categories);
        jt["training_styles"] = from_set(t.training_styles);
        jt["required_data_tags"] = from_set(t.required_data_tags);
        jt["required_resource_tags"] = from_set(t.required_resource_tags);
        techniques.push_back(std::move(jt));
    }
    doc["techniques"] = std::move(techniques);
    if (!registry.rule_tree_json.empty()) {
        doc["rule_tree"] = json::parse(registry.rule_tree_json);
    }
    return doc.dump(2);
}

MappingRegistry load_registry(const std::string& path) {
    return registry_from_json(read_file(path));
}

ProblemCharacterization characterization_from_json(const std::string& json_text) {
    json doc = json::parse(json_text);
    ProblemCharacterization pc;
    pc.assigned_task = doc.at("assigned_task").get<std::string>();
    if (doc.contains("data")) pc.data_considerations = to_set(doc["data"]);
    if (doc.contains("resources")) pc.resource_considerations = to_set(doc["resources"]);
    if (doc.contains("experience")) pc.experience_considerations = to_set(doc["experience"]);
    return pc;
}

ProblemCharacterization load_characterization(const std::string& path) {
    return characterization_from_json(read_file(path));
}

void validate_characterization(const MappingRegistry& registry,
                               const ProblemCharacterization& pc) {
    if (pc.assigned_task.empty()) throw ConfigError("characterization has no assigned task");
    if (!registry.task_to_categories.count(pc.assigned_task)) {
        throw ConfigError("unknown assigned task: " + pc.assigned_task);
    }
    auto check = [&](const char* factor, const std::set<std::string>& tags) {
        auto it = registry.considerations.find(factor);
        if (it == registry.considerations.end()) return;  // open universe
        for (const auto& tag : tags) {
            if (!it->second.count(tag)) {
                throw ConfigError(std::string("unknown ") + factor + " consideration: " + tag);
            }
        }
    };
    check("data", pc.data_considerations);
    check("resources", pc.resource_considerations);
    check("experience", pc.experience_considerations);
}

}  // namespace metaselect
