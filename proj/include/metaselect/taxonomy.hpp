#ifndef METASELECT_TAXONOMY_HPP
#define METASELECT_TAXONOMY_HPP

#include <map>
#include <set>
#include <string>
#include <vector>

namespace metaselect {

/// The analyst's selections for the four problem factors.
struct ProblemCharacterization {
    std::string assigned_task;
    std::set<std::string> data_considerations;
    std::set<std::string> resource_considerations;
    std::set<std::string> experience_considerations;
};

struct TechniqueDescriptor {
    std::string id;
    std::string display_name;
    std::set<std::string> approaches;
    std::set<std::string> categories;
    std::set<std::string> training_styles;
    std::set<std::string> required_data_tags;
    std::set<std::string> required_resource_tags;
};

/// Data-driven task -> category -> approach mapping plus the technique list.
/// Loaded from a versioned JSON registry file; immutable afterwards.
struct MappingRegistry {
    std::map<std::string, std::set<std::string>> task_to_categories;
    std::map<std::string, std::set<std::string>> category_to_approaches;
    std::vector<TechniqueDescriptor> techniques;
    std::map<std::string, std::set<std::string>> considerations;  // factor -> tag universe
    std::string rule_tree_json;  // serialized rule tree section, consumed by recommend

    /// Structural checks: referenced categories exist, approaches are known.
    void validate() const;
};

std::set<std::string> map_task_to_categories(const MappingRegistry& registry,
                                             const std::string& task);

std::set<std::string> map_categories_to_approaches(const MappingRegistry& registry,
                                                   const std::set<std::string>& categories);

/// Candidates whose approaches intersect the derived approach set and whose
/// required tags are covered by the characterization. Order follows registry
/// position; an empty result is legitimate.
std::vector<TechniqueDescriptor> filter_techniques(const MappingRegistry& registry,
                                                   const ProblemCharacterization& pc);

MappingRegistry load_registry(const std::string& path);
MappingRegistry registry_from_json(const std::string& json_text);
std::string registry_to_json(const MappingRegistry& registry);

ProblemCharacterization load_characterization(const std::string& path);
ProblemCharacterization characterization_from_json(const std::string& json_text);

/// Checks characterization tags against the registry's consideration universe.
void validate_characterization(const MappingRegistry& registry,
                               const ProblemCharacterization& pc);

}  // namespace metaselect

#endif
