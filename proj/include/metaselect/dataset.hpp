#ifndef METASELECT_DATASET_HPP
#define METASELECT_DATASET_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace metaselect {

enum class ColumnKind { Numeric, Categorical };

struct Column {
    std::string name;
    ColumnKind kind = ColumnKind::Numeric;
    std::vector<double> numeric;            // populated when kind == Numeric
    std::vector<std::string> categorical;   // populated when kind == Categorical

    std::size_t size() const {
        return kind == ColumnKind::Numeric ? numeric.size() : categorical.size();
    }
};

/// A typed columnar table with a designated binary categorical target.
struct DatasetTable {
    std::string name;
    std::vector<Column> columns;
    std::string target;
    std::string positive_label;
    std::size_t row_count = 0;

    const Column& column(const std::string& col_name) const;
    const Column* find_column(const std::string& col_name) const;
    const Column& target_column() const;

    /// Predictor columns in table order (everything except the target).
    std::vector<const Column*> predictors() const;

    /// Target encoded as 0/1 with 1 = positive_label.
    std::vector<int> binary_labels() const;

    /// Per-class row counts: (positive, negative).
    std::pair<std::size_t, std::size_t> class_counts() const;

    /// New table containing the given rows in the given order.
    DatasetTable select_rows(const std::vector<std::size_t>& rows) const;

    /// Throws DataError when any invariant is broken (ragged columns,
    /// non-binary target, duplicate column names).
    void validate() const;
};

struct SplitPair {
    DatasetTable train;
    DatasetTable test;
    double ratio = 0.0;
    std::uint64_t seed = 0;
};

/// Load a CSV with a header row. Column kinds are inferred by parseability
/// (all values parse as numbers -> numeric) unless overridden.
DatasetTable load_csv(const std::string& path, const std::string& target,
                      const std::string& positive_label,
                      const std::map<std::string, ColumnKind>& kind_overrides = {});

/// NSL-KDD adapter: headerless records of 41 features + label + difficulty.
/// The difficulty column is dropped and the label is binarized to
/// {normal, attack}; positive_label is "attack".
DatasetTable load_nslkdd(const std::string& path);

/// Stratified train/test partition, deterministic per (table, ratio, seed).
SplitPair stratified_split(const DatasetTable& table, double ratio, std::uint64_t seed);

/// Split a table into k contiguous, disjoint, order-preserving blocks whose
/// boundaries come from k-1 uniform draws over row indices. Single-class
/// blocks are merged into the following block.
std::vector<DatasetTable> make_subsets(const DatasetTable& table, std::size_t k,
                                       std::uint64_t seed);

/// Serialize to / reload from the CSV interchange format (used for the
/// round-trip property and for audit dumps).
void save_csv(const DatasetTable& table, const std::string& path);

}  // namespace metaselect

#endif
