#include "metaselect/dataset.hpp"

#include "metaselect/errors.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <unordered_set>

namespace metaselect {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c == '\r') {
            // tolerate CRLF line endings
        } else {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

bool parse_number(const std::string& s, double& out) {
    if (s.empty()) return false;
    errno = 0;
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || errno == ERANGE) return false;
    out = v;
    return true;
}

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

const char* kNslKddFieldNames[41] = {
    "duration", "protocol_type", "service", "flag", "src_bytes", "dst_bytes",
    "land", "wrong_fragment", "urgent", "hot", "num_failed_logins", "logged_in",
    "num_compromised", "root_shell", "su_attempted", "num_root",
    "num_file_creations", "num_shells", "num_access_files", "num_outbound_cmds",
    "is_host_login", "is_guest_login", "count", "srv_count", "serror_rate",
    "srv_serror_rate", "rerror_rate", "srv_rerror_rate", "same_srv_rate",
    "diff_srv_rate", "srv_diff_host_rate", "dst_host_count",
    "dst_host_srv_count", "dst_host_same_srv_rate", "dst_host_diff_srv_rate",
    "dst_host_same_src_port_rate", "dst_host_srv_diff_host_rate",
    "dst_host_serror_rate", "dst_host_srv_serror_rate", "dst_host_rerror_rate",
    "dst_host_srv_rerror_rate"};

bool nslkdd_symbolic(std::size_t field_index) {
    // protocol_type, service, flag
    return field_index == 1 || field_index == 2 || field_index == 3;
}

}  // namespace

const Column* DatasetTable::find_column(const std::string& col_name) const {
    for (const auto& c : columns) {
        if (c.name == col_name) return &c;
    }
    return nullptr;
}

const Column& DatasetTable::column(const std::string& col_name) const {
    const Column* c = find_column(col_name);
    if (!c) throw DataError("no such column: " + col_name + " in table " + name);
    return *c;
}

const Column& DatasetTable::target_column() const { return column(target); }

std::vector<const Column*> DatasetTable::predictors() const {
    std::vector<const Column*> out;
    for (const auto& c : columns) {
        if (c.name != target) out.push_back(&c);
    }
    return out;
}

std::vector<int> DatasetTable::binary_labels() const {
    const Column& t = target_column();
    std::vector<int> y(t.categorical.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        y[i] = t.categorical[i] == positive_label ? 1 : 0;
    }
    return y;
}

std::pair<std::size_t, std::size_t> DatasetTable::class_counts() const {
    std::size_t pos = 0;
    const Column& t = target_column();
    for (const auto& v : t.categorical) {
        if (v == positive_label) ++pos;
    }
    return {pos, t.categorical.size() - pos};
}

DatasetTable DatasetTable::select_rows(const std::vector<std::size_t>& rows) const {
    DatasetTable out;
    out.name = name;
    out.target = target;
    out.positive_label = positive_label;
    out.row_count = rows.size();
    out.columns.reserve(columns.size());
    for (const auto& c : columns) {
        Column nc;
        nc.name = c.name;
        nc.kind = c.kind;
        if (c.kind == ColumnKind::Numeric) {
            nc.numeric.reserve(rows.size());
            for (std::size_t r : rows) nc.numeric.push_back(c.numeric[r]);
        } else {
            nc.categorical.reserve(rows.size());
            for (std::size_t r : rows) nc.categorical.push_back(c.categorical[r]);
        }
        out.columns.push_back(std::move(nc));
    }
    return out;
}

void DatasetTable::validate() const {
    std::unordered_set<std::string> names;
    for (const auto& c : columns) {
        if (!names.insert(c.name).second) {
            throw DataError("duplicate column name: " + c.name);
        }
        if (c.size() != row_count) {
            throw DataError("column " + c.name + " has " + std::to_string(c.size()) +
                            " values, expected " + std::to_string(row_count));
        }
    }
    const Column* t = find_column(target);
    if (!t) throw DataError("target column not found: " + target);
    if (t->kind != ColumnKind::Categorical) {
        throw DataError("target column must be categorical: " + target);
    }
    std::set<std::string> labels(t->categorical.begin(), t->categorical.end());
    if (labels.size() != 2) {
        throw DataError("target not binary: " + std::to_string(labels.size()) +
                        " distinct labels in " + target);
    }
    if (!labels.count(positive_label)) {
        throw DataError("positive label '" + positive_label + "' not present in target");
    }
}

DatasetTable load_csv(const std::string& path, const std::string& target,
                      const std::string& positive_label,
                      const std::map<std::string, ColumnKind>& kind_overrides) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw DataError("empty file: " + path);
    std::vector<std::string> header = split_csv_line(line);
    const std::size_t ncols = header.size();

    std::vector<std::vector<std::string>> raw(ncols);
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() != ncols) {
            throw DataError(path + ":" + std::to_string(lineno) + ": ragged row, got " +
                            std::to_string(fields.size()) + " fields, expected " +
                            std::to_string(ncols));
        }
        for (std::size_t c = 0; c < ncols; ++c) {
            if (fields[c].empty()) {
                throw DataError(path + ":" + std::to_string(lineno) +
                                ": missing value in column " + header[c]);
            }
            raw[c].push_back(std::move(fields[c]));
        }
    }
    if (raw[0].empty()) throw DataError("no data rows in " + path);

    bool has_target = std::find(header.begin(), header.end(), target) != header.end();
    if (!has_target) throw DataError("target column not found: " + target + " in " + path);

    DatasetTable table;
    table.name = path;
    table.target = target;
    table.positive_label = positive_label;
    table.row_count = raw[0].size();

    for (std::size_t c = 0; c < ncols; ++c) {
        Column col;
        col.name = header[c];
        ColumnKind kind;
        auto it = kind_overrides.find(header[c]);
        if (header[c] == target) {
            kind = ColumnKind::Categorical;
        } else if (it != kind_overrides.end()) {
            kind = it->second;
        } else {
            double tmp;
            bool all_numeric = true;
            for (const auto& v : raw[c]) {
                if (!parse_number(v, tmp)) {
                    all_numeric = false;
                    break;
                }
            }
            kind = all_numeric ? ColumnKind::Numeric : ColumnKind::Categorical;
        }
        col.kind = kind;
        if (kind == ColumnKind::Numeric) {
            col.numeric.reserve(raw[c].size());
            for (const auto& v : raw[c]) {
                double d;
                if (!parse_number(v, d)) {
                    throw DataError("column " + header[c] + " marked numeric but value '" +
                                    v + "' does not parse");
                }
                col.numeric.push_back(d);
            }
        } else {
            col.categorical = std::move(raw[c]);
        }
        table.columns.push_back(std::move(col));
    }

    table.validate();
    return table;
}

DatasetTable load_nslkdd(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open file: " + path);

    DatasetTable table;
    table.name = path;
    table.target = "label";
    table.positive_label = "attack";
    table.columns.resize(42);
    for (std::size_t c = 0; c < 41; ++c) {
        table.columns[c].name = kNslKddFieldNames[c];
        table.columns[c].kind =
            nslkdd_symbolic(c) ? ColumnKind::Categorical : ColumnKind::Numeric;
    }
    table.columns[41].name = "label";
    table.columns[41].kind = ColumnKind::Categorical;

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> fields = split_csv_line(line);
        // 41 features + label + difficulty; tolerate files without difficulty
        if (fields.size() != 43 && fields.size() != 42) {
            throw DataError(path + ":" + std::to_string(lineno) +
                            ": expected 42 or 43 fields, got " +
                            std::to_string(fields.size()));
        }
        for (std::size_t c = 0; c < 41; ++c) {
            if (nslkdd_symbolic(c)) {
                table.columns[c].categorical.push_back(std::move(fields[c]));
            } else {
                double d;
                if (!parse_number(fields[c], d)) {
                    throw DataError(path + ":" + std::to_string(lineno) +
                                    ": unreadable numeric field " +
                                    std::string(kNslKddFieldNames[c]));
                }
                table.columns[c].numeric.push_back(d);
            }
        }
        table.columns[41].categorical.push_back(fields[41] == "normal" ? "normal"
                                                                       : "attack");
        ++table.row_count;
    }
    if (table.row_count == 0) throw DataError("empty file: " + path);
    table.validate();
    return table;
}

SplitPair stratified_split(const DatasetTable& table, double ratio, std::uint64_t seed) {
    if (!(ratio > 0.0 && ratio < 1.0)) {
        throw ConfigError("split ratio must be in (0,1)");
    }
    const Column& t = table.target_column();
    std::vector<std::vector<std::size_t>> by_class(2);
    for (std::size_t i = 0; i < table.row_count; ++i) {
        by_class[t.categorical[i] == table.positive_label ? 1 : 0].push_back(i);
    }
    for (const auto& rows : by_class) {
        if (rows.size() < 2) {
            throw DataError("stratified split requires at least 2 rows per class");
        }
    }

    std::size_t total_train =
        static_cast<std::size_t>(std::llround(ratio * static_cast<double>(table.row_count)));
    total_train = std::clamp<std::size_t>(total_train, 1, table.row_count - 1);

    // Largest-remainder apportionment of the train quota across classes.
    double exact[2];
    std::size_t take[2];
    for (int c = 0; c < 2; ++c) {
        exact[c] = ratio * static_cast<double>(by_class[c].size());
        take[c] = static_cast<std::size_t>(exact[c]);
    }
    std::size_t assigned = take[0] + take[1];
    while (assigned < total_train) {
        int pick = (exact[0] - static_cast<double>(take[0])) >=
                           (exact[1] - static_cast<double>(take[1]))
                       ? 0
                       : 1;
        if (take[pick] >= by_class[pick].size()) pick = 1 - pick;
        ++take[pick];
        ++assigned;
    }
    while (assigned > total_train) {
        int pick = (exact[0] - static_cast<double>(take[0])) <=
                           (exact[1] - static_cast<double>(take[1]))
                       ? 0
                       : 1;
        if (take[pick] == 0) pick = 1 - pick;
        --take[pick];
        --assigned;
    }

    std::vector<std::size_t> train_rows, test_rows;
    for (int c = 0; c < 2; ++c) {
        std::mt19937_64 rng(seed * 2 + static_cast<std::uint64_t>(c) + 0x9e3779b97f4a7c15ULL);
        std::vector<std::size_t> rows = by_class[c];
        std::shuffle(rows.begin(), rows.end(), rng);
        train_rows.insert(train_rows.end(), rows.begin(), rows.begin() + take[c]);
        test_rows.insert(test_rows.end(), rows.begin() + take[c], rows.end());
    }
    std::sort(train_rows.begin(), train_rows.end());
    std::sort(test_rows.begin(), test_rows.end());

    SplitPair pair;
    pair.ratio = ratio;
    pair.seed = seed;
    pair.train = table.select_rows(train_rows);
    pair.test = table.select_rows(test_rows);
    pair.train.name = table.name + "/train";
    pair.test.name = table.name + "/test";
    return pair;
}

std::vector<DatasetTable> make_subsets(const DatasetTable& table, std::size_t k,
                                       std::uint64_t seed) {
    if (k < 1) throw ConfigError("subset count must be >= 1");
    if (k > table.row_count) {
        throw ConfigError("subset count " + std::to_string(k) + " exceeds row count " +
                          std::to_string(table.row_count));
    }

    // k-1 distinct cut points in [1, row_count-1], drawn uniformly.
    std::mt19937_64 rng(seed);
    std::set<std::size_t> cuts;
    if (k > 1) {
        std::uniform_int_distribution<std::size_t> dist(1, table.row_count - 1);
        while (cuts.size() < k - 1) cuts.insert(dist(rng));
    }
    std::vector<std::size_t> bounds;
    bounds.push_back(0);
    bounds.insert(bounds.end(), cuts.begin(), cuts.end());
    bounds.push_back(table.row_count);

    const Column& t = table.target_column();
    auto block_single_class = [&](std::size_t lo, std::size_t hi) {
        bool pos = false, neg = false;
        for (std::size_t i = lo; i < hi; ++i) {
            (t.categorical[i] == table.positive_label ? pos : neg) = true;
            if (pos && neg) return false;
        }
        return true;
    };

    // Merge single-class blocks forward (last block merges backward).
    bool changed = true;
    while (changed && bounds.size() > 2) {
        changed = false;
        for (std::size_t b = 0; b + 1 < bounds.size() && bounds.size() > 2; ++b) {
            if (block_single_class(bounds[b], bounds[b + 1])) {
                if (b + 2 < bounds.size()) {
                    bounds.erase(bounds.begin() + static_cast<std::ptrdiff_t>(b) + 1);
                } else {
                    bounds.erase(bounds.begin() + static_cast<std::ptrdiff_t>(b));
                }
                changed = true;
                break;
            }
        }
    }

    std::vector<DatasetTable> subsets;
    for (std::size_t b = 0; b + 1 < bounds.size(); ++b) {
        std::vector<std::size_t> rows(bounds[b + 1] - bounds[b]);
        std::iota(rows.begin(), rows.end(), bounds[b]);
        DatasetTable sub = table.select_rows(rows);
        sub.name = table.name + "[" + std::to_string(b) + "]";
        subsets.push_back(std::move(sub));
    }
    return subsets;
}

void save_csv(const DatasetTable& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write file: " + path);
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (c) out << ',';
        out << table.columns[c].name;
    }
    out << '\n';
    for (std::size_t r = 0; r < table.row_count; ++r) {
        for (std::size_t c = 0; c < table.columns.size(); ++c) {
            if (c) out << ',';
            const Column& col = table.columns[c];
            if (col.kind == ColumnKind::Numeric) {
                out << format_number(col.numeric[r]);
            } else {
                out << col.categorical[r];
            }
        }
        out << '\n';
    }
}

}  // namespace metaselect
