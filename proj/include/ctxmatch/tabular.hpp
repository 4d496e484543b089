#pragma once

#include <array>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace ctxmatch {

enum class DeclaredType { Numeric, Text, Unknown };

struct ColumnMeta {
    std::string name;
    std::optional<std::string> description;
    DeclaredType declared_type = DeclaredType::Unknown;
    bool zero_fill = false;
};

// A cell is either text or missing.
using Cell = std::optional<std::string>;

struct TableData {
    std::string table_id;
    std::vector<ColumnMeta> columns;
    std::vector<std::vector<Cell>> rows;

    std::size_t n_rows() const { return rows.size(); }
    std::size_t n_cols() const { return columns.size(); }
    std::size_t n_cells() const { return n_rows() * n_cols(); }

    double missing_rate() const;
};

// Per-column statistics feeding instance-based similarity and column
// importance. Inapplicable blocks are encoded as -1 fill when the
// profile is flattened.
struct ColumnProfile {
    bool has_num = false;
    std::array<double, 5> v_num{};   // mean, min, max, variance, std
    bool has_char = false;
    std::array<double, 4> v_char{};  // r_space, r_punc, r_special, r_digit
    double missing_rate = 0.0;
    double distinct_ratio = 0.0;
    double linguistic_fraction = 0.0;
    std::size_t n_valid = 0;

    // 9-vector [num block | char block] with -1 fill for absent blocks.
    std::array<double, 9> flat() const;
    // Applicability mask aligned with flat().
    std::array<bool, 9> applicable() const;
};

struct CsvOptions {
    char delimiter = ',';
    char quote = '"';
    bool header = true;
};

TableData load_table(const std::string& path, const CsvOptions& opts = {},
                     const std::string& table_id = "");

// Parses a TOML-style sidecar: one [Column Name] section per column with
// description / declared_type / zero_fill keys. Unknown columns warn.
void apply_metadata_file(TableData& t, const std::string& path);

const std::set<std::string>& default_missing_tokens();

TableData normalize_missing(const TableData& t,
                            const std::set<std::string>& missing_tokens = default_missing_tokens(),
                            const std::set<std::string>& zero_fill_columns = {});

ColumnProfile profile_column(const TableData& t, std::size_t col_index);
std::vector<ColumnProfile> profile_table(const TableData& t);

enum class TokenMode { Cell, Word };

std::vector<std::string> tokenize_cell(const std::string& value,
                                       TokenMode mode = TokenMode::Cell);

// trim + case-fold + collapse internal whitespace to '_'
std::string normalize_token(const std::string& value);

// Accepts integer/decimal/scientific notation; thousands separators
// between digits are stripped first.
std::optional<double> parse_number(const std::string& value);

// Column name as used for node ids and ground-truth keys.
std::string normalize_column_name(const std::string& name);

} // namespace ctxmatch
