#include "ctxmatch/tabular.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unordered_set>

#include "ctxmatch/errors.hpp"
#include "ctxmatch/kvconfig.hpp"

namespace ctxmatch {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

// One RFC-4180-style record; handles quoted fields and embedded
// delimiters/newlines. Returns false at EOF with nothing read.
bool read_record(std::istream& in, const CsvOptions& opts, std::vector<std::string>& out) {
    out.clear();
    std::string field;
    bool in_quotes = false;
    bool any = false;
    int c;
    while ((c = in.get()) != EOF) {
        any = true;
        char ch = static_cast<char>(c);
        if (in_quotes) {
            if (ch == opts.quote) {
                if (in.peek() == opts.quote) {
                    field.push_back(opts.quote);
                    in.get();
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(ch);
            }
        } else if (ch == opts.quote && field.empty()) {
            in_quotes = true;
        } else if (ch == opts.delimiter) {
            out.push_back(field);
            field.clear();
        } else if (ch == '\r') {
            if (in.peek() == '\n') in.get();
            out.push_back(field);
            return true;
        } else if (ch == '\n') {
            out.push_back(field);
            return true;
        } else {
            field.push_back(ch);
        }
    }
    if (!any) return false;
    out.push_back(field);
    return true;
}

bool is_punc(char c) {
    static const std::string punc = ".,;:!?'\"()-";
    return punc.find(c) != std::string::npos;
}

} // namespace

double TableData::missing_rate() const {
    if (n_cells() == 0) return 0.0;
    std::size_t missing = 0;
    for (const auto& row : rows)
        for (const auto& cell : row)
            if (!cell.has_value()) ++missing;
    return static_cast<double>(missing) / static_cast<double>(n_cells());
}

std::string normalize_column_name(const std::string& name) {
    std::string t = trim(name);
    std::string out;
    bool in_ws = false;
    for (char c : t) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            in_ws = true;
        } else {
            if (in_ws && !out.empty()) out.push_back('_');
            in_ws = false;
            out.push_back(c);
        }
    }
    return out;
}

TableData load_table(const std::string& path, const CsvOptions& opts,
                     const std::string& table_id) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("FileNotFound", "cannot open table file: " + path);

    TableData t;
    if (!table_id.empty()) {
        t.table_id = table_id;
    } else {
        auto slash = path.find_last_of("/\\");
        std::string stem = slash == std::string::npos ? path : path.substr(slash + 1);
        auto dot = stem.find_last_of('.');
        t.table_id = dot == std::string::npos ? stem : stem.substr(0, dot);
    }

    std::vector<std::string> record;
    if (!opts.header || !read_record(in, opts, record))
        throw Error("EmptyHeader", "no header row in " + path);
    if (record.size() == 1 && trim(record[0]).empty())
        throw Error("EmptyHeader", "blank header row in " + path);

    std::unordered_set<std::string> seen;
    for (const auto& raw : record) {
        ColumnMeta meta;
        meta.name = trim(raw);
        if (meta.name.empty())
            throw Error("EmptyHeader", "empty column name in header of " + path);
        std::string key = lower(normalize_column_name(meta.name));
        if (!seen.insert(key).second)
            throw Error("DuplicateColumn", "duplicate column name '" + meta.name + "' in " + path);
        t.columns.push_back(std::move(meta));
    }

    std::size_t row_index = 0;
    while (read_record(in, opts, record)) {
        if (record.size() == 1 && record[0].empty() && in.eof()) break;  // trailing newline
        if (record.size() != t.columns.size())
            throw Error("RowLengthMismatch",
                        "row " + std::to_string(row_index) + " has " +
                            std::to_string(record.size()) + " cells, expected " +
                            std::to_string(t.columns.size()) + " in " + path);
        std::vector<Cell> row;
        row.reserve(record.size());
        for (auto& v : record) row.emplace_back(std::move(v));
        t.rows.push_back(std::move(row));
        ++row_index;
    }
    return t;
}

void apply_metadata_file(TableData& t, const std::string& path) {
    KvConfig kv = KvConfig::parse_file(path);
    for (const auto& [section, keys] : kv.sections()) {
        auto it = std::find_if(t.columns.begin(), t.columns.end(), [&](const ColumnMeta& m) {
            return lower(normalize_column_name(m.name)) == lower(normalize_column_name(section));
        });
        if (it == t.columns.end()) {
            std::cerr << "warning: metadata section [" << section << "] matches no column of "
                      << t.table_id << "\n";
            continue;
        }
        if (auto d = kv.get(section, "description")) it->description = *d;
        if (auto ty = kv.get(section, "declared_type")) {
            std::string v = lower(trim(*ty));
            if (v == "numeric") it->declared_type = DeclaredType::Numeric;
            else if (v == "text") it->declared_type = DeclaredType::Text;
            else it->declared_type = DeclaredType::Unknown;
        }
        it->zero_fill = kv.get_bool(section, "zero_fill", it->zero_fill);
        (void)keys;
    }
}

const std::set<std::string>& default_missing_tokens() {
    static const std::set<std::string> tokens = {"", "na", "n/a", "null", "none", "-"};
    return tokens;
}

TableData normalize_missing(const TableData& t, const std::set<std::string>& missing_tokens,
                            const std::set<std::string>& zero_fill_columns) {
    std::vector<bool> zero_fill(t.n_cols(), false);
    std::set<std::string> matched;
    for (std::size_t c = 0; c < t.n_cols(); ++c) {
        const std::string norm = lower(normalize_column_name(t.columns[c].name));
        for (const auto& z : zero_fill_columns) {
            if (lower(normalize_column_name(z)) == norm) {
                zero_fill[c] = true;
                matched.insert(z);
            }
        }
        if (t.columns[c].zero_fill) zero_fill[c] = true;
    }
    for (const auto& z : zero_fill_columns)
        if (!matched.count(z))
            std::cerr << "warning: zero_fill column '" << z << "' not present in " << t.table_id
                      << "\n";

    TableData out = t;
    for (auto& row : out.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            bool missing;
            if (!row[c].has_value()) {
                missing = true;
            } else {
                missing = missing_tokens.count(lower(trim(*row[c]))) > 0;
            }
            if (missing) {
                if (zero_fill[c]) row[c] = "0";
                else row[c] = std::nullopt;
            }
        }
    }
    return out;
}

std::optional<double> parse_number(const std::string& value) {
    std::string t = trim(value);
    if (t.empty()) return std::nullopt;
    // strip thousands separators sitting between digits
    std::string s;
    s.reserve(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] == ',' && i > 0 && i + 1 < t.size() &&
            std::isdigit(static_cast<unsigned char>(t[i - 1])) &&
            std::isdigit(static_cast<unsigned char>(t[i + 1]))) {
            continue;
        }
        s.push_back(t[i]);
    }
    const char* begin = s.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end != begin + s.size()) return std::nullopt;
    if (!std::isfinite(v)) return std::nullopt;
    return v;
}

ColumnProfile profile_column(const TableData& t, std::size_t col_index) {
    if (col_index >= t.n_cols())
        throw Error("ColumnOutOfRange", "column index " + std::to_string(col_index));

    ColumnProfile p;
    std::size_t missing = 0;
    std::vector<double> numbers;
    std::unordered_set<std::string> distinct;
    double r_space = 0, r_punc = 0, r_special = 0, r_digit = 0;
    std::size_t char_cells = 0;
    std::size_t linguistic = 0;

    for (const auto& row : t.rows) {
        const Cell& cell = row[col_index];
        if (!cell.has_value()) {
            ++missing;
            continue;
        }
        const std::string& v = *cell;
        distinct.insert(v);
        if (auto num = parse_number(v)) numbers.push_back(*num);
        else ++linguistic;
        if (!v.empty()) {
            double sp = 0, pu = 0, spec = 0, dig = 0;
            for (char c : v) {
                unsigned char uc = static_cast<unsigned char>(c);
                if (std::isspace(uc)) ++sp;
                else if (is_punc(c)) ++pu;
                else if (std::isdigit(uc)) ++dig;
                else if (!std::isalnum(uc)) ++spec;
            }
            double len = static_cast<double>(v.size());
            r_space += sp / len;
            r_punc += pu / len;
            r_special += spec / len;
            r_digit += dig / len;
        }
        ++char_cells;  // zero-length cells contribute zero ratios
    }

    std::size_t n_valid = t.n_rows() - missing;
    p.n_valid = n_valid;
    p.missing_rate = t.n_rows() == 0 ? 1.0
                                     : static_cast<double>(missing) / static_cast<double>(t.n_rows());
    if (n_valid == 0) {
        p.missing_rate = 1.0;
        return p;  // both vectors inapplicable
    }

    p.distinct_ratio = static_cast<double>(distinct.size()) / static_cast<double>(n_valid);
    p.linguistic_fraction = static_cast<double>(linguistic) / static_cast<double>(n_valid);

    if (!numbers.empty()) {
        double sum = 0, mn = numbers[0], mx = numbers[0];
        for (double x : numbers) {
            sum += x;
            mn = std::min(mn, x);
            mx = std::max(mx, x);
        }
        double mean = sum / static_cast<double>(numbers.size());
        double var = 0;
        for (double x : numbers) var += (x - mean) * (x - mean);
        var /= static_cast<double>(numbers.size());  // population variance
        p.has_num = true;
        p.v_num = {mean, mn, mx, var, std::sqrt(var)};
    }

    p.has_char = true;
    double denom = static_cast<double>(char_cells);
    p.v_char = {r_space / denom, r_punc / denom, r_special / denom, r_digit / denom};
    return p;
}

std::vector<ColumnProfile> profile_table(const TableData& t) {
    std::vector<ColumnProfile> out;
    out.reserve(t.n_cols());
    for (std::size_t c = 0; c < t.n_cols(); ++c) out.push_back(profile_column(t, c));
    return out;
}

std::array<double, 9> ColumnProfile::flat() const {
    std::array<double, 9> v;
    for (std::size_t k = 0; k < 5; ++k) v[k] = has_num ? v_num[k] : -1.0;
    for (std::size_t k = 0; k < 4; ++k) v[5 + k] = has_char ? v_char[k] : -1.0;
    return v;
}

std::array<bool, 9> ColumnProfile::applicable() const {
    std::array<bool, 9> m;
    for (std::size_t k = 0; k < 5; ++k) m[k] = has_num;
    for (std::size_t k = 0; k < 4; ++k) m[5 + k] = has_char;
    return m;
}

std::string normalize_token(const std::string& value) {
    std::string t = lower(trim(value));
    std::string out;
    bool in_ws = false;
    for (char c : t) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            in_ws = true;
        } else {
            if (in_ws && !out.empty()) out.push_back('_');
            in_ws = false;
            out.push_back(c);
        }
    }
    return out;
}

std::vector<std::string> tokenize_cell(const std::string& value, TokenMode mode) {
    std::vector<std::string> out;
    if (mode == TokenMode::Cell) {
        std::string tok = normalize_token(value);
        if (!tok.empty()) out.push_back(std::move(tok));
        return out;
    }
    std::istringstream ss(value);
    std::string word;
    while (ss >> word) {
        std::string tok = normalize_token(word);
        if (!tok.empty()) out.push_back(std::move(tok));
    }
    return out;
}

} // namespace ctxmatch
