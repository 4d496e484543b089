#pragma once

#include <map>
#include <optional>
#include <string>

namespace ctxmatch {

// Minimal TOML-style key-value file: [section] headers, key = value
// lines, '#' comments. Values are strings (optionally double-quoted),
// numbers, or true/false. Section and key order is preserved on write
// by sorting, so emitted snapshots are byte-stable.
class KvConfig {
public:
    static KvConfig parse_file(const std::string& path);
    static KvConfig parse_string(const std::string& text);

    bool has(const std::string& section, const std::string& key) const;
    std::optional<std::string> get(const std::string& section, const std::string& key) const;

    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    long long get_int(const std::string& section, const std::string& key, long long fallback) const;
    bool get_bool(const std::string& section, const std::string& key, bool fallback) const;

    void set(const std::string& section, const std::string& key, const std::string& value);
    void set_double(const std::string& section, const std::string& key, double value);
    void set_int(const std::string& section, const std::string& key, long long value);
    void set_bool(const std::string& section, const std::string& key, bool value);

    const std::map<std::string, std::map<std::string, std::string>>& sections() const {
        return sections_;
    }

    std::string to_string() const;
    void write_file(const std::string& path) const;

private:
    std::map<std::string, std::map<std::string, std::string>> sections_;
};

} // namespace ctxmatch
