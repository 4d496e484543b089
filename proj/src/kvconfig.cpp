#include "ctxmatch/kvconfig.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ctxmatch/errors.hpp"

namespace ctxmatch {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string unquote(const std::string& s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
        std::string out;
        for (std::size_t i = 1; i + 1 < s.size(); ++i) {
            if (s[i] == '\\' && i + 2 < s.size()) {
                ++i;
                if (s[i] == 'n') out.push_back('\n');
                else out.push_back(s[i]);
            } else {
                out.push_back(s[i]);
            }
        }
        return out;
    }
    return s;
}

bool needs_quotes(const std::string& s) {
    if (s.empty()) return true;
    for (char c : s)
        if (c == ' ' || c == '"' || c == '#' || c == '=' || c == '[' || c == ']' || c == '\n')
            return true;
    return false;
}

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        if (c == '\n') { out += "\\n"; continue; }
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

} // namespace

KvConfig KvConfig::parse_string(const std::string& text) {
    KvConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::string section;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw Error("MalformedConfig",
                            "unterminated section header at line " + std::to_string(lineno));
            section = unquote(trim(t.substr(1, t.size() - 2)));
            cfg.sections_[section];
            continue;
        }
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw Error("MalformedConfig", "expected key = value at line " + std::to_string(lineno));
        std::string key = trim(t.substr(0, eq));
        std::string value = unquote(trim(t.substr(eq + 1)));
        if (key.empty())
            throw Error("MalformedConfig", "empty key at line " + std::to_string(lineno));
        cfg.sections_[section][key] = value;
    }
    return cfg;
}

KvConfig KvConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("FileNotFound", "cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str());
}

bool KvConfig::has(const std::string& section, const std::string& key) const {
    auto s = sections_.find(section);
    return s != sections_.end() && s->second.count(key) > 0;
}

std::optional<std::string> KvConfig::get(const std::string& section, const std::string& key) const {
    auto s = sections_.find(section);
    if (s == sections_.end()) return std::nullopt;
    auto k = s->second.find(key);
    if (k == s->second.end()) return std::nullopt;
    return k->second;
}

std::string KvConfig::get_string(const std::string& section, const std::string& key,
                                 const std::string& fallback) const {
    auto v = get(section, key);
    return v ? *v : fallback;
}

double KvConfig::get_double(const std::string& section, const std::string& key,
                            double fallback) const {
    auto v = get(section, key);
    if (!v) return fallback;
    try {
        return std::stod(*v);
    } catch (const std::exception&) {
        throw Error("MalformedConfig", section + "." + key + " is not a number: " + *v);
    }
}

long long KvConfig::get_int(const std::string& section, const std::string& key,
                            long long fallback) const {
    auto v = get(section, key);
    if (!v) return fallback;
    try {
        return std::stoll(*v);
    } catch (const std::exception&) {
        throw Error("MalformedConfig", section + "." + key + " is not an integer: " + *v);
    }
}

bool KvConfig::get_bool(const std::string& section, const std::string& key, bool fallback) const {
    auto v = get(section, key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1") return true;
    if (*v == "false" || *v == "0") return false;
    throw Error("MalformedConfig", section + "." + key + " is not a bool: " + *v);
}

void KvConfig::set(const std::string& section, const std::string& key, const std::string& value) {
    sections_[section][key] = value;
}

void KvConfig::set_double(const std::string& section, const std::string& key, double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    set(section, key, buf);
}

void KvConfig::set_int(const std::string& section, const std::string& key, long long value) {
    set(section, key, std::to_string(value));
}

void KvConfig::set_bool(const std::string& section, const std::string& key, bool value) {
    set(section, key, value ? "true" : "false");
}

std::string KvConfig::to_string() const {
    std::ostringstream out;
    bool first = true;
    for (const auto& [section, keys] : sections_) {
        if (!first) out << "\n";
        first = false;
        if (!section.empty()) {
            if (needs_quotes(section)) out << "[" << quote(section) << "]\n";
            else out << "[" << section << "]\n";
        }
        for (const auto& [key, value] : keys) {
            out << key << " = ";
            if (needs_quotes(value)) out << quote(value);
            else out << value;
            out << "\n";
        }
    }
    return out.str();
}

void KvConfig::write_file(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("FileWriteError", "cannot write " + path);
    out << to_string();
}

} // namespace ctxmatch
