#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace exmap {

// Plain-text configuration: one `section.key = value` per line, `#` starts a
// comment. Values are parsed on access; unknown keys are reported so typos
// fail loudly.
class KeyValues {
public:
    static KeyValues parse_file(const std::string& path);
    static KeyValues parse_string(const std::string& text, const std::string& origin = "<string>");

    bool has(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    std::string require_string(const std::string& key) const;
    long get_long(const std::string& key, long fallback) const;
    double get_double(const std::string& key, double fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::uint64_t get_seed(const std::string& key, std::uint64_t fallback) const;
    std::vector<std::string> get_list(const std::string& key) const;  // comma separated
    std::vector<double> get_double_list(const std::string& key) const;

    // keys present in the file but never read; call after parsing a config
    std::vector<std::string> unused_keys() const;

private:
    std::string origin_;
    std::map<std::string, std::string> values_;
    mutable std::map<std::string, bool> touched_;

    const std::string* find(const std::string& key) const;
};

}  // namespace exmap
