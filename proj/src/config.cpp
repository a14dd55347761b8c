#include "exmap/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "exmap/errors.hpp"

namespace exmap {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}  // namespace

KeyValues KeyValues::parse_string(const std::string& text, const std::string& origin) {
    KeyValues kv;
    kv.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError(origin + ":" + std::to_string(line_no) +
                                  ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ValidationError(origin + ":" + std::to_string(line_no) + ": empty key");
        if (kv.values_.count(key))
            throw ValidationError(origin + ":" + std::to_string(line_no) + ": duplicate key '" +
                                  key + "'");
        kv.values_[key] = value;
    }
    return kv;
}

KeyValues KeyValues::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str(), path);
}

const std::string* KeyValues::find(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return nullptr;
    touched_[key] = true;
    return &it->second;
}

bool KeyValues::has(const std::string& key) const { return find(key) != nullptr; }

std::string KeyValues::get_string(const std::string& key, const std::string& fallback) const {
    const std::string* v = find(key);
    return v ? *v : fallback;
}

std::string KeyValues::require_string(const std::string& key) const {
    const std::string* v = find(key);
    if (!v) throw ValidationError(origin_ + ": missing required key '" + key + "'");
    return *v;
}

long KeyValues::get_long(const std::string& key, long fallback) const {
    const std::string* v = find(key);
    if (!v) return fallback;
    char* end = nullptr;
    const long out = std::strtol(v->c_str(), &end, 10);
    if (end == v->c_str() || *end != '\0')
        throw ValidationError(origin_ + ": key '" + key + "' is not an integer: " + *v);
    return out;
}

double KeyValues::get_double(const std::string& key, double fallback) const {
    const std::string* v = find(key);
    if (!v) return fallback;
    char* end = nullptr;
    const double out = std::strtod(v->c_str(), &end);
    if (end == v->c_str() || *end != '\0')
        throw ValidationError(origin_ + ": key '" + key + "' is not a number: " + *v);
    return out;
}

bool KeyValues::get_bool(const std::string& key, bool fallback) const {
    const std::string* v = find(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes") return true;
    if (*v == "false" || *v == "0" || *v == "no") return false;
    throw ValidationError(origin_ + ": key '" + key + "' is not a boolean: " + *v);
}

std::uint64_t KeyValues::get_seed(const std::string& key, std::uint64_t fallback) const {
    const std::string* v = find(key);
    if (!v) return fallback;
    char* end = nullptr;
    const unsigned long long out = std::strtoull(v->c_str(), &end, 10);
    if (end == v->c_str() || *end != '\0')
        throw ValidationError(origin_ + ": key '" + key + "' is not a seed: " + *v);
    return out;
}

std::vector<std::string> KeyValues::get_list(const std::string& key) const {
    const std::string* v = find(key);
    std::vector<std::string> out;
    if (!v) return out;
    std::istringstream in(*v);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<double> KeyValues::get_double_list(const std::string& key) const {
    std::vector<double> out;
    for (const std::string& item : get_list(key)) {
        char* end = nullptr;
        const double x = std::strtod(item.c_str(), &end);
        if (end == item.c_str() || *end != '\0')
            throw ValidationError(origin_ + ": key '" + key + "' has a non-numeric item: " +
                                  item);
        out.push_back(x);
    }
    return out;
}

std::vector<std::string> KeyValues::unused_keys() const {
    std::vector<std::string> out;
    for (const auto& [key, value] : values_)
        if (!touched_.count(key)) out.push_back(key);
    return out;
}

}  // namespace exmap
