#include "cvqkd/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cvqkd {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

Config Config::from_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config file: " + path);
    Config c;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty())
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": empty key");
        c.kv_[key] = val;
    }
    return c;
}

void Config::set(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw std::runtime_error("override must be key=value: " + assignment);
    set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void Config::set(const std::string& key, const std::string& value) {
    if (key.empty()) throw std::runtime_error("override with empty key");
    kv_[key] = value;
}

bool Config::has(const std::string& key) const { return kv_.count(key) != 0; }

std::optional<std::string> Config::get(const std::string& key) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return std::nullopt;
    return it->second;
}

double Config::get_double(const std::string& key) const {
    const auto v = get(key);
    if (!v) throw std::domain_error("missing required field '" + key + "'");
    char* end = nullptr;
    const double d = std::strtod(v->c_str(), &end);
    if (end == v->c_str() || *end != '\0')
        throw std::domain_error("field '" + key + "' is not a number: " + *v);
    return d;
}

double Config::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

std::int64_t Config::get_int(const std::string& key) const {
    const auto v = get(key);
    if (!v) throw std::domain_error("missing required field '" + key + "'");
    char* end = nullptr;
    const long long i = std::strtoll(v->c_str(), &end, 10);
    if (end == v->c_str() || *end != '\0')
        throw std::domain_error("field '" + key + "' is not an integer: " + *v);
    return i;
}

std::int64_t Config::get_int(const std::string& key, std::int64_t fallback) const {
    return has(key) ? get_int(key) : fallback;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    const auto v = get(key);
    return v ? *v : fallback;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    const auto v = get(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes") return true;
    if (*v == "false" || *v == "0" || *v == "no") return false;
    throw std::domain_error("field '" + key + "' is not a boolean: " + *v);
}

std::vector<double> Config::get_double_list(const std::string& key) const {
    const auto v = get(key);
    if (!v) throw std::domain_error("missing required field '" + key + "'");
    std::vector<double> out;
    std::stringstream ss(*v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        char* end = nullptr;
        const std::string t = trim(item);
        if (t.empty()) continue;
        const double d = std::strtod(t.c_str(), &end);
        if (end == t.c_str() || *end != '\0')
            throw std::domain_error("field '" + key + "' has a non-numeric item: " + t);
        out.push_back(d);
    }
    if (out.empty()) throw std::domain_error("field '" + key + "' is an empty list");
    return out;
}

}  // namespace cvqkd
