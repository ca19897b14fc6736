#pragma once

// Flat key = value configuration ('#' comments), plus command-line
// overrides. All physical quantities are in shot-noise units except rates
// (Hz) and loss (optionally dB via loss_db, T0 = 10^(-dB/10)).

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cvqkd {

class Config {
public:
    Config() = default;

    /// Parses a config file; throws std::runtime_error on I/O or syntax
    /// errors (line number included).
    static Config from_file(const std::string& path);

    /// Applies a "key=value" override.
    void set(const std::string& assignment);
    void set(const std::string& key, const std::string& value);

    bool has(const std::string& key) const;
    std::optional<std::string> get(const std::string& key) const;

    /// Typed getters; throw std::domain_error naming the field on a parse
    /// failure, and when no default is given, on a missing field.
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& key) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    /// Comma-separated list of reals.
    std::vector<double> get_double_list(const std::string& key) const;

    const std::map<std::string, std::string>& entries() const { return kv_; }

private:
    std::map<std::string, std::string> kv_;
};

}  // namespace cvqkd
