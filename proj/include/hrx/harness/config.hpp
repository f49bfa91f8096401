// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace hrx::harness {

/// Flat key-value configuration.
///
/// Grammar, one entry per line:
///   line    := blank | comment | entry
///   comment := '#' any*
///   entry   := key '=' value [comment]
///   key     := [A-Za-z0-9_.-]+
///   value   := text up to '#' or end of line, surrounding blanks trimmed
/// Lists are comma separated. A repeated key is an error.
class Config {
public:
    Config() = default;

    /// Throws ConfigError naming the path if it cannot be read, or the line
    /// number of a malformed entry.
    static Config load(const std::filesystem::path& path);
    static Config parse(const std::string& text, const std::string& origin = "<string>");

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    const std::map<std::string, std::string>& values() const { return values_; }

    std::string get_string(const std::string& key, const std::string& fallback) const;
    int get_int(const std::string& key, int fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    double get_double(const std::string& key, double fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<std::string> get_list(const std::string& key, const std::vector<std::string>& fallback) const;
    std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;

    /// Throws ConfigError listing keys not present in `known`.
    void require_known(const std::set<std::string>& known) const;

private:
    std::map<std::string, std::string> values_;
    std::string origin_;
};

std::vector<std::string> split_list(const std::string& text);

}  // namespace hrx::harness
