#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace siolab {

/// Malformed or inconsistent configuration; the CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Flat `key = value` file with `[section]` headers. Keys are addressed as
/// "section.key"; lists are comma separated; '#' and ';' start comments.
/// Every lookup records the effective value (default included) for echo().
class Config {
public:
    static Config parse(std::istream& is, const std::string& source = "<config>");
    static Config parse_string(const std::string& text);
    static Config load(const std::string& path);

    bool has(const std::string& key) const;
    void set(const std::string& key, const std::string& value);

    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    long long get_int(const std::string& key) const;
    long long get_int(const std::string& key, long long fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<double> get_doubles(const std::string& key) const;
    std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;
    std::vector<long long> get_ints(const std::string& key, const std::vector<long long>& fallback) const;
    std::vector<std::string> get_strings(const std::string& key, const std::vector<std::string>& fallback) const;

    /// Effective configuration: every key that was set or looked up, grouped
    /// by section, in the same syntax the parser accepts.
    std::string echo() const;

    /// Keys present in the file that no lookup has touched.
    std::vector<std::string> unused_keys() const;

private:
    const std::string* raw(const std::string& key) const;
    void record(const std::string& key, const std::string& value) const;

    std::map<std::string, std::string> values_;
    mutable std::map<std::string, std::string> effective_;
};

std::string format_double(double v);

}  // namespace siolab
