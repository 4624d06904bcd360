#include "siolab/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace siolab {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double parse_double(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size()) throw ConfigError("config: '" + key + "' expects a number, got '" + text + "'");
    return v;
}

long long parse_int(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
        throw ConfigError("config: '" + key + "' expects an integer, got '" + text + "'");
    return v;
}

template <class T>
std::string join(const std::vector<T>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        if constexpr (std::is_same_v<T, double>) out += format_double(v[i]);
        else if constexpr (std::is_same_v<T, std::string>) out += v[i];
        else out += std::to_string(v[i]);
    }
    return out;
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Config Config::parse(std::istream& is, const std::string& source) {
    Config cfg;
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(source + ":" + std::to_string(lineno) + ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty() || section.find('.') != std::string::npos)
                throw ConfigError(source + ":" + std::to_string(lineno) + ": invalid section name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(source + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ConfigError(source + ":" + std::to_string(lineno) + ": empty key");
        const std::string full = section.empty() ? key : section + "." + key;
        if (cfg.values_.count(full)) throw ConfigError(source + ":" + std::to_string(lineno) + ": duplicate key '" + full + "'");
        cfg.values_[full] = trim(line.substr(eq + 1));
    }
    return cfg;
}

Config Config::parse_string(const std::string& text) {
    std::istringstream is(text);
    return parse(is);
}

Config Config::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    return parse(in, path);
}

bool Config::has(const std::string& key) const { return values_.count(key) != 0; }

void Config::set(const std::string& key, const std::string& value) { values_[key] = value; }

const std::string* Config::raw(const std::string& key) const {
    const auto it = values_.find(key);
    return it == values_.end() ? nullptr : &it->second;
}

void Config::record(const std::string& key, const std::string& value) const { effective_[key] = value; }

std::string Config::get_string(const std::string& key) const {
    const auto* v = raw(key);
    if (!v) throw ConfigError("config: missing required key '" + key + "'");
    record(key, *v);
    return *v;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    const auto* v = raw(key);
    const std::string out = v ? *v : fallback;
    record(key, out);
    return out;
}

double Config::get_double(const std::string& key) const {
    const double v = parse_double(key, get_string(key));
    record(key, format_double(v));
    return v;
}

double Config::get_double(const std::string& key, double fallback) const {
    const auto* v = raw(key);
    const double out = v ? parse_double(key, *v) : fallback;
    record(key, format_double(out));
    return out;
}

long long Config::get_int(const std::string& key) const { return parse_int(key, get_string(key)); }

long long Config::get_int(const std::string& key, long long fallback) const {
    const auto* v = raw(key);
    const long long out = v ? parse_int(key, *v) : fallback;
    record(key, std::to_string(out));
    return out;
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
    const auto* v = raw(key);
    std::uint64_t out = fallback;
    if (v) {
        const std::string t = trim(*v);
        const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
        if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
            throw ConfigError("config: '" + key + "' expects an unsigned 64-bit integer");
    }
    record(key, std::to_string(out));
    return out;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    const auto* v = raw(key);
    bool out = fallback;
    if (v) {
        std::string t = trim(*v);
        std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
        if (t == "true" || t == "1" || t == "yes") out = true;
        else if (t == "false" || t == "0" || t == "no") out = false;
        else throw ConfigError("config: '" + key + "' expects a boolean");
    }
    record(key, out ? "true" : "false");
    return out;
}

std::vector<double> Config::get_doubles(const std::string& key) const {
    if (!raw(key)) throw ConfigError("config: missing required key '" + key + "'");
    return get_doubles(key, {});
}

std::vector<double> Config::get_doubles(const std::string& key, const std::vector<double>& fallback) const {
    const auto* v = raw(key);
    std::vector<double> out;
    if (v) {
        for (const auto& item : split_list(*v)) out.push_back(parse_double(key, item));
    } else {
        out = fallback;
    }
    record(key, join(out));
    return out;
}

std::vector<long long> Config::get_ints(const std::string& key, const std::vector<long long>& fallback) const {
    const auto* v = raw(key);
    std::vector<long long> out;
    if (v) {
        for (const auto& item : split_list(*v)) out.push_back(parse_int(key, item));
    } else {
        out = fallback;
    }
    record(key, join(out));
    return out;
}

std::vector<std::string> Config::get_strings(const std::string& key, const std::vector<std::string>& fallback) const {
    const auto* v = raw(key);
    std::vector<std::string> out = v ? split_list(*v) : fallback;
    record(key, join(out));
    return out;
}

std::string Config::echo() const {
    std::map<std::string, std::map<std::string, std::string>> grouped;
    auto add = [&](const std::string& full, const std::string& value) {
        const auto dot = full.find('.');
        if (dot == std::string::npos) grouped[""][full] = value;
        else grouped[full.substr(0, dot)][full.substr(dot + 1)] = value;
    };
    for (const auto& [k, v] : values_) add(k, v);
    for (const auto& [k, v] : effective_) add(k, v);
    std::ostringstream os;
    for (const auto& [section, entries] : grouped) {
        if (!section.empty()) os << "[" << section << "]\n";
        for (const auto& [k, v] : entries) os << k << " = " << v << "\n";
        os << "\n";
    }
    return os.str();
}

std::vector<std::string> Config::unused_keys() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : values_)
        if (!effective_.count(k)) out.push_back(k);
    return out;
}

}  // namespace siolab
