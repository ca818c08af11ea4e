#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace rlops {

// TOML-style config subset: [section] headers, `key = value` lines,
// values are numbers, booleans, quoted or bare strings, or flat arrays
// `[a, b, c]`. Dotted keys (beta.family) are kept verbatim. '#' comments.

struct ConfigValue {
    std::variant<bool, std::int64_t, double, std::string, std::vector<ConfigValue>> data;

    bool is_array() const { return std::holds_alternative<std::vector<ConfigValue>>(data); }
    bool as_bool() const;
    std::int64_t as_int() const;
    double as_double() const; // ints coerce
    const std::string& as_string() const;
    const std::vector<ConfigValue>& as_array() const;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ConfigFile {
    // section -> key -> value; keys before any section land in "".
    std::map<std::string, std::map<std::string, ConfigValue>> sections;

    bool has(const std::string& section, const std::string& key) const;
    const ConfigValue& get(const std::string& section, const std::string& key) const;
    const ConfigValue* find(const std::string& section, const std::string& key) const;

    double get_double(const std::string& section, const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& section, const std::string& key,
                         std::int64_t fallback) const;
    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const;
};

ConfigFile parse_config(const std::string& text);
ConfigFile load_config_file(const std::string& path);

} // namespace rlops
