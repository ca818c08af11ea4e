#include "rlops/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace rlops {

bool ConfigValue::as_bool() const {
    if (auto* b = std::get_if<bool>(&data)) return *b;
    throw ConfigError("config value is not a boolean");
}

std::int64_t ConfigValue::as_int() const {
    if (auto* i = std::get_if<std::int64_t>(&data)) return *i;
    throw ConfigError("config value is not an integer");
}

double ConfigValue::as_double() const {
    if (auto* d = std::get_if<double>(&data)) return *d;
    if (auto* i = std::get_if<std::int64_t>(&data)) return static_cast<double>(*i);
    throw ConfigError("config value is not a number");
}

const std::string& ConfigValue::as_string() const {
    if (auto* s = std::get_if<std::string>(&data)) return *s;
    throw ConfigError("config value is not a string");
}

const std::vector<ConfigValue>& ConfigValue::as_array() const {
    if (auto* a = std::get_if<std::vector<ConfigValue>>(&data)) return *a;
    throw ConfigError("config value is not an array");
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
    return find(section, key) != nullptr;
}

const ConfigValue* ConfigFile::find(const std::string& section, const std::string& key) const {
    auto sit = sections.find(section);
    if (sit == sections.end()) return nullptr;
    auto kit = sit->second.find(key);
    if (kit == sit->second.end()) return nullptr;
    return &kit->second;
}

const ConfigValue& ConfigFile::get(const std::string& section, const std::string& key) const {
    const ConfigValue* v = find(section, key);
    if (!v) throw ConfigError("missing config key [" + section + "] " + key);
    return *v;
}

double ConfigFile::get_double(const std::string& section, const std::string& key,
                              double fallback) const {
    const ConfigValue* v = find(section, key);
    return v ? v->as_double() : fallback;
}

std::int64_t ConfigFile::get_int(const std::string& section, const std::string& key,
                                 std::int64_t fallback) const {
    const ConfigValue* v = find(section, key);
    return v ? v->as_int() : fallback;
}

std::string ConfigFile::get_string(const std::string& section, const std::string& key,
                                   const std::string& fallback) const {
    const ConfigValue* v = find(section, key);
    return v ? v->as_string() : fallback;
}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

ConfigValue parse_scalar(const std::string& raw, int line_no) {
    const std::string text = trim(raw);
    if (text.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty value");
    if (text.size() >= 2 && (text.front() == '"' || text.front() == '\'')) {
        if (text.back() != text.front())
            throw ConfigError("line " + std::to_string(line_no) + ": unterminated string");
        return {text.substr(1, text.size() - 2)};
    }
    if (text == "true") return {true};
    if (text == "false") return {false};
    // Integer first, then double; otherwise a bare string.
    {
        std::int64_t i = 0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), i);
        if (ec == std::errc() && ptr == text.data() + text.size()) return {i};
    }
    {
        double d = 0.0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), d);
        if (ec == std::errc() && ptr == text.data() + text.size()) return {d};
    }
    return {text};
}

ConfigValue parse_value(const std::string& raw, int line_no) {
    const std::string text = trim(raw);
    if (!text.empty() && text.front() == '[') {
        if (text.back() != ']')
            throw ConfigError("line " + std::to_string(line_no) + ": unterminated array");
        std::vector<ConfigValue> items;
        const std::string inner = text.substr(1, text.size() - 2);
        std::size_t start = 0;
        while (start <= inner.size()) {
            std::size_t comma = inner.find(',', start);
            const std::string piece =
                comma == std::string::npos ? inner.substr(start) : inner.substr(start, comma - start);
            if (!trim(piece).empty()) items.push_back(parse_scalar(piece, line_no));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        return {std::move(items)};
    }
    return parse_scalar(text, line_no);
}

// Strips a trailing comment, respecting quoted strings.
std::string strip_comment(const std::string& line) {
    bool in_string = false;
    char quote = 0;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (in_string) {
            if (c == quote) in_string = false;
        } else if (c == '"' || c == '\'') {
            in_string = true;
            quote = c;
        } else if (c == '#') {
            return line.substr(0, i);
        }
    }
    return line;
}

} // namespace

ConfigFile parse_config(const std::string& text) {
    ConfigFile file;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        line = trim(strip_comment(line));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(line_no) + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw ConfigError("line " + std::to_string(line_no) + ": empty section name");
            file.sections[section]; // materialize even if empty
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
        file.sections[section][key] = parse_value(line.substr(eq + 1), line_no);
    }
    return file;
}

ConfigFile load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

} // namespace rlops
