#include "laprep/tomlmini.hpp"

#include "laprep/dense.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace laprep::toml {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

// Strips a trailing comment that is not inside a string literal.
std::string strip_comment(const std::string& s) {
    bool in_string = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') in_string = !in_string;
        if (s[i] == '#' && !in_string) return s.substr(0, i);
    }
    return s;
}

Value parse_scalar(const std::string& raw) {
    const std::string s = trim(raw);
    if (s.empty()) throw SchemaError("toml: empty value");
    Value v;
    if (s.front() == '"') {
        if (s.size() < 2 || s.back() != '"') throw SchemaError("toml: unterminated string");
        v.kind = Value::Kind::String;
        v.text = s.substr(1, s.size() - 2);
        return v;
    }
    if (s == "true" || s == "false") {
        v.kind = Value::Kind::Bool;
        v.boolean = (s == "true");
        return v;
    }
    const bool looks_float =
        s.find('.') != std::string::npos || s.find('e') != std::string::npos ||
        s.find('E') != std::string::npos || s == "inf" || s == "-inf" || s == "nan";
    char* end = nullptr;
    if (looks_float) {
        v.kind = Value::Kind::Float;
        v.real = std::strtod(s.c_str(), &end);
    } else {
        v.kind = Value::Kind::Int;
        v.integer = std::strtoll(s.c_str(), &end, 10);
    }
    if (end == nullptr || *end != '\0') throw SchemaError("toml: cannot parse value '" + s + "'");
    return v;
}

Value parse_value(const std::string& raw) {
    const std::string s = trim(raw);
    if (!s.empty() && s.front() == '[') {
        if (s.back() != ']') throw SchemaError("toml: unterminated array");
        Value v;
        v.kind = Value::Kind::Array;
        const std::string body = s.substr(1, s.size() - 2);
        std::string item;
        std::stringstream ss(body);
        while (std::getline(ss, item, ',')) {
            const std::string t = trim(item);
            if (t.empty()) continue; // trailing comma
            v.items.push_back(parse_scalar(t));
        }
        return v;
    }
    return parse_scalar(s);
}

}  // namespace

std::int64_t Value::as_int() const {
    if (kind != Kind::Int) throw SchemaError("toml: expected an integer");
    return integer;
}

double Value::as_double() const {
    if (kind == Kind::Float) return real;
    if (kind == Kind::Int) return static_cast<double>(integer);
    throw SchemaError("toml: expected a number");
}

bool Value::as_bool() const {
    if (kind != Kind::Bool) throw SchemaError("toml: expected a boolean");
    return boolean;
}

const std::string& Value::as_string() const {
    if (kind != Kind::String) throw SchemaError("toml: expected a string");
    return text;
}

std::vector<std::int64_t> Value::as_int_array() const {
    if (kind != Kind::Array) throw SchemaError("toml: expected an array");
    std::vector<std::int64_t> out;
    for (const Value& v : items) out.push_back(v.as_int());
    return out;
}

std::vector<double> Value::as_double_array() const {
    if (kind != Kind::Array) throw SchemaError("toml: expected an array");
    std::vector<double> out;
    for (const Value& v : items) out.push_back(v.as_double());
    return out;
}

Table parse(const std::string& text) {
    Table table;
    std::string section;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::string s = trim(strip_comment(line));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw SchemaError("toml: malformed section header: " + s);
            section = trim(s.substr(1, s.size() - 2));
            if (section.empty()) throw SchemaError("toml: empty section name");
            continue;
        }
        const std::size_t eq = s.find('=');
        if (eq == std::string::npos) throw SchemaError("toml: expected key = value: " + s);
        const std::string key = trim(s.substr(0, eq));
        std::string value = trim(s.substr(eq + 1));
        if (key.empty()) throw SchemaError("toml: empty key");
        // Multi-line array: keep reading until brackets balance.
        if (!value.empty() && value.front() == '[') {
            long depth = 0;
            for (char c : value) depth += (c == '[') - (c == ']');
            while (depth > 0 && std::getline(in, line)) {
                const std::string more = trim(strip_comment(line));
                value += " " + more;
                for (char c : more) depth += (c == '[') - (c == ']');
            }
            if (depth != 0) throw SchemaError("toml: unterminated array for key " + key);
        }
        const std::string full_key = section.empty() ? key : section + "." + key;
        table[full_key] = parse_value(value);
    }
    return table;
}

Table parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("toml: cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse(text);
}

const Value& require(const Table& table, const std::string& key) {
    const auto it = table.find(key);
    if (it == table.end()) throw SchemaError("toml: missing key '" + key + "'");
    return it->second;
}

bool contains(const Table& table, const std::string& key) {
    return table.find(key) != table.end();
}

}  // namespace laprep::toml
