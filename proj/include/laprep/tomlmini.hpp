// Minimal TOML subset parser: comments, [section] tables one level deep,
// and key = value with integers, floats, booleans, quoted strings and
// single-type arrays (which may span lines). Keys from a section are
// flattened to "section.key".
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace laprep::toml {

struct Value {
    enum class Kind { Int, Float, Bool, String, Array };
    Kind kind = Kind::Int;
    std::int64_t integer = 0;
    double real = 0.0;
    bool boolean = false;
    std::string text;
    std::vector<Value> items;

    std::int64_t as_int() const;
    double as_double() const; // accepts Int too
    bool as_bool() const;
    const std::string& as_string() const;
    std::vector<std::int64_t> as_int_array() const;
    std::vector<double> as_double_array() const;
};

using Table = std::map<std::string, Value>;

Table parse(const std::string& text);
Table parse_file(const std::string& path);

const Value& require(const Table& table, const std::string& key);
bool contains(const Table& table, const std::string& key);

}  // namespace laprep::toml
