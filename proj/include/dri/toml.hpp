#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

// Minimal TOML reader covering what experiment grids need: [section]
// headers, `key = value` pairs, strings, integers, floats, booleans,
// single- or multi-line arrays of scalars, and # comments. Nested tables,
// dotted keys, dates, and inline tables are not supported.
namespace dri::toml {

    class Value;

    using Array = std::vector<Value>;

    class Value {
    public:
        Value() : data(std::int64_t{0}) {}
        explicit Value(std::string v) : data(std::move(v)) {}
        explicit Value(std::int64_t v) : data(v) {}
        explicit Value(double v) : data(v) {}
        explicit Value(bool v) : data(v) {}
        explicit Value(Array v) : data(std::move(v)) {}

        bool is_string() const { return std::holds_alternative<std::string>(data); }
        bool is_integer() const { return std::holds_alternative<std::int64_t>(data); }
        bool is_float() const { return std::holds_alternative<double>(data); }
        bool is_bool() const { return std::holds_alternative<bool>(data); }
        bool is_array() const { return std::holds_alternative<Array>(data); }

        const std::string& as_string() const;
        std::int64_t as_integer() const;
        double as_double() const;  // accepts integers too
        bool as_bool() const;
        const Array& as_array() const;

    private:
        std::variant<std::string, std::int64_t, double, bool, Array> data;
    };

    struct ParseError : std::runtime_error {
        int line;
        ParseError(int line_, const std::string& what) : std::runtime_error(what), line(line_) {}
    };

    // Parsed document: sections of key/value pairs. Keys before any section
    // header land in the "" section.
    class Document {
    public:
        bool has(const std::string& section, const std::string& key) const;
        const Value& at(const std::string& section, const std::string& key) const;

        std::string get_string(const std::string& section, const std::string& key,
                               const std::string& fallback) const;
        double get_double(const std::string& section, const std::string& key, double fallback) const;
        std::int64_t get_integer(const std::string& section, const std::string& key,
                                 std::int64_t fallback) const;
        bool get_bool(const std::string& section, const std::string& key, bool fallback) const;

        std::vector<std::string> string_array(const std::string& section, const std::string& key) const;
        std::vector<double> double_array(const std::string& section, const std::string& key) const;
        std::vector<std::int64_t> integer_array(const std::string& section, const std::string& key) const;

        std::map<std::string, std::map<std::string, Value>> sections;
    };

    Document parse(const std::string& text);
    Document parse_file(const std::string& path);

}  // namespace dri::toml
