#include "dri/toml.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace dri::toml {

    const std::string& Value::as_string() const {
        if (!is_string()) throw std::runtime_error("TOML value is not a string");
        return std::get<std::string>(data);
    }

    std::int64_t Value::as_integer() const {
        if (!is_integer()) throw std::runtime_error("TOML value is not an integer");
        return std::get<std::int64_t>(data);
    }

    double Value::as_double() const {
        if (is_integer()) return static_cast<double>(std::get<std::int64_t>(data));
        if (!is_float()) throw std::runtime_error("TOML value is not a number");
        return std::get<double>(data);
    }

    bool Value::as_bool() const {
        if (!is_bool()) throw std::runtime_error("TOML value is not a boolean");
        return std::get<bool>(data);
    }

    const Array& Value::as_array() const {
        if (!is_array()) throw std::runtime_error("TOML value is not an array");
        return std::get<Array>(data);
    }

    namespace {

        struct Cursor {
            const std::string& text;
            std::size_t pos = 0;
            int line = 1;

            bool done() const { return pos >= text.size(); }
            char peek() const { return text[pos]; }
            char take() {
                const char c = text[pos++];
                if (c == '\n') ++line;
                return c;
            }

            [[noreturn]] void fail(const std::string& what) const { throw ParseError(line, what); }

            // Skips spaces and tabs (not newlines).
            void skip_blanks() {
                while (!done() && (peek() == ' ' || peek() == '\t')) take();
            }

            // Skips whitespace, newlines, and comments — used inside arrays.
            void skip_filler() {
                while (!done()) {
                    const char c = peek();
                    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
                        take();
                    } else if (c == '#') {
                        while (!done() && peek() != '\n') take();
                    } else {
                        break;
                    }
                }
            }
        };

        std::string parse_basic_string(Cursor& in) {
            in.take();  // opening quote
            std::string out;
            while (true) {
                if (in.done()) in.fail("unterminated string");
                const char c = in.take();
                if (c == '"') return out;
                if (c == '\n') in.fail("newline inside a string");
                if (c == '\\') {
                    if (in.done()) in.fail("dangling escape");
                    const char e = in.take();
                    switch (e) {
                        case '"': out += '"'; break;
                        case '\\': out += '\\'; break;
                        case 'n': out += '\n'; break;
                        case 't': out += '\t'; break;
                        case 'r': out += '\r'; break;
                        default: in.fail(std::string("unsupported escape \\") + e);
                    }
                } else {
                    out += c;
                }
            }
        }

        Value parse_scalar_token(Cursor& in) {
            std::string token;
            while (!in.done()) {
                const char c = in.peek();
                if (c == ',' || c == ']' || c == '#' || c == '\n' || c == '\r' || c == ' ' || c == '\t') break;
                token += in.take();
            }
            if (token.empty()) in.fail("expected a value");
            if (token == "true") return Value(true);
            if (token == "false") return Value(false);

            // Numbers: TOML allows underscores as separators.
            std::string digits;
            for (char c : token)
                if (c != '_') digits += c;
            const bool looks_float = digits.find_first_of(".eE") != std::string::npos &&
                                     digits.find_first_of("0123456789") != std::string::npos;
            char* end = nullptr;
            if (!looks_float) {
                const long long v = std::strtoll(digits.c_str(), &end, 10);
                if (end && *end == '\0') return Value(static_cast<std::int64_t>(v));
            }
            const double d = std::strtod(digits.c_str(), &end);
            if (end && *end == '\0') return Value(d);
            in.fail("cannot parse value '" + token + "'");
        }

        Value parse_value(Cursor& in);

        Value parse_array(Cursor& in) {
            in.take();  // '['
            Array items;
            while (true) {
                in.skip_filler();
                if (in.done()) in.fail("unterminated array");
                if (in.peek() == ']') {
                    in.take();
                    return Value(std::move(items));
                }
                items.push_back(parse_value(in));
                in.skip_filler();
                if (in.done()) in.fail("unterminated array");
                if (in.peek() == ',') {
                    in.take();
                } else if (in.peek() != ']') {
                    in.fail("expected ',' or ']' in array");
                }
            }
        }

        Value parse_value(Cursor& in) {
            if (in.peek() == '"') return Value(parse_basic_string(in));
            if (in.peek() == '[') return parse_array(in);
            return parse_scalar_token(in);
        }

        std::string parse_key(Cursor& in) {
            if (in.peek() == '"') return parse_basic_string(in);
            std::string key;
            while (!in.done()) {
                const char c = in.peek();
                if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-') {
                    key += in.take();
                } else {
                    break;
                }
            }
            if (key.empty()) in.fail("expected a key");
            return key;
        }

    }  // namespace

    Document parse(const std::string& text) {
        Document doc;
        Cursor in{text};
        std::string section;

        while (!in.done()) {
            in.skip_blanks();
            if (in.done()) break;
            const char c = in.peek();
            if (c == '\n' || c == '\r') {
                in.take();
                continue;
            }
            if (c == '#') {
                while (!in.done() && in.peek() != '\n') in.take();
                continue;
            }
            if (c == '[') {
                in.take();
                in.skip_blanks();
                std::string name;
                while (!in.done() && in.peek() != ']' && in.peek() != '\n') name += in.take();
                if (in.done() || in.peek() != ']') in.fail("unterminated section header");
                in.take();
                while (!name.empty() && (name.back() == ' ' || name.back() == '\t')) name.pop_back();
                if (name.empty()) in.fail("empty section name");
                section = name;
                doc.sections[section];  // sections may stay empty
                continue;
            }

            const std::string key = parse_key(in);
            in.skip_blanks();
            if (in.done() || in.peek() != '=') in.fail("expected '=' after key '" + key + "'");
            in.take();
            in.skip_blanks();
            if (in.done() || in.peek() == '\n') in.fail("missing value for key '" + key + "'");
            Value value = parse_value(in);
            in.skip_blanks();
            if (!in.done() && in.peek() == '#')
                while (!in.done() && in.peek() != '\n') in.take();
            if (!in.done() && in.peek() != '\n' && in.peek() != '\r')
                in.fail("trailing characters after value for key '" + key + "'");
            if (doc.sections[section].count(key)) in.fail("duplicate key '" + key + "'");
            doc.sections[section].emplace(key, std::move(value));
        }
        return doc;
    }

    Document parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open " + path);
        std::ostringstream buffer;
        buffer << in.rdbuf();
        return parse(buffer.str());
    }

    bool Document::has(const std::string& section, const std::string& key) const {
        const auto s = sections.find(section);
        return s != sections.end() && s->second.count(key) > 0;
    }

    const Value& Document::at(const std::string& section, const std::string& key) const {
        const auto s = sections.find(section);
        if (s == sections.end()) throw std::runtime_error("missing TOML section [" + section + "]");
        const auto k = s->second.find(key);
        if (k == s->second.end())
            throw std::runtime_error("missing TOML key '" + key + "' in section [" + section + "]");
        return k->second;
    }

    std::string Document::get_string(const std::string& section, const std::string& key,
                                     const std::string& fallback) const {
        return has(section, key) ? at(section, key).as_string() : fallback;
    }

    double Document::get_double(const std::string& section, const std::string& key, double fallback) const {
        return has(section, key) ? at(section, key).as_double() : fallback;
    }

    std::int64_t Document::get_integer(const std::string& section, const std::string& key,
                                       std::int64_t fallback) const {
        return has(section, key) ? at(section, key).as_integer() : fallback;
    }

    bool Document::get_bool(const std::string& section, const std::string& key, bool fallback) const {
        return has(section, key) ? at(section, key).as_bool() : fallback;
    }

    std::vector<std::string> Document::string_array(const std::string& section, const std::string& key) const {
        std::vector<std::string> out;
        for (const Value& v : at(section, key).as_array()) out.push_back(v.as_string());
        return out;
    }

    std::vector<double> Document::double_array(const std::string& section, const std::string& key) const {
        std::vector<double> out;
        for (const Value& v : at(section, key).as_array()) out.push_back(v.as_double());
        return out;
    }

    std::vector<std::int64_t> Document::integer_array(const std::string& section, const std::string& key) const {
        std::vector<std::int64_t> out;
        for (const Value& v : at(section, key).as_array()) out.push_back(v.as_integer());
        return out;
    }

}  // namespace dri::toml
