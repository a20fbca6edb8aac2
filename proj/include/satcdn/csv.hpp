#pragma once

// Minimal CSV reading/writing: comma separated, no quoting, '#' comments.

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <type_traits>
#include <vector>

namespace satcdn::csv {

struct ParseError : std::runtime_error {
    ParseError(const std::string& file, std::size_t line, const std::string& what)
        : std::runtime_error(file + ":" + std::to_string(line) + ": " + what), line_number(line) {}
    std::size_t line_number;
};

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string> split(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        out.emplace_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

struct Row {
    std::size_t line = 0;
    std::vector<std::string> fields;
};

// Reads every non-blank, non-comment line. When `header` is non-empty the first
// such line must match it exactly.
inline std::vector<Row> read(const std::string& path, const std::vector<std::string>& header) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::vector<Row> rows;
    std::string line;
    std::size_t lineno = 0;
    bool header_seen = header.empty();
    while (std::getline(in, line)) {
        ++lineno;
        const std::string_view t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        auto fields = split(t);
        if (!header_seen) {
            if (fields != header) {
                std::string expect;
                for (std::size_t i = 0; i < header.size(); ++i) expect += (i ? "," : "") + header[i];
                throw ParseError(path, lineno, "expected header '" + expect + "'");
            }
            header_seen = true;
            continue;
        }
        if (!header.empty() && fields.size() != header.size()) {
            throw ParseError(path, lineno, "expected " + std::to_string(header.size()) + " fields, got " +
                                               std::to_string(fields.size()));
        }
        rows.push_back({lineno, std::move(fields)});
    }
    return rows;
}

inline double to_double(const std::string& s, const std::string& file, std::size_t line) {
    double v = 0.0;
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || ptr != end || s.empty()) throw ParseError(file, line, "not a number: '" + s + "'");
    return v;
}

inline long long to_int(const std::string& s, const std::string& file, std::size_t line) {
    long long v = 0;
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || ptr != end || s.empty()) throw ParseError(file, line, "not an integer: '" + s + "'");
    return v;
}

// Shortest round-trip representation; stable across runs.
inline std::string fmt(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

class Writer {
public:
    explicit Writer(const std::string& path) : out_(path) {
        if (!out_) throw std::runtime_error("cannot write '" + path + "'");
    }

    template <typename... Ts>
    void row(const Ts&... fields) {
        bool first = true;
        ((out_ << (first ? "" : ",") << cell(fields), first = false), ...);
        out_ << '\n';
    }

private:
    static std::string cell(const std::string& s) { return s; }
    static std::string cell(const char* s) { return s; }
    static std::string cell(double v) { return fmt(v); }
    template <typename I>
        requires std::is_integral_v<I>
    static std::string cell(I v) { return std::to_string(v); }

    std::ofstream out_;
};

}  // namespace satcdn::csv
