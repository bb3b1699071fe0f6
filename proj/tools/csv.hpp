#pragma once

#include <charconv>
#include <fstream>
#include <string>
#include <vector>

#include "ramsey/errors.hpp"

namespace ramsey::cli {

// Shortest round-trip decimal form, so reruns are byte-identical and the
// value parses back exactly.
inline std::string num(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string num(long v) { return std::to_string(v); }

// RFC 4180 quoting: a field is quoted only when it contains a comma, a
// double quote, or a line break; embedded quotes are doubled.
inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

class CsvWriter {
  public:
    // header_json: compact JSON describing the resolved configuration and
    // seed; written as a single '#'-prefixed line before the column header.
    CsvWriter(const std::string& path, const std::string& header_json,
              const std::vector<std::string>& columns)
        : out_(path, std::ios::binary), n_cols_(columns.size()) {
        if (!out_)
            throw config_error("cannot open output file: " + path);
        out_ << "# resolved-config: " << header_json << "\n";
        row(columns);
    }

    void row(const std::vector<std::string>& fields) {
        if (fields.size() != n_cols_)
            throw config_error("csv row width mismatch");
        for (size_t i = 0; i < fields.size(); ++i) {
            if (i) out_ << ',';
            out_ << csv_field(fields[i]);
        }
        out_ << "\n";
    }

  private:
    std::ofstream out_;
    size_t n_cols_;
};

} // namespace ramsey::cli
