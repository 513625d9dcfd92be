#pragma once

// Minimal CSV emission with RFC-4180 quoting and shortest-round-trip numeric
// formatting, so identical configurations always serialize byte-identically.

#include <charconv>
#include <string>
#include <vector>

#include "constell/common.hpp"

namespace constell {

// Shortest decimal string that round-trips the double (to_chars), locale-free.
inline std::string fmt_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string csv_field(const std::string& s) {
    bool needs_quote = s.find_first_of(",\"\r\n") != std::string::npos;
    if (!needs_quote) return s;
    std::string out;
    out.reserve(s.size() + 2);
    out.push_back('"');
    for (char c : s) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

class CsvTable {
  public:
    explicit CsvTable(std::vector<std::string> header) { row(std::move(header)); }

    void row(std::vector<std::string> cells) {
        for (size_t i = 0; i < cells.size(); ++i) {
            if (i) buf_.push_back(',');
            buf_ += csv_field(cells[i]);
        }
        buf_.push_back('\n');
    }

    const std::string& str() const { return buf_; }

  private:
    std::string buf_;
};

}  // namespace constell
