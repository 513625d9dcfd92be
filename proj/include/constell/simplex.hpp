#pragma once

// Integer simplices Delta = {v_0, ..., v_d} in Z^d: validation (exact integer
// nondegeneracy test), the per-axis projection count l(Delta), and text
// parsing shared by CLI and tests.

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "constell/common.hpp"

namespace constell {

// Exact determinant via fraction-free (Bareiss) elimination.
inline i128 det_bareiss(std::vector<std::vector<i128>> m) {
    const int n = static_cast<int>(m.size());
    i128 prev = 1;
    int sign = 1;
    for (int k = 0; k < n - 1; ++k) {
        if (m[k][k] == 0) {
            int piv = -1;
            for (int i = k + 1; i < n; ++i)
                if (m[i][k] != 0) {
                    piv = i;
                    break;
                }
            if (piv < 0) return 0;
            std::swap(m[k], m[piv]);
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i)
            for (int j = k + 1; j < n; ++j)
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
        prev = m[k][k];
    }
    return sign * m[n - 1][n - 1];
}

struct Simplex {
    int dim = 0;                          // d
    std::vector<std::vector<i64>> verts;  // d+1 vertices of dim coordinates
};

// Determinant of the difference matrix {v_i - v_0}, exact.
inline i128 simplex_det(const Simplex& s) {
    std::vector<std::vector<i128>> m(s.dim, std::vector<i128>(s.dim));
    for (int i = 1; i <= s.dim; ++i)
        for (int k = 0; k < s.dim; ++k)
            m[i - 1][k] = static_cast<i128>(s.verts[i][k]) - s.verts[0][k];
    return det_bareiss(std::move(m));
}

inline Simplex make_simplex(std::vector<std::vector<i64>> verts) {
    if (verts.size() < 2) throw std::invalid_argument("simplex needs at least 2 vertices");
    Simplex s;
    s.dim = static_cast<int>(verts.size()) - 1;
    for (const auto& v : verts)
        if (static_cast<int>(v.size()) != s.dim)
            throw std::invalid_argument("simplex in Z^d needs d+1 vertices of d coordinates");
    s.verts = std::move(verts);
    for (size_t i = 0; i < s.verts.size(); ++i)
        for (size_t j = i + 1; j < s.verts.size(); ++j)
            if (s.verts[i] == s.verts[j]) throw std::invalid_argument("repeated simplex vertex");
    if (simplex_det(s) == 0)
        throw std::invalid_argument("degenerate simplex: difference vectors are dependent");
    return s;
}

// l(Delta) = sum over axes of the number of distinct coordinate projections.
inline int l_delta(const Simplex& s) {
    int l = 0;
    for (int k = 0; k < s.dim; ++k) {
        std::set<i64> vals;
        for (const auto& v : s.verts) vals.insert(v[k]);
        l += static_cast<int>(vals.size());
    }
    return l;
}

// Conservative box-size threshold for the wrap-around dichotomy: boxes of
// size below tau*N admit the t / t-N unwrapping. Derived from the coordinate
// diameter; the verification in unwrap_copy does not rely on it.
inline double tau_threshold(const Simplex& s) {
    i64 maxdiam = 1;
    for (int k = 0; k < s.dim; ++k) {
        i64 lo = s.verts[0][k], hi = s.verts[0][k];
        for (const auto& v : s.verts) {
            lo = std::min(lo, v[k]);
            hi = std::max(hi, v[k]);
        }
        maxdiam = std::max(maxdiam, hi - lo);
    }
    return 1.0 / (2.0 * (1.0 + 2.0 * static_cast<double>(maxdiam)));
}

// Parses "0,0;1,0;0,1" into vertex rows. Whitespace is ignored.
inline std::vector<std::vector<i64>> parse_points(const std::string& text) {
    std::vector<std::vector<i64>> rows;
    std::string cleaned;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) cleaned += c;
    std::stringstream ss(cleaned);
    std::string row;
    while (std::getline(ss, row, ';')) {
        if (row.empty()) throw std::invalid_argument("empty point in '" + text + "'");
        std::vector<i64> pt;
        std::stringstream rs(row);
        std::string cell;
        while (std::getline(rs, cell, ',')) {
            size_t used = 0;
            i64 v = 0;
            try {
                v = std::stoll(cell, &used);
            } catch (const std::exception&) {
                throw std::invalid_argument("bad coordinate '" + cell + "'");
            }
            if (used != cell.size()) throw std::invalid_argument("bad coordinate '" + cell + "'");
            pt.push_back(v);
        }
        rows.push_back(std::move(pt));
    }
    if (rows.empty()) throw std::invalid_argument("no points in '" + text + "'");
    return rows;
}

inline Simplex parse_simplex(const std::string& text) { return make_simplex(parse_points(text)); }

}  // namespace constell
