#pragma once

// Dense functions on V_e = Z_N^{|e|} plus small edge/odometer helpers shared
// by the weight-system, box-norm and regularity modules. Local coordinates of
// an edge follow the ascending order of its vertex ids.

#include <functional>
#include <vector>

#include "constell/common.hpp"

namespace constell {

inline std::vector<int> edge_coords(u32 mask) {
    std::vector<int> ids;
    for (int i = 0; i < 32; ++i)
        if (mask & (u32(1) << i)) ids.push_back(i);
    return ids;
}

inline int edge_size(u32 mask) { return __builtin_popcount(mask); }

// Calls fn(pt) for every pt in [0,n)^arity, little-endian odometer order.
template <typename Fn>
void for_each_point(i64 n, int arity, Fn&& fn) {
    std::vector<i64> pt(arity, 0);
    if (arity == 0) {
        fn(pt);
        return;
    }
    for (;;) {
        fn(pt);
        int pos = 0;
        while (pos < arity) {
            if (++pt[pos] < n) break;
            pt[pos++] = 0;
        }
        if (pos == arity) return;
    }
}

class GridFn {
  public:
    GridFn() = default;
    GridFn(i64 n, int arity, double fill = 0.0)
        : n_(n), arity_(arity), v_(static_cast<size_t>(total(n, arity)), fill) {}

    static GridFn from_fn(i64 n, int arity, const std::function<double(const std::vector<i64>&)>& f) {
        GridFn g(n, arity);
        for_each_point(n, arity, [&](const std::vector<i64>& pt) { g.v_[g.index(pt)] = f(pt); });
        return g;
    }

    i64 n() const { return n_; }
    int arity() const { return arity_; }
    size_t size() const { return v_.size(); }

    size_t index(const std::vector<i64>& pt) const {
        size_t idx = 0, stride = 1;
        for (int i = 0; i < arity_; ++i) {
            idx += static_cast<size_t>(pt[i]) * stride;
            stride *= static_cast<size_t>(n_);
        }
        return idx;
    }

    double at(const std::vector<i64>& pt) const { return v_[index(pt)]; }
    double at_index(size_t idx) const { return v_[idx]; }
    void set(const std::vector<i64>& pt, double val) { v_[index(pt)] = val; }
    void set_index(size_t idx, double val) { v_[idx] = val; }

    std::vector<double>& data() { return v_; }
    const std::vector<double>& data() const { return v_; }

  private:
    static u64 total(i64 n, int arity) {
        u64 t = 1;
        for (int i = 0; i < arity; ++i) {
            if (t > (u64(1) << 40))
                throw std::invalid_argument("grid function too large to tabulate");
            t *= static_cast<u64>(n);
        }
        return t;
    }

    i64 n_ = 0;
    int arity_ = 0;
    std::vector<double> v_;
};

}  // namespace constell
