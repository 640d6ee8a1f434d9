#pragma once

#include <algorithm>
#include <cassert>
#include <vector>

#include "e7forge/scalar.hpp"

namespace e7forge {

/// Sparse vector: (index, value) pairs, strictly increasing indices, no zeros.
template <class K>
using SparseVec = std::vector<std::pair<int, K>>;

template <class K>
inline K sv_get(const SparseVec<K>& v, int i) {
  auto it = std::lower_bound(v.begin(), v.end(), i,
                             [](const auto& e, int idx) { return e.first < idx; });
  if (it != v.end() && it->first == i) return it->second;
  return K(0);
}

template <class K>
inline void sv_set(SparseVec<K>& v, int i, const K& val) {
  auto it = std::lower_bound(v.begin(), v.end(), i,
                             [](const auto& e, int idx) { return e.first < idx; });
  if (it != v.end() && it->first == i) {
    if (val.is_zero())
      v.erase(it);
    else
      it->second = val;
  } else if (!val.is_zero()) {
    v.insert(it, {i, val});
  }
}

/// r = a + c*b  (merge; c may be zero)
template <class K>
inline SparseVec<K> sv_axpy(const SparseVec<K>& a, const K& c, const SparseVec<K>& b) {
  if (c.is_zero()) return a;
  SparseVec<K> r;
  r.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j >= b.size() || (i < a.size() && a[i].first < b[j].first)) {
      r.push_back(a[i++]);
    } else if (i >= a.size() || b[j].first < a[i].first) {
      K v = c * b[j].second;
      if (!v.is_zero()) r.push_back({b[j].first, std::move(v)});
      ++j;
    } else {
      K v = a[i].second + c * b[j].second;
      if (!v.is_zero()) r.push_back({a[i].first, std::move(v)});
      ++i;
      ++j;
    }
  }
  return r;
}

template <class K>
inline SparseVec<K> sv_add(const SparseVec<K>& a, const SparseVec<K>& b) {
  return sv_axpy(a, K(1), b);
}

template <class K>
inline SparseVec<K> sv_sub(const SparseVec<K>& a, const SparseVec<K>& b) {
  return sv_axpy(a, K(-1), b);
}

template <class K>
inline void sv_scale(SparseVec<K>& v, const K& c) {
  if (c.is_zero()) {
    v.clear();
    return;
  }
  for (auto& e : v) e.second = e.second * c;
}

template <class K>
inline SparseVec<K> sv_scaled(SparseVec<K> v, const K& c) {
  sv_scale(v, c);
  return v;
}

template <class K>
inline SparseVec<K> sv_neg(SparseVec<K> v) {
  for (auto& e : v) e.second = -e.second;
  return v;
}

template <class K>
inline bool sv_is_zero(const SparseVec<K>& v) { return v.empty(); }

template <class K>
inline SparseVec<K> sv_unit(int i, K v = K(1)) {
  return SparseVec<K>{{i, std::move(v)}};
}

/// Collect unsorted (index, value) terms into a canonical sparse vector.
template <class K>
inline SparseVec<K> sv_collect(std::vector<std::pair<int, K>> terms) {
  std::sort(terms.begin(), terms.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  SparseVec<K> r;
  for (auto& t : terms) {
    if (!r.empty() && r.back().first == t.first) {
      r.back().second = r.back().second + t.second;
      if (r.back().second.is_zero()) r.pop_back();
    } else if (!t.second.is_zero()) {
      r.push_back(std::move(t));
    }
  }
  return r;
}

template <class K>
inline std::vector<K> sv_dense(const SparseVec<K>& v, int n) {
  std::vector<K> d(static_cast<std::size_t>(n), K(0));
  for (const auto& [i, val] : v) d[static_cast<std::size_t>(i)] = val;
  return d;
}

template <class K>
inline SparseVec<K> sv_from_dense(const std::vector<K>& d) {
  SparseVec<K> v;
  for (int i = 0; i < static_cast<int>(d.size()); ++i)
    if (!d[static_cast<std::size_t>(i)].is_zero()) v.push_back({i, d[static_cast<std::size_t>(i)]});
  return v;
}

/// Sparse matrix, row major.
template <class K>
struct SparseMat {
  int rows = 0, cols = 0;
  std::vector<SparseVec<K>> row;

  SparseMat() = default;
  SparseMat(int r, int c) : rows(r), cols(c), row(static_cast<std::size_t>(r)) {}

  K at(int r, int c) const { return sv_get(row[static_cast<std::size_t>(r)], c); }
  void set(int r, int c, const K& v) { sv_set(row[static_cast<std::size_t>(r)], c, v); }

  static SparseMat identity(int n) {
    SparseMat m(n, n);
    for (int i = 0; i < n; ++i) m.row[static_cast<std::size_t>(i)] = sv_unit(i, K(1));
    return m;
  }

  static SparseMat zero(int r, int c) { return SparseMat(r, c); }

  std::size_t nnz() const {
    std::size_t n = 0;
    for (const auto& r : row) n += r.size();
    return n;
  }

  friend bool operator==(const SparseMat& a, const SparseMat& b) {
    return a.rows == b.rows && a.cols == b.cols && a.row == b.row;
  }
};

template <class K>
inline SparseVec<K> sm_apply(const SparseMat<K>& m, const SparseVec<K>& v) {
  // (m v)_r = sum_c m[r][c] v_c; iterate v and accumulate columns of m^T —
  // cheaper via transpose-free: sum over v entries of column... we store rows,
  // so do: result = sum_{(c,val) in v} val * col_c(m). Without a column index,
  // fall back to row-oriented dot products when v is dense-ish.
  std::vector<std::pair<int, K>> terms;
  for (int r = 0; r < m.rows; ++r) {
    const auto& mr = m.row[static_cast<std::size_t>(r)];
    if (mr.empty()) continue;
    K acc(0);
    std::size_t i = 0, j = 0;
    while (i < mr.size() && j < v.size()) {
      if (mr[i].first < v[j].first)
        ++i;
      else if (v[j].first < mr[i].first)
        ++j;
      else {
        acc = acc + mr[i].second * v[j].second;
        ++i;
        ++j;
      }
    }
    if (!acc.is_zero()) terms.push_back({r, std::move(acc)});
  }
  return sv_collect(std::move(terms));
}

template <class K>
inline SparseMat<K> sm_add(const SparseMat<K>& a, const SparseMat<K>& b) {
  assert(a.rows == b.rows && a.cols == b.cols);
  SparseMat<K> r(a.rows, a.cols);
  for (int i = 0; i < a.rows; ++i)
    r.row[static_cast<std::size_t>(i)] =
        sv_add(a.row[static_cast<std::size_t>(i)], b.row[static_cast<std::size_t>(i)]);
  return r;
}

template <class K>
inline SparseMat<K> sm_scale(SparseMat<K> a, const K& c) {
  for (auto& r : a.row) sv_scale(r, c);
  return a;
}

template <class K>
inline SparseMat<K> sm_mul(const SparseMat<K>& a, const SparseMat<K>& b) {
  assert(a.cols == b.rows);
  SparseMat<K> r(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i) {
    SparseVec<K> acc;
    for (const auto& [k, av] : a.row[static_cast<std::size_t>(i)])
      acc = sv_axpy(acc, av, b.row[static_cast<std::size_t>(k)]);
    r.row[static_cast<std::size_t>(i)] = std::move(acc);
  }
  return r;
}

template <class K>
inline SparseMat<K> sm_sub(const SparseMat<K>& a, const SparseMat<K>& b) {
  return sm_add(a, sm_scale(b, K(-1)));
}

/// [a, b] = ab - ba
template <class K>
inline SparseMat<K> sm_commutator(const SparseMat<K>& a, const SparseMat<K>& b) {
  return sm_sub(sm_mul(a, b), sm_mul(b, a));
}

template <class K>
inline SparseMat<K> sm_transpose(const SparseMat<K>& a) {
  SparseMat<K> r(a.cols, a.rows);
  for (int i = 0; i < a.rows; ++i)
    for (const auto& [j, v] : a.row[static_cast<std::size_t>(i)])
      r.row[static_cast<std::size_t>(j)].push_back({i, v});
  return r;
}

/// Kronecker product: (a ⊗ b)[(i p + k), (j q + l)] = a[i][j] b[k][l].
template <class K>
inline SparseMat<K> sm_kron(const SparseMat<K>& a, const SparseMat<K>& b) {
  SparseMat<K> r(a.rows * b.rows, a.cols * b.cols);
  for (int i = 0; i < a.rows; ++i) {
    for (const auto& [j, av] : a.row[static_cast<std::size_t>(i)]) {
      for (int k = 0; k < b.rows; ++k) {
        for (const auto& [l, bv] : b.row[static_cast<std::size_t>(k)]) {
          K v = av * bv;
          if (!v.is_zero()) r.row[static_cast<std::size_t>(i * b.rows + k)].push_back({j * b.cols + l, std::move(v)});
        }
      }
    }
  }
  for (auto& rr : r.row)
    std::sort(rr.begin(), rr.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  return r;
}

template <class K>
inline bool sm_is_zero(const SparseMat<K>& a) {
  for (const auto& r : a.row)
    if (!r.empty()) return false;
  return true;
}

template <class K, class K2, class Fn>
inline SparseMat<K2> sm_map(const SparseMat<K>& a, Fn&& fn) {
  SparseMat<K2> r(a.rows, a.cols);
  for (int i = 0; i < a.rows; ++i)
    for (const auto& [j, v] : a.row[static_cast<std::size_t>(i)]) {
      K2 w = fn(v);
      if (!w.is_zero()) r.row[static_cast<std::size_t>(i)].push_back({j, std::move(w)});
    }
  return r;
}

/// Flatten a matrix into a row-major vector of length rows*cols.
template <class K>
inline SparseVec<K> sm_vec(const SparseMat<K>& a) {
  SparseVec<K> v;
  for (int i = 0; i < a.rows; ++i)
    for (const auto& [j, val] : a.row[static_cast<std::size_t>(i)]) v.push_back({i * a.cols + j, val});
  return v;
}

template <class K>
inline SparseMat<K> sm_unvec(const SparseVec<K>& v, int rows, int cols) {
  SparseMat<K> a(rows, cols);
  for (const auto& [idx, val] : v) a.row[static_cast<std::size_t>(idx / cols)].push_back({idx % cols, val});
  return a;
}

}  // namespace e7forge
