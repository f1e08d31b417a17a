#pragma once

#include <boost/dynamic_bitset.hpp>

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "quiltsign/error.hpp"

/// Cochain complexes over GF(2) for finite cell models, their mapping cones,
/// and counts of relative ℤ₂-structures.
namespace quiltsign::cohom {

using Bits = boost::dynamic_bitset<>;

/// Dense GF(2) matrix stored by rows.
struct GF2Matrix {
  std::size_t rows = 0, cols = 0;
  std::vector<Bits> data;

  GF2Matrix() = default;
  GF2Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r, Bits(c)) {}

  Bits apply(const Bits& v) const {
    Bits out(rows);
    for (std::size_t i = 0; i < rows; ++i) out[i] = (data[i] & v).count() % 2 == 1;
    return out;
  }
  GF2Matrix operator*(const GF2Matrix& o) const {
    if (cols != o.rows) throw PreconditionError("GF(2) product: shape mismatch");
    GF2Matrix p(rows, o.cols);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t k = 0; k < cols; ++k)
        if (data[i][k]) p.data[i] ^= o.data[k];
    return p;
  }
  bool is_zero() const {
    return std::all_of(data.begin(), data.end(), [](const Bits& b) { return b.none(); });
  }
};

/// Rank of a set of vectors of equal length.
inline std::size_t span_rank(std::vector<Bits> vs) {
  std::size_t r = 0;
  if (vs.empty()) return 0;
  const std::size_t n = vs.front().size();
  for (std::size_t c = 0; c < n && r < vs.size(); ++c) {
    std::size_t p = r;
    while (p < vs.size() && !vs[p][c]) ++p;
    if (p == vs.size()) continue;
    std::swap(vs[p], vs[r]);
    for (std::size_t i = 0; i < vs.size(); ++i)
      if (i != r && vs[i][c]) vs[i] ^= vs[r];
    ++r;
  }
  return r;
}

inline std::size_t rank(const GF2Matrix& m) { return span_rank(m.data); }

/// Basis of {v : m v = 0}.
inline std::vector<Bits> kernel(const GF2Matrix& m) {
  std::vector<Bits> rows = m.data;
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols && r < rows.size(); ++c) {
    std::size_t p = r;
    while (p < rows.size() && !rows[p][c]) ++p;
    if (p == rows.size()) continue;
    std::swap(rows[p], rows[r]);
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (i != r && rows[i][c]) rows[i] ^= rows[r];
    pivots.push_back(c);
    ++r;
  }
  std::vector<Bits> basis;
  for (std::size_t f = 0; f < m.cols; ++f) {
    if (std::find(pivots.begin(), pivots.end(), f) != pivots.end()) continue;
    Bits v(m.cols);
    v[f] = true;
    for (std::size_t i = 0; i < pivots.size(); ++i)
      if (rows[i][f]) v[pivots[i]] = true;
    basis.push_back(std::move(v));
  }
  return basis;
}

/// Columns of a matrix as vectors.
inline std::vector<Bits> columns(const GF2Matrix& m) {
  std::vector<Bits> out(m.cols, Bits(m.rows));
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) out[j][i] = m.data[i][j];
  return out;
}

struct Cell {
  std::string id;
  int dim = 0;
  std::vector<std::string> faces;  // with multiplicity; counted mod 2
  bool operator==(const Cell&) const = default;
};

/// Finite cell model with mod-2 incidences; δ^k : C^k → C^{k+1}.
class GF2Complex {
 public:
  GF2Complex() = default;
  explicit GF2Complex(std::vector<Cell> cells) : cells_(std::move(cells)) {
    for (std::size_t i = 0; i < cells_.size(); ++i) {
      const auto& c = cells_[i];
      if (c.dim < 0) throw ValidationError("ill-formed incidence: cell '" + c.id + "' has negative dimension");
      if (!index_.emplace(c.id, i).second) throw ValidationError("duplicate cell id '" + c.id + "'");
      if (static_cast<std::size_t>(c.dim) >= by_dim_.size()) by_dim_.resize(static_cast<std::size_t>(c.dim) + 1);
      pos_.push_back(by_dim_[static_cast<std::size_t>(c.dim)].size());
      by_dim_[static_cast<std::size_t>(c.dim)].push_back(i);
    }
    for (int k = 0; k + 1 <= top(); ++k) {
      GF2Matrix d(count(k + 1), count(k));
      for (auto ci : by_dim_[static_cast<std::size_t>(k + 1)]) {
        for (const auto& f : cells_[ci].faces) {
          auto it = index_.find(f);
          if (it == index_.end())
            throw ValidationError("ill-formed incidence: unknown face '" + f + "' of '" + cells_[ci].id + "'");
          if (cells_[it->second].dim != k)
            throw ValidationError("ill-formed incidence: face '" + f + "' of '" + cells_[ci].id + "' has the wrong dimension");
          d.data[pos_[ci]].flip(pos_[it->second]);
        }
      }
      delta_.push_back(std::move(d));
    }
    if (!cells_.empty())
      for (auto ci : by_dim_[0])
        if (!cells_[ci].faces.empty()) throw ValidationError("ill-formed incidence: vertex '" + cells_[ci].id + "' has faces");
    for (int k = 0; k + 2 <= top(); ++k)
      if (!(delta(k + 1) * delta(k)).is_zero())
        throw ValidationError("ill-formed incidence: delta^2 != 0 from dimension " + std::to_string(k));
  }

  const std::vector<Cell>& cells() const { return cells_; }
  int top() const { return static_cast<int>(by_dim_.size()) - 1; }
  std::size_t count(int k) const {
    return k < 0 || k > top() ? 0 : by_dim_[static_cast<std::size_t>(k)].size();
  }
  std::size_t size() const { return cells_.size(); }

  /// Cells of dimension k in coordinate order.
  std::vector<std::string> basis(int k) const {
    std::vector<std::string> out;
    if (k < 0 || k > top()) return out;
    for (auto i : by_dim_[static_cast<std::size_t>(k)]) out.push_back(cells_[i].id);
    return out;
  }
  bool has(const std::string& id) const { return index_.count(id) > 0; }
  const Cell& cell(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw ValidationError("unknown cell '" + id + "'");
    return cells_[it->second];
  }
  std::size_t position(const std::string& id) const { return pos_[index_.at(id)]; }

  /// δ^k; a zero matrix of the right shape outside the range.
  GF2Matrix delta(int k) const {
    if (k >= 0 && k < static_cast<int>(delta_.size())) return delta_[static_cast<std::size_t>(k)];
    return GF2Matrix(count(k + 1), count(k));
  }

 private:
  std::vector<Cell> cells_;
  std::map<std::string, std::size_t> index_;
  std::vector<std::vector<std::size_t>> by_dim_;
  std::vector<std::size_t> pos_;
  std::vector<GF2Matrix> delta_;
};

inline std::int64_t cohomology_dim(const GF2Complex& c, int k) {
  if (k < 0) return 0;
  return static_cast<std::int64_t>(c.count(k) - rank(c.delta(k)) - rank(c.delta(k - 1)));
}

/// Source M, target N and a cellular map f : M → N given cell by cell; a cell
/// sent to a cell of lower dimension (or to "") is collapsed and pulls back
/// to zero. Cone^k = C^k(M) × C^{k+1}(N) for k ≥ −1, D(a, b) = (δa + ψ*b, δb).
class ConeComplex {
 public:
  ConeComplex() = default;
  ConeComplex(GF2Complex source, GF2Complex target, std::map<std::string, std::string> cell_map)
      : source_(std::move(source)), target_(std::move(target)), map_(std::move(cell_map)) {
    for (const auto& [s, t] : map_) {
      if (!source_.has(s)) throw ValidationError("cell map names unknown source cell '" + s + "'");
      if (!t.empty() && !target_.has(t)) throw ValidationError("cell map names unknown target cell '" + t + "'");
    }
    for (const auto& c : source_.cells())
      if (!map_.count(c.id)) throw ValidationError("cell map has no image for source cell '" + c.id + "'");
    const int top = std::max(source_.top(), target_.top());
    for (int k = 0; k <= top; ++k)
      if (!equal(source_.delta(k) * pullback(k), pullback(k + 1) * target_.delta(k)))
        throw ValidationError("non-chain map: pullback does not commute with delta in degree " + std::to_string(k));
  }

  const GF2Complex& source() const { return source_; }
  const GF2Complex& target() const { return target_; }
  const std::map<std::string, std::string>& cell_map() const { return map_; }

  /// ψ* : C^k(N) → C^k(M).
  GF2Matrix pullback(int k) const {
    GF2Matrix p(source_.count(k), target_.count(k));
    for (const auto& s : source_.basis(k)) {
      const auto& t = map_.at(s);
      if (t.empty() || target_.cell(t).dim != k) continue;
      p.data[source_.position(s)][target_.position(t)] = true;
    }
    return p;
  }

  std::size_t dim(int k) const { return source_.count(k) + target_.count(k + 1); }

  /// D^k : Cone^k → Cone^{k+1}, coordinates (a, b).
  GF2Matrix differential(int k) const {
    const auto ma = source_.count(k), nb = target_.count(k + 1);
    const auto ma1 = source_.count(k + 1), nb1 = target_.count(k + 2);
    GF2Matrix d(ma1 + nb1, ma + nb);
    const auto da = source_.delta(k), psi = pullback(k + 1), db = target_.delta(k + 1);
    for (std::size_t i = 0; i < ma1; ++i) {
      for (std::size_t j = 0; j < ma; ++j) d.data[i][j] = da.data[i][j];
      for (std::size_t j = 0; j < nb; ++j) d.data[i][ma + j] = psi.data[i][j];
    }
    for (std::size_t i = 0; i < nb1; ++i)
      for (std::size_t j = 0; j < nb; ++j) d.data[ma1 + i][ma + j] = db.data[i][j];
    return d;
  }

 private:
  static bool equal(const GF2Matrix& a, const GF2Matrix& b) { return a.rows == b.rows && a.cols == b.cols && a.data == b.data; }

  GF2Complex source_, target_;
  std::map<std::string, std::string> map_;
};

inline std::int64_t cone_cohomology(const ConeComplex& cc, int k) {
  if (k < -1) return 0;
  return static_cast<std::int64_t>(cc.dim(k) - rank(cc.differential(k)) - rank(cc.differential(k - 1)));
}

/// Top cone degree with cochains.
inline int cone_top(const ConeComplex& cc) { return std::max(cc.source().top(), cc.target().top() - 1); }

/// A 2-cochain on the source given by the cells where it is 1.
inline Bits source_cochain(const ConeComplex& cc, const std::vector<std::string>& cells, int k = 2) {
  Bits v(cc.source().count(k));
  for (const auto& id : cells) {
    const auto& c = cc.source().cell(id);
    if (c.dim != k) throw ValidationError("class cell '" + id + "' is not of dimension " + std::to_string(k));
    v.flip(cc.source().position(id));
  }
  return v;
}

/// The relative structures on w exist iff (w, 0) ∈ Cone² is a coboundary,
/// i.e. w = δa + ψ*b with δb = 0.
inline bool obstruction_vanishes(const ConeComplex& cc, const std::vector<std::string>& w2_cells) {
  const auto w = source_cochain(cc, w2_cells);
  if (cc.source().delta(2).apply(w).any()) throw PreconditionError("obstruction class is not a cocycle");
  Bits target(cc.dim(2));
  for (std::size_t i = 0; i < w.size(); ++i) target[i] = w[i];
  auto image = columns(cc.differential(1));
  const auto r = span_rank(image);
  image.push_back(target);
  return span_rank(image) == r;
}

inline std::int64_t count_relative_spin(const ConeComplex& cc, const std::vector<std::string>& w2_cells) {
  if (!obstruction_vanishes(cc, w2_cells)) return 0;
  const auto h1 = cone_cohomology(cc, 1);
  if (h1 >= 62) throw PreconditionError("relative structure count overflows");
  return std::int64_t{1} << h1;
}

/// Rank of the map H(V) → H(W) induced by f, given cocycles of V and
/// coboundaries of W.
inline std::size_t induced_rank(const GF2Matrix& f, const std::vector<Bits>& cocycles_v, const std::vector<Bits>& coboundaries_w) {
  std::vector<Bits> vs = coboundaries_w;
  const auto base = span_rank(vs);
  for (const auto& z : cocycles_v) vs.push_back(f.apply(z));
  return span_rank(vs) - base;
}

struct ExactnessReport {
  bool exact = true;
  std::string failure;  // first term where rank-exactness fails
};

/// Rank-exactness of … → H^k(M) → H^k(Cone) → H^{k+1}(N) → H^{k+1}(M) → …
/// at every term, starting from H^{−1}(Cone).
inline ExactnessReport les_exactness_check(const ConeComplex& cc) {
  const auto& M = cc.source();
  const auto& N = cc.target();
  const int top = cone_top(cc) + 1;

  struct Term {
    std::string name;
    std::size_t dim;
    std::vector<Bits> cocycles, coboundaries;
  };
  auto term_m = [&](int k) {
    return Term{"H^" + std::to_string(k) + "(M)", M.count(k), kernel(M.delta(k)), columns(M.delta(k - 1))};
  };
  auto term_c = [&](int k) {
    return Term{"H^" + std::to_string(k) + "(cone)", cc.dim(k), kernel(cc.differential(k)), columns(cc.differential(k - 1))};
  };
  auto term_n = [&](int k) {
    return Term{"H^" + std::to_string(k) + "(N)", N.count(k), kernel(N.delta(k)), columns(N.delta(k - 1))};
  };
  // maps between coordinates
  auto include = [&](int k) {  // C^k(M) → Cone^k
    GF2Matrix m(cc.dim(k), M.count(k));
    for (std::size_t i = 0; i < M.count(k); ++i) m.data[i][i] = true;
    return m;
  };
  auto project = [&](int k) {  // Cone^k → C^{k+1}(N)
    GF2Matrix m(N.count(k + 1), cc.dim(k));
    for (std::size_t i = 0; i < N.count(k + 1); ++i) m.data[i][M.count(k) + i] = true;
    return m;
  };

  std::vector<Term> terms;
  std::vector<GF2Matrix> maps;  // maps[i] : terms[i] → terms[i+1]
  terms.push_back(term_c(-1));
  maps.push_back(project(-1));
  for (int k = 0; k <= top; ++k) {
    terms.push_back(term_n(k));
    maps.push_back(cc.pullback(k));
    terms.push_back(term_m(k));
    maps.push_back(include(k));
    terms.push_back(term_c(k));
    maps.push_back(project(k));
  }
  maps.pop_back();
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const auto& t = terms[i];
    const auto h = t.cocycles.size() - span_rank(t.coboundaries);
    const std::size_t in = i == 0 ? 0 : induced_rank(maps[i - 1], terms[i - 1].cocycles, t.coboundaries);
    const std::size_t out = i + 1 < terms.size() ? induced_rank(maps[i], t.cocycles, terms[i + 1].coboundaries) : 0;
    if (in + out != h)
      return {false, t.name + ": dim " + std::to_string(h) + ", incoming rank " + std::to_string(in) +
                         ", outgoing rank " + std::to_string(out)};
  }
  return {};
}

}  // namespace quiltsign::cohom
