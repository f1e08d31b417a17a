#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "quiltsign/error.hpp"
#include "quiltsign/linalg.hpp"
#include "quiltsign/orient.hpp"
#include "quiltsign/sign.hpp"

/// Graded chain complexes over ℤ assembled from signed trajectory counts.
namespace quiltsign::floer {

struct Generator {
  std::string id;
  std::int64_t degree = 0;
  std::optional<std::int64_t> lift;  // ℤ-lift of the degree for the q-graded theory
  bool operator==(const Generator&) const = default;
};

struct Trajectory {
  std::string from;  // x₋
  std::string to;    // x₊
  int sign = 1;
  bool operator==(const Trajectory&) const = default;
};

/// `boundary(i, j)` is the coefficient of generator i in ∂(generator j).
struct IntComplex {
  std::vector<Generator> generators;
  std::int64_t N = 0;  // 0: ℤ-graded
  ZMatrix boundary;

  std::size_t size() const { return generators.size(); }
  bool operator==(const IntComplex&) const = default;
};

/// Degree reduced into [0, N) when N > 0.
inline std::int64_t reduce(std::int64_t d, std::int64_t N) {
  if (N <= 0) return d;
  const auto r = d % N;
  return r < 0 ? r + N : r;
}

inline std::size_t generator_index(const std::vector<Generator>& gens, const std::string& id) {
  for (std::size_t i = 0; i < gens.size(); ++i)
    if (gens[i].id == id) return i;
  throw ValidationError("unknown generator '" + id + "'");
}

inline std::vector<Generator> normalized(std::vector<Generator> gens, std::int64_t N) {
  if (N < 0) throw ValidationError("grading modulus N must be >= 0");
  std::vector<std::string> seen;
  for (auto& g : gens) {
    if (std::find(seen.begin(), seen.end(), g.id) != seen.end()) throw ValidationError("duplicate generator id '" + g.id + "'");
    seen.push_back(g.id);
    g.degree = reduce(g.degree, N);
    if (g.lift && reduce(*g.lift, N) != g.degree)
      throw ValidationError("lift of '" + g.id + "' is not congruent to its degree mod N");
  }
  return gens;
}

inline IntComplex assemble_boundary(const std::vector<Generator>& gens, const std::vector<Trajectory>& trajectories,
                                    std::int64_t N) {
  IntComplex c{normalized(gens, N), N, ZMatrix(gens.size(), gens.size())};
  for (const auto& t : trajectories) {
    if (t.sign != 1 && t.sign != -1) throw ValidationError("trajectory sign must be +1 or -1");
    const auto i = generator_index(c.generators, t.to), j = generator_index(c.generators, t.from);
    if (reduce(c.generators[j].degree + 1, N) != c.generators[i].degree)
      throw ValidationError("trajectory " + t.from + " -> " + t.to + " does not raise the degree by 1");
    c.boundary(i, j) += t.sign;
  }
  return c;
}

/// Boundary matrix checked for shape and degree.
inline IntComplex make_complex(const std::vector<Generator>& gens, ZMatrix boundary, std::int64_t N) {
  IntComplex c{normalized(gens, N), N, std::move(boundary)};
  if (c.boundary.rows() != c.size() || c.boundary.cols() != c.size())
    throw ValidationError("boundary matrix must be square of size #generators");
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = 0; j < c.size(); ++j)
      if (c.boundary(i, j) != 0 && reduce(c.generators[j].degree + 1, N) != c.generators[i].degree)
        throw ValidationError("boundary entry (" + c.generators[i].id + ", " + c.generators[j].id +
                              ") does not raise the degree by 1");
  return c;
}

struct DSquared {
  bool ok = true;
  std::size_t row = 0, col = 0;  // first nonzero cell of ∂²
  BigInt value = 0;
};

inline DSquared verify_d_squared(const IntComplex& c) {
  const auto sq = c.boundary * c.boundary;
  for (std::size_t i = 0; i < sq.rows(); ++i)
    for (std::size_t j = 0; j < sq.cols(); ++j)
      if (sq(i, j) != 0) return {false, i, j, sq(i, j)};
  return {};
}

// Smith normal form --------------------------------------------------------

/// Nonzero invariant factors of an integer matrix, ascending, each dividing
/// the next. Pivots are chosen as the smallest nonzero entry in absolute value.
inline std::vector<BigInt> invariant_factors(ZMatrix m) {
  std::vector<BigInt> out;
  const std::size_t R = m.rows(), C = m.cols();
  for (std::size_t t = 0; t < std::min(R, C); ++t) {
    for (;;) {
      std::size_t pr = R, pc = C;
      for (std::size_t i = t; i < R; ++i)
        for (std::size_t j = t; j < C; ++j)
          if (m(i, j) != 0 && (pr == R || abs(m(i, j)) < abs(m(pr, pc)))) pr = i, pc = j;
      if (pr == R) {
        std::sort(out.begin(), out.end());
        return out;
      }
      for (std::size_t j = 0; j < C; ++j) std::swap(m(t, j), m(pr, j));
      for (std::size_t i = 0; i < R; ++i) std::swap(m(i, t), m(i, pc));
      bool clean = true;
      for (std::size_t i = t + 1; i < R; ++i) {
        const BigInt q = m(i, t) / m(t, t);
        if (q != 0)
          for (std::size_t j = t; j < C; ++j) m(i, j) -= q * m(t, j);
        if (m(i, t) != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < C; ++j) {
        const BigInt q = m(t, j) / m(t, t);
        if (q != 0)
          for (std::size_t i = t; i < R; ++i) m(i, j) -= q * m(i, t);
        if (m(t, j) != 0) clean = false;
      }
      if (!clean) continue;
      // the pivot must divide the rest of the block
      std::size_t bad_row = R;
      for (std::size_t i = t + 1; i < R && bad_row == R; ++i)
        for (std::size_t j = t + 1; j < C; ++j)
          if (m(i, j) % m(t, t) != 0) {
            bad_row = i;
            break;
          }
      if (bad_row == R) break;
      for (std::size_t j = t; j < C; ++j) m(t, j) += m(bad_row, j);
    }
    out.push_back(abs(m(t, t)));
  }
  std::sort(out.begin(), out.end());
  return out;
}

struct HomologyGroup {
  std::int64_t degree = 0;
  std::int64_t free_rank = 0;
  std::vector<BigInt> torsion;  // coefficients > 1, ascending, each dividing the next
  bool operator==(const HomologyGroup&) const = default;
};

/// Degrees carrying generators: [min, max] for N = 0, all of [0, N) otherwise.
inline std::vector<std::int64_t> degree_range(const IntComplex& c) {
  std::vector<std::int64_t> ds;
  if (c.N > 0) {
    for (std::int64_t d = 0; d < c.N; ++d) ds.push_back(d);
    return ds;
  }
  if (c.generators.empty()) return ds;
  auto [lo, hi] = std::minmax_element(c.generators.begin(), c.generators.end(),
                                      [](const Generator& a, const Generator& b) { return a.degree < b.degree; });
  for (auto d = lo->degree; d <= hi->degree; ++d) ds.push_back(d);
  return ds;
}

inline std::vector<std::size_t> in_degree(const IntComplex& c, std::int64_t d) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < c.size(); ++i)
    if (c.generators[i].degree == reduce(d, c.N)) idx.push_back(i);
  return idx;
}

/// ∂ restricted to C^d → C^{d+1}.
inline ZMatrix block(const IntComplex& c, std::int64_t d) {
  const auto src = in_degree(c, d), dst = in_degree(c, d + 1);
  ZMatrix m(dst.size(), src.size());
  for (std::size_t i = 0; i < dst.size(); ++i)
    for (std::size_t j = 0; j < src.size(); ++j) m(i, j) = c.boundary(dst[i], src[j]);
  return m;
}

inline std::vector<HomologyGroup> homology(const IntComplex& c) {
  const auto dsq = verify_d_squared(c);
  if (!dsq.ok)
    throw PreconditionError("open complex: (d^2)(" + c.generators[dsq.row].id + ", " + c.generators[dsq.col].id +
                            ") = " + dsq.value.str());
  std::vector<HomologyGroup> out;
  for (auto d : degree_range(c)) {
    const auto out_factors = invariant_factors(block(c, d));
    const auto in_factors = invariant_factors(block(c, d - 1));
    HomologyGroup h{d, static_cast<std::int64_t>(in_degree(c, d).size() - out_factors.size() - in_factors.size()), {}};
    for (const auto& f : in_factors)
      if (f > 1) h.torsion.push_back(f);
    out.push_back(std::move(h));
  }
  return out;
}

// Products ------------------------------------------------------------------

inline std::string tensor_id(const std::string& x, const std::string& y) { return x + "*" + y; }

/// ∂(x⊗y) = ∂x⊗y + (−1)^{|x|} x⊗∂y, generators ordered x-major.
inline IntComplex graded_tensor(const IntComplex& a, const IntComplex& b) {
  if (a.N != b.N) throw PreconditionError("graded_tensor: grading moduli differ");
  if (a.N % 2 != 0) throw PreconditionError("graded_tensor: Koszul signs need an even modulus (or N = 0)");
  IntComplex t;
  t.N = a.N;
  const std::size_t na = a.size(), nb = b.size();
  for (const auto& x : a.generators)
    for (const auto& y : b.generators) {
      Generator g{tensor_id(x.id, y.id), reduce(x.degree + y.degree, a.N), std::nullopt};
      if (x.lift && y.lift) g.lift = *x.lift + *y.lift;
      t.generators.push_back(std::move(g));
    }
  t.boundary = ZMatrix(na * nb, na * nb);
  for (std::size_t x = 0; x < na; ++x)
    for (std::size_t y = 0; y < nb; ++y) {
      const auto col = x * nb + y;
      for (std::size_t x2 = 0; x2 < na; ++x2)
        if (a.boundary(x2, x) != 0) t.boundary(x2 * nb + y, col) += a.boundary(x2, x);
      const int s = Sign::from_exponent(a.generators[x].degree).value();
      for (std::size_t y2 = 0; y2 < nb; ++y2)
        if (b.boundary(y2, y) != 0) t.boundary(x * nb + y2, col) += s * b.boundary(y2, y);
    }
  return t;
}

struct TorusInvariant {
  std::int64_t chain = 0;     // Σ (−1)^{|x|}
  std::int64_t homology = 0;  // rank H^even − rank H^odd
  bool agree() const { return chain == homology; }
};

inline TorusInvariant torus_invariant(const IntComplex& c) {
  if (c.N % 2 != 0) throw PreconditionError("torus invariant needs an even modulus N, got " + std::to_string(c.N));
  TorusInvariant t;
  for (const auto& g : c.generators) t.chain += Sign::from_exponent(g.degree).value();
  for (const auto& h : homology(c)) t.homology += Sign::from_exponent(h.degree).value() * h.free_rank;
  return t;
}

// q-graded theory ------------------------------------------------------------

/// Polynomial in q with integer coefficients; no zero coefficients stored.
struct QPoly {
  std::map<std::int64_t, BigInt> coeffs;

  void add(std::int64_t e, const BigInt& c) {
    auto& v = coeffs[e];
    v += c;
    if (v == 0) coeffs.erase(e);
  }
  BigInt at_one() const {
    BigInt s = 0;
    for (const auto& [e, c] : coeffs) s += c;
    return s;
  }
  /// q ↦ s·q for s = ±1.
  QPoly substitute(Sign s) const {
    QPoly p;
    for (const auto& [e, c] : coeffs) p.add(e, c * s.pow(e).value());
    return p;
  }
  bool operator==(const QPoly&) const = default;
};

using QPolyMatrix = std::vector<std::vector<QPoly>>;

/// Entry (x₊, x₋) collects ε(u) q^{d̃(x₊) − d̃(x₋) − 1}.
inline QPolyMatrix q_boundary(const std::vector<Generator>& gens, const std::vector<Trajectory>& trajectories,
                              std::int64_t N) {
  const auto g = normalized(gens, N);
  for (const auto& x : g)
    if (!x.lift) throw PreconditionError("q_boundary needs a lift for generator '" + x.id + "'");
  assemble_boundary(g, trajectories, N);  // degree and sign checks
  QPolyMatrix m(g.size(), std::vector<QPoly>(g.size()));
  for (const auto& t : trajectories) {
    const auto i = generator_index(g, t.to), j = generator_index(g, t.from);
    const auto e = *g[i].lift - *g[j].lift - 1;
    if (e < 0)
      throw PreconditionError("negative q-exponent on " + t.from + " -> " + t.to + ": inconsistent lifts");
    m[i][j].add(e, t.sign);
  }
  return m;
}

inline ZMatrix at_one(const QPolyMatrix& m) {
  ZMatrix z(m.size(), m.size());
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j) z(i, j) = m[i][j].at_one();
  return z;
}

struct ConjugateData {
  std::vector<Generator> generators;
  std::vector<Trajectory> trajectories;
};

/// The complex for the reversed pair: degrees and lifts negated, each
/// trajectory reversed with its sign changed by (−1)^{(d̃(x₊) − d̃(x₋) − 1)/2}.
inline ConjugateData conjugate(const std::vector<Generator>& gens, const std::vector<Trajectory>& trajectories,
                               std::int64_t N) {
  q_boundary(gens, trajectories, N);  // lifts present and consistent
  ConjugateData out;
  for (const auto& g : gens) out.generators.push_back({g.id, reduce(-g.degree, N), -*g.lift});
  for (const auto& t : trajectories) {
    const auto& xp = gens[generator_index(gens, t.to)];
    const auto& xm = gens[generator_index(gens, t.from)];
    const auto e = orient::half_exponent(*xp.lift - *xm.lift - 1, "conjugate");
    out.trajectories.push_back({t.to, t.from, t.sign * Sign::from_exponent(e).value()});
  }
  return out;
}

/// q ↦ (−1)^{N/2} q applied entrywise.
inline QPolyMatrix q_involution(const QPolyMatrix& m, std::int64_t N) {
  if (N % 2 != 0) throw PreconditionError("q involution needs an even modulus N");
  QPolyMatrix out = m;
  for (auto& row : out)
    for (auto& p : row) p = p.substitute(Sign::from_exponent(N / 2));
  return out;
}

// A∞ sign identity -----------------------------------------------------------

struct AinftyResult {
  Sign contrib1;
  Sign contrib2;
  Sign product;
};

/// Ends of S₁ are 1..n₁ and of S₂ are n₁+1..n₁+n₂, numbered cyclically from
/// the outgoing end; end i₁ of S₁ is glued to end i₂ = n₁+1 of S₂.
/// contrib1 moves end i₂ down past ends i₁+1..i₂−1; contrib2 moves the rest
/// of S₂ (ends n₁+2..n₁+n₂) past ends i₁+1..n₁.
inline AinftyResult ainfty_check(std::int64_t n1, std::int64_t n2, std::int64_t i1, std::int64_t i2,
                                 const std::vector<std::int64_t>& end_indices) {
  if (n1 < 1 || n2 < 1) throw PreconditionError("ainfty_check needs n1, n2 >= 1");
  if (static_cast<std::int64_t>(end_indices.size()) != n1 + n2)
    throw ValidationError("ainfty_check: expected n1 + n2 end indices");
  if (i1 < 1 || i1 > n1) throw PreconditionError("i1 must be an end of the first component");
  if (i2 != n1 + 1) throw PreconditionError("i2 must be the first end n1 + 1 of the second component");
  auto ind = [&](std::int64_t k) { return end_indices[static_cast<std::size_t>(k - 1)]; };
  std::int64_t s1 = 0, s2 = 0;
  for (std::int64_t k = 1; k <= n1; ++k) s1 += ind(k);
  for (std::int64_t k = n1 + 1; k <= n1 + n2; ++k) s2 += ind(k);
  if (s1 != 0 || s2 != 0)
    throw PreconditionError("end indices violate the sum condition (" + std::to_string(s1) + ", " +
                            std::to_string(s2) + ")");
  const Sign c1 = orient::end_move_sign(end_indices, static_cast<std::size_t>(i2 - 1), static_cast<std::size_t>(i1));
  std::int64_t e2 = 0;
  for (std::int64_t k = n1 + 2; k <= n1 + n2; ++k)
    for (std::int64_t j = i1 + 1; j <= n1; ++j) e2 += ind(k) * ind(j);
  const Sign c2 = Sign::from_exponent(e2);
  return {c1, c2, c1 * c2};
}

}  // namespace quiltsign::floer
