#pragma once

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <cstdint>
#include <map>
#include <set>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "quiltsign/builders.hpp"
#include "quiltsign/cohom.hpp"
#include "quiltsign/detline.hpp"
#include "quiltsign/floer.hpp"
#include "quiltsign/index.hpp"
#include "quiltsign/orient.hpp"
#include "quiltsign/surface.hpp"

/// Random inputs for property suites.
namespace quiltsign::sampling {

using Rng = std::mt19937_64;

inline std::int64_t uniform(Rng& rng, std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

inline bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

/// Seed for a named stream: FNV-1a over the suite name mixed with the seed.
inline std::uint64_t stream_seed(std::uint64_t seed, const std::string& name) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : name) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

/// Small integer matrix; a third of the time a product of two thinner ones, so of low rank.
inline QMatrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols, std::int64_t bound = 3) {
  if (rows > 0 && cols > 0 && uniform(rng, 0, 2) == 0) {
    const auto r = static_cast<std::size_t>(uniform(rng, 0, static_cast<std::int64_t>(std::min(rows, cols))));
    if (r == 0) return QMatrix(rows, cols);
    QMatrix a(rows, r), b(r, cols);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < r; ++j) a(i, j) = uniform(rng, -bound, bound);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < cols; ++j) b(i, j) = uniform(rng, -bound, bound);
    return a * b;
  }
  QMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = uniform(rng, -bound, bound);
  return m;
}

inline detline::FinOp random_finop(Rng& rng, std::int64_t max_dim = 4) {
  const auto rows = static_cast<std::size_t>(uniform(rng, 0, max_dim));
  const auto cols = static_cast<std::size_t>(uniform(rng, 0, max_dim));
  return detline::FinOp::from_matrix(random_matrix(rng, rows, cols));
}

struct SquareConfig {
  surface::Quilt quilt;
  index::BundleLabel labels;
  orient::Surgery first;
  orient::Surgery second;
};

namespace detail {

struct Block {
  std::vector<surface::Patch> patches;
  std::vector<surface::BoundaryNode> bnodes;
  std::vector<surface::InteriorNode> inodes;
  orient::Surgery surgery;
  std::vector<std::string> adjacent;  // two circles to keep adjacent
  std::string s_minus, s_plus;        // end blocks: patch ids
};

inline surface::Patch random_disk(Rng& rng, const std::string& id, int min_in, int min_out) {
  return build::disk(id, static_cast<int>(uniform(rng, min_in, min_in + 1)),
                     static_cast<int>(uniform(rng, min_out, min_out + 1)));
}

inline Block make_block(Rng& rng, int kind, const std::string& p) {
  Block b;
  switch (kind) {
    case 0: {  // interior node
      auto a = coin(rng) ? build::closed(p + "s", 0) : random_disk(rng, p + "s", 0, 0);
      auto d = random_disk(rng, p + "d", 0, 0);
      b.inodes.push_back({p + "z", a.id, d.id});
      b.patches = {a, d};
      b.surgery = {orient::Surgery::Kind::interior, p + "z", true, "", ""};
      break;
    }
    case 1: {  // boundary node on two circles
      auto a = random_disk(rng, p + "a", 0, 0);
      auto c = random_disk(rng, p + "c", 0, 0);
      const auto wa = p + "a.w", wc = p + "c.w";
      a.circles[0].points.insert(a.circles[0].points.begin() + uniform(rng, 0, a.circles[0].points.size()), wa);
      c.circles[0].points.insert(c.circles[0].points.begin() + uniform(rng, 0, c.circles[0].points.size()), wc);
      if (coin(rng))
        b.bnodes.push_back({p + "w", wa, wc});
      else
        b.bnodes.push_back({p + "w", wc, wa});
      b.patches = {a, c};
      b.adjacent = {a.circles[0].id, c.circles[0].id};
      b.surgery = {orient::Surgery::Kind::boundary, p + "w", true, "", ""};
      break;
    }
    case 2: {  // self node
      auto d = random_disk(rng, p + "d", 0, 0);
      auto& pts = d.circles[0].points;
      pts.insert(pts.begin() + uniform(rng, 0, pts.size()), p + "d.wm");
      pts.insert(pts.begin() + uniform(rng, 0, pts.size()), p + "d.wp");
      b.bnodes.push_back({p + "w", p + "d.wm", p + "d.wp"});
      b.patches = {d};
      b.surgery = {orient::Surgery::Kind::boundary, p + "w", coin(rng), "", ""};
      break;
    }
    default: {  // ends on two components
      b.patches = {random_disk(rng, p + "m", 0, 1), random_disk(rng, p + "p", 1, 0)};
      b.s_minus = p + "m";
      b.s_plus = p + "p";
      b.surgery.kind = orient::Surgery::Kind::ends;
      break;
    }
  }
  return b;
}

}  // namespace detail

/// Two independent surgeries on disjoint blocks of a random quilt, plus
/// spectator patches. Returns nullopt if the sampled orderings violate a
/// precondition of either surgery in either order.
inline std::optional<SquareConfig> random_square(Rng& rng, std::int64_t max_rank = 4, std::int64_t max_ind = 5) {
  std::vector<detail::Block> blocks;
  const int k1 = static_cast<int>(uniform(rng, 0, 3));
  const int k2 = static_cast<int>(uniform(rng, 0, 3));
  blocks.push_back(detail::make_block(rng, k1, "x"));
  blocks.push_back(detail::make_block(rng, k2, "y"));
  std::vector<surface::Patch> spectators;
  for (int k = 0, n = static_cast<int>(uniform(rng, 0, 2)); k < n; ++k)
    spectators.push_back(detail::random_disk(rng, "q" + std::to_string(k), 0, 0));

  surface::Quilt q;
  for (const auto& b : blocks) {
    q.patches.insert(q.patches.end(), b.patches.begin(), b.patches.end());
    q.boundary_nodes.insert(q.boundary_nodes.end(), b.bnodes.begin(), b.bnodes.end());
    q.interior_nodes.insert(q.interior_nodes.end(), b.inodes.begin(), b.inodes.end());
  }
  q.patches.insert(q.patches.end(), spectators.begin(), spectators.end());
  std::shuffle(q.patches.begin(), q.patches.end(), rng);
  surface::default_orderings(q);
  std::shuffle(q.orderings.ends_in.begin(), q.orderings.ends_in.end(), rng);
  std::shuffle(q.orderings.ends_out.begin(), q.orderings.ends_out.end(), rng);
  auto& merged = q.orderings.merged;
  std::shuffle(merged.begin(), merged.end(), rng);
  for (const auto& b : blocks) {
    if (b.adjacent.empty() || coin(rng, 0.15)) continue;
    auto find = [&](const std::string& id) {
      return std::find_if(merged.begin(), merged.end(),
                          [&](const surface::OrderItem& it) { return it.kind == surface::ItemKind::circle && it.id == id; });
    };
    const auto moved = *find(b.adjacent[1]);
    merged.erase(find(b.adjacent[1]));
    auto anchor = find(b.adjacent[0]);
    merged.insert(coin(rng) ? anchor + 1 : anchor, moved);
  }

  const auto rank = uniform(rng, 1, max_rank);
  index::BundleLabel l = index::BundleLabel{};
  const surface::Layout lay(q);
  for (const auto& p : q.patches) {
    l.patch_rank[p.id] = rank;
    for (const auto& c : p.circles)
      for (const auto& s : lay.segments(c.id)) l.boundary_maslov[s] = uniform(rng, -3, 3);
  }
  for (const auto* list : {&q.orderings.ends_in, &q.orderings.ends_out})
    for (const auto& e : *list) l.end_index[e.id] = uniform(rng, -max_ind, max_ind);

  for (auto& b : blocks) {
    if (b.surgery.kind != orient::Surgery::Kind::ends) continue;
    for (const auto& e : q.orderings.ends_out)
      if (lay.patch_of_point(e.chain.front()) == b.s_minus) b.surgery.e_plus = e.id;
    for (const auto& e : q.orderings.ends_in)
      if (lay.patch_of_point(e.chain.front()) == b.s_plus && b.surgery.e_minus.empty()) b.surgery.e_minus = e.id;
  }
  SquareConfig cfg{q, l, blocks[0].surgery, blocks[1].surgery};
  try {
    orient::commuting_square(cfg.quilt, cfg.labels, cfg.first, cfg.second);
  } catch (const PreconditionError&) {
    return std::nullopt;
  }
  return cfg;
}

/// Size used to pick a minimal counterexample.
inline std::size_t config_size(const SquareConfig& c) {
  std::size_t n = c.quilt.patches.size() + c.quilt.boundary_nodes.size() + c.quilt.interior_nodes.size();
  n += c.quilt.orderings.ends_in.size() + c.quilt.orderings.ends_out.size();
  return n;
}

/// A closed complex: a direct sum of pieces ℤ and ℤ -k-> ℤ, then random
/// unimodular changes of basis inside each degree, keeping entries in
/// [−bound, bound], and a shuffle of the generators.
inline floer::IntComplex random_closed_complex(Rng& rng, std::int64_t N, std::size_t max_gens = 8,
                                               std::int64_t bound = 4) {
  const auto n = static_cast<std::size_t>(uniform(rng, 1, static_cast<std::int64_t>(max_gens)));
  std::vector<floer::Generator> gens;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<std::int64_t> weights;
  auto degree = [&] { return N > 0 ? uniform(rng, 0, N - 1) : uniform(rng, -1, 2); };
  while (gens.size() < n) {
    const auto d = degree();
    const auto id = [&] { return "g" + std::to_string(gens.size()); };
    if (n - gens.size() >= 2 && coin(rng, 0.6)) {
      gens.push_back({id(), d, std::nullopt});
      gens.push_back({id(), floer::reduce(d + 1, N), std::nullopt});
      pairs.emplace_back(gens.size() - 2, gens.size() - 1);
      weights.push_back(uniform(rng, -bound, bound));
    } else {
      gens.push_back({id(), d, std::nullopt});
    }
  }
  ZMatrix m(n, n);
  for (std::size_t k = 0; k < pairs.size(); ++k) m(pairs[k].second, pairs[k].first) = weights[k];
  for (int step = 0; step < 24; ++step) {
    const auto i = static_cast<std::size_t>(uniform(rng, 0, n - 1)), j = static_cast<std::size_t>(uniform(rng, 0, n - 1));
    if (i == j || gens[i].degree != gens[j].degree) continue;
    const int s = coin(rng) ? 1 : -1;
    ZMatrix t = m;
    for (std::size_t c = 0; c < n; ++c) t(i, c) += s * t(j, c);
    for (std::size_t r = 0; r < n; ++r) t(r, j) -= s * t(r, i);
    bool small = true;
    for (std::size_t r = 0; r < n && small; ++r)
      for (std::size_t c = 0; c < n; ++c)
        if (abs(t(r, c)) > bound) {
          small = false;
          break;
        }
    if (small) m = std::move(t);
  }
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<floer::Generator> g2(n);
  ZMatrix m2(n, n);
  for (std::size_t a = 0; a < n; ++a) {
    g2[a] = gens[perm[a]];
    g2[a].id = "x" + std::to_string(a);
    for (std::size_t b = 0; b < n; ++b) m2(a, b) = m(perm[a], perm[b]);
  }
  return floer::make_complex(g2, std::move(m2), N);
}

/// A vector of n₁ + n₂ end indices in [−bound, bound] with each block summing to zero.
inline std::vector<std::int64_t> random_sumsigns(Rng& rng, std::int64_t n1, std::int64_t n2, std::int64_t bound = 5) {
  std::vector<std::int64_t> out;
  for (auto n : {n1, n2}) {
    for (;;) {
      std::vector<std::int64_t> blockv(static_cast<std::size_t>(n));
      std::int64_t s = 0;
      for (std::int64_t k = 0; k + 1 < n; ++k) s += (blockv[static_cast<std::size_t>(k)] = uniform(rng, -bound, bound));
      blockv.back() = -s;
      if (std::abs(s) > bound) continue;
      std::shuffle(blockv.begin(), blockv.end(), rng);
      out.insert(out.end(), blockv.begin(), blockv.end());
      break;
    }
  }
  return out;
}

/// Simplicial complex on vertices 0..n−1 given by its simplices (closed under faces).
using Simplices = std::set<std::vector<int>>;

inline std::string simplex_id(const std::string& p, const std::vector<int>& s) {
  std::string id = p;
  for (std::size_t k = 0; k < s.size(); ++k) id += (k ? "-" : "") + std::to_string(s[k]);
  return id;
}

inline std::vector<cohom::Cell> simplicial_cells(const std::string& p, const Simplices& ss) {
  std::vector<cohom::Cell> out;
  for (const auto& s : ss) {
    cohom::Cell c{simplex_id(p, s), static_cast<int>(s.size()) - 1, {}};
    if (s.size() > 1)
      for (std::size_t k = 0; k < s.size(); ++k) {
        auto f = s;
        f.erase(f.begin() + static_cast<std::ptrdiff_t>(k));
        c.faces.push_back(simplex_id(p, f));
      }
    out.push_back(std::move(c));
  }
  return out;
}

/// Random simplices on at most max_vertices vertices, at most max_cells in total.
inline Simplices random_simplicial(Rng& rng, int max_vertices, std::size_t max_cells) {
  const int n = static_cast<int>(uniform(rng, 1, max_vertices));
  Simplices ss;
  for (int v = 0; v < n; ++v) ss.insert({v});
  std::vector<std::vector<int>> edges;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) edges.push_back({a, b});
  std::shuffle(edges.begin(), edges.end(), rng);
  for (const auto& e : edges)
    if (ss.size() < max_cells && coin(rng, 0.6)) ss.insert(e);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = b + 1; c < n; ++c)
        if (ss.size() < max_cells && ss.count({a, b}) && ss.count({a, c}) && ss.count({b, c}) && coin(rng, 0.5))
          ss.insert({a, b, c});
  return ss;
}

/// A simplicial map between random complexes with at most max_cells cells each.
inline cohom::ConeComplex random_simplicial_map(Rng& rng, std::size_t max_cells = 8) {
  const auto target = random_simplicial(rng, 4, max_cells);
  int nt = 0;
  for (const auto& s : target) nt = std::max(nt, s.back() + 1);
  for (;;) {
    const auto source = random_simplicial(rng, 4, max_cells);
    int ns = 0;
    for (const auto& s : source) ns = std::max(ns, s.back() + 1);
    std::vector<int> f(static_cast<std::size_t>(ns));
    for (auto& v : f) v = static_cast<int>(uniform(rng, 0, nt - 1));
    std::map<std::string, std::string> cell_map;
    bool ok = true;
    for (const auto& s : source) {
      std::set<int> img;
      for (int v : s) img.insert(f[static_cast<std::size_t>(v)]);
      const std::vector<int> t(img.begin(), img.end());
      if (!target.count(t)) {
        ok = false;
        break;
      }
      cell_map[simplex_id("m", s)] = simplex_id("n", t);
    }
    if (ok)
      return cohom::ConeComplex(cohom::GF2Complex(simplicial_cells("m", source)),
                                cohom::GF2Complex(simplicial_cells("n", target)), std::move(cell_map));
  }
}

}  // namespace quiltsign::sampling
