#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "quiltsign/builders.hpp"
#include "quiltsign/cohom.hpp"
#include "quiltsign/index.hpp"
#include "quiltsign/surface.hpp"

/// A fixed corpus of labeled quilts with a cut for each, used by the
/// insertion/composition invariance checks.
namespace quiltsign::fixtures {

using index::BundleLabel;
using surface::Cut;
using surface::Quilt;

struct Fixture {
  std::string name;
  Quilt quilt;
  BundleLabel labels;
  std::string cut_patch;
  Cut cut;
  std::vector<std::string> compose_strips;  // strips removable in `quilt`
};

/// Deterministic labels: ranks in [1, max_rank] (equal across nodes), Maslov
/// and end data in [-3, 3].
inline BundleLabel random_labels(const Quilt& q, std::uint64_t seed, std::int64_t max_rank = 3) {
  std::mt19937_64 rng(seed);
  auto pick = [&](std::int64_t lo, std::int64_t hi) { return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng); };
  const surface::Layout lay(q);
  BundleLabel l;
  for (const auto& p : q.patches) l.patch_rank[p.id] = pick(1, max_rank);
  // node-joined patches share a rank
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& n : q.boundary_nodes) {
      auto& a = l.patch_rank[lay.patch_of_point(n.minus)];
      auto& b = l.patch_rank[lay.patch_of_point(n.plus)];
      if (a != b) b = a, changed = true;
    }
    for (const auto& n : q.interior_nodes) {
      auto& a = l.patch_rank[n.first];
      auto& b = l.patch_rank[n.second];
      if (a != b) b = a, changed = true;
    }
  }
  for (const auto& p : q.patches) {
    if (p.circles.empty()) l.chern[p.id] = pick(-2, 2);
    for (const auto& c : p.circles)
      for (const auto& s : lay.segments(c.id))
        if (!lay.seam_on(s)) l.boundary_maslov[s] = pick(-3, 3);
  }
  for (const auto& s : q.seams) l.seam_maslov_split[s.id] = {pick(-3, 3), pick(-3, 3)};
  for (const auto& e : q.orderings.ends_in) l.end_index[e.id] = pick(-3, 3);
  for (const auto& e : q.orderings.ends_out) l.end_index[e.id] = pick(-3, 3);
  return l;
}

inline Cut arc_cut(const std::string& from, const std::string& to) {
  Cut c;
  c.kind = Cut::Kind::arc;
  c.from_end = from;
  c.to_end = to;
  return c;
}

inline Cut circle_cut(std::vector<std::string> first, std::int64_t genus_first, bool separating = true) {
  Cut c;
  c.kind = Cut::Kind::circle;
  c.separating = separating;
  c.circles_first = std::move(first);
  c.genus_first = genus_first;
  return c;
}

inline Quilt ring(int n, const std::string& prefix = "r") {
  std::vector<surface::Patch> ps;
  std::vector<surface::Seam> seams;
  for (int k = 0; k < n; ++k) ps.push_back(build::strip(prefix + std::to_string(k)));
  for (int k = 0; k < n; ++k) {
    const auto a = prefix + std::to_string(k), c = prefix + std::to_string((k + 1) % n);
    seams.push_back({"t" + std::to_string(k), {a + ".c", a + ".o0"}, {c + ".c", c + ".i0"}});
  }
  return build::quilt(std::move(ps), std::move(seams));
}

inline std::vector<Fixture> quilt_fixtures() {
  using namespace build;
  std::vector<Fixture> out;
  auto add = [&](std::string name, Quilt q, std::string patch, Cut cut, std::vector<std::string> strips = {}) {
    const auto seed = 1000 + out.size();
    out.push_back({std::move(name), q, random_labels(q, seed), std::move(patch), std::move(cut), std::move(strips)});
  };

  add("strip", quilt({strip("s")}), "s", arc_cut("s.i0", "s.o0"));
  add("pants-disk", quilt({disk("p", 1, 2)}), "p", arc_cut("p.i0", "p.o1"));
  add("stack2", strip_stack(2), "s1", arc_cut("s1.i0", "s1.o0"));
  add("stack3", strip_stack(3), "s1", arc_cut("s1.i0", "s1.o0"), {"s1"});
  add("annulus", quilt({annulus("a")}), "a", circle_cut({"a.c0"}, 0));
  add("torus", quilt({closed("t", 1)}), "t", circle_cut({}, 1));
  add("genus2-nonsep", quilt({closed("g", 2)}), "g", circle_cut({}, 0, false));
  add("cup", quilt({cup("u")}), "u", arc_cut("u.o0", "u.o1"));
  add("cap", quilt({cap("n")}), "n", arc_cut("n.i0", "n.i1"));
  add("disk-2-2", quilt({disk("d", 2, 2)}), "d", arc_cut("d.i1", "d.o0"));
  add("stack4", strip_stack(4), "s2", arc_cut("s2.i0", "s2.o0"), {"s1", "s2"});
  add("ring3", ring(3), "r0", arc_cut("r0.i0", "r0.o0"), {"r0", "r1", "r2"});
  add("node-disks", quilt({disk("a", 1, 1, 1), disk("c", 0, 0, 1)}, {}, {{"w", "a.w0", "c.w0"}}), "a",
      arc_cut("a.i0", "a.o0"));
  add("sphere-disk", quilt({closed("s", 0), disk("d", 1, 1)}, {}, {}, {{"z", "s", "d"}}), "s", circle_cut({}, 0));
  {
    surface::Patch h = disk("h", 1, 1);
    h.genus = 1;
    add("handle-strip", quilt({h}), "h", circle_cut({}, 1));
  }
  {
    surface::Patch a{"a", 0, {surface::Circle{"a.c0", {"a.i0", "a.o0"}}, surface::Circle{"a.c1", {"a.i1"}}},
                     {in("a.i0"), build::out("a.o0"), in("a.i1")}};
    add("ended-annulus", quilt({a}), "a", circle_cut({"a.c1"}, 0));
  }
  {
    auto q = strip_stack(3, "m");
    add("stack3-mid-cut", q, "m1", arc_cut("m1.i0", "m1.o0"), {"m1"});
  }
  {
    auto q = strip_stack(2);
    q.patches.push_back(disk("x", 2, 1));
    surface::default_orderings(q);
    add("stack-plus-disk", q, "x", arc_cut("x.i0", "x.o0"));
  }
  add("strip-and-disk", quilt({strip("s"), disk("d")}), "d", circle_cut({"d.c"}, 0));
  {
    auto q = ring(4);
    add("ring4", q, "r2", arc_cut("r2.i0", "r2.o0"), {"r1", "r3"});
  }
  return out;
}

struct ConeFixture {
  std::string name;
  cohom::ConeComplex cone;
  std::vector<std::string> w2;  // source 2-cells where the class is 1
};

namespace cells {

using cohom::Cell;

inline std::vector<Cell> point(const std::string& p) { return {{p + "v", 0, {}}}; }

/// Two vertices, two edges.
inline std::vector<Cell> circle(const std::string& p) {
  return {{p + "v0", 0, {}}, {p + "v1", 0, {}}, {p + "e0", 1, {p + "v0", p + "v1"}}, {p + "e1", 1, {p + "v1", p + "v0"}}};
}

/// One vertex, one loop.
inline std::vector<Cell> loop(const std::string& p) { return {{p + "v", 0, {}}, {p + "e", 1, {p + "v", p + "v"}}}; }

/// The two-vertex circle with a 2-cell glued along it.
inline std::vector<Cell> disk(const std::string& p) {
  auto c = circle(p);
  c.push_back({p + "f", 2, {p + "e0", p + "e1"}});
  return c;
}

/// Inner loop a, outer loop b, radial edge c, one 2-cell a c b c⁻¹.
inline std::vector<Cell> annulus(const std::string& p) {
  return {{p + "p", 0, {}},
          {p + "q", 0, {}},
          {p + "a", 1, {p + "p", p + "p"}},
          {p + "b", 1, {p + "q", p + "q"}},
          {p + "c", 1, {p + "p", p + "q"}},
          {p + "f", 2, {p + "a", p + "c", p + "b", p + "c"}}};
}

/// Polygon model of a closed orientable surface: one vertex, 2g loops, one 2-cell.
inline std::vector<Cell> surface(const std::string& p, int genus) {
  std::vector<Cell> out{{p + "v", 0, {}}};
  std::vector<std::string> word;
  for (int k = 0; k < 2 * genus; ++k) {
    const auto e = p + "e" + std::to_string(k);
    out.push_back({e, 1, {p + "v", p + "v"}});
    word.push_back(e);
    word.push_back(e);
  }
  out.push_back({p + "f", 2, word});
  return out;
}

inline std::vector<Cell> projective_plane(const std::string& p) {
  return {{p + "v", 0, {}}, {p + "e", 1, {p + "v", p + "v"}}, {p + "f", 2, {p + "e", p + "e"}}};
}

inline std::vector<Cell> join(std::vector<Cell> a, const std::vector<Cell>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace cells

/// Every source cell sent to one target cell.
inline std::map<std::string, std::string> constant_map(const std::vector<cohom::Cell>& src, const std::string& t) {
  std::map<std::string, std::string> m;
  for (const auto& c : src) m[c.id] = t;
  return m;
}

inline std::map<std::string, std::string> identity_map(const std::vector<cohom::Cell>& src, const std::string& from = "",
                                                       const std::string& to = "") {
  std::map<std::string, std::string> m;
  for (const auto& c : src) m[c.id] = to + c.id.substr(from.size());
  return m;
}

/// Small cone models, each with at most 12 cells in total.
inline std::vector<ConeFixture> cone_fixtures() {
  using namespace cells;
  using cohom::ConeComplex;
  using cohom::GF2Complex;
  std::vector<ConeFixture> out;
  auto add = [&](std::string name, std::vector<Cell> m, std::vector<Cell> n, std::map<std::string, std::string> f,
                 std::vector<std::string> w2 = {}) {
    out.push_back({std::move(name), ConeComplex(GF2Complex(std::move(m)), GF2Complex(std::move(n)), std::move(f)), std::move(w2)});
  };

  add("point-identity", point("m"), point("n"), {{"mv", "nv"}});
  add("circle-to-point", circle("m"), point("n"), constant_map(circle("m"), "nv"));
  add("circle-into-disk", circle("m"), disk("n"), identity_map(circle("m"), "m", "n"));
  add("two-circles-to-point", join(circle("a"), circle("b")), point("n"), constant_map(join(circle("a"), circle("b")), "nv"));
  {
    std::map<std::string, std::string> f{{"iv", "np"}, {"ie", "na"}, {"ov", "nq"}, {"oe", "nb"}};
    add("boundary-into-annulus", join(loop("i"), loop("o")), annulus("n"), f);
  }
  add("circle-double-cover", circle("m"), loop("n"), {{"mv0", "nv"}, {"mv1", "nv"}, {"me0", "ne"}, {"me1", "ne"}});
  add("genus2-to-point", surface("m", 2), point("n"), constant_map(surface("m", 2), "nv"));
  add("genus2-to-point-w2", surface("m", 2), point("n"), constant_map(surface("m", 2), "nv"), {"mf"});
  add("rp2-to-point-w2", projective_plane("m"), point("n"), constant_map(projective_plane("m"), "nv"), {"mf"});
  add("torus-identity-w2", surface("m", 1), surface("n", 1), identity_map(surface("m", 1), "m", "n"), {"mf"});
  add("disk-to-point-w2", disk("m"), point("n"), constant_map(disk("m"), "nv"), {"mf"});
  add("rp2-identity-w2", projective_plane("m"), projective_plane("n"), identity_map(projective_plane("m"), "m", "n"), {"mf"});
  add("torus-into-rp2-w2", surface("m", 1), projective_plane("n"),
      {{"mv", "nv"}, {"me0", "ne"}, {"me1", "nv"}, {"mf", "nv"}}, {"mf"});
  return out;
}

}  // namespace quiltsign::fixtures
