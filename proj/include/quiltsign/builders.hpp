#pragma once

#include <string>
#include <vector>

#include "quiltsign/surface.hpp"

/// Small constructors for common patches. Point ids are derived from the
/// patch id: "<id>.c" for the boundary circle, "<id>.i<k>" / "<id>.o<k>" for
/// ends and "<id>.w<k>" for node points.
namespace quiltsign::build {

using surface::Circle;
using surface::Direction;
using surface::End;
using surface::Patch;
using surface::Quilt;

inline End in(const std::string& point, Rational width = 1) { return End{point, Direction::incoming, width}; }
inline End out(const std::string& point, Rational width = 1) { return End{point, Direction::outgoing, width}; }

/// Disk whose boundary carries `n_in` incoming ends, then `n_out` outgoing
/// ends, then `n_nodes` node points.
inline Patch disk(const std::string& id, int n_in = 0, int n_out = 0, int n_nodes = 0) {
  Patch p{id, 0, {Circle{id + ".c", {}}}, {}};
  for (int k = 0; k < n_in; ++k) {
    p.circles[0].points.push_back(id + ".i" + std::to_string(k));
    p.ends.push_back(in(p.circles[0].points.back()));
  }
  for (int k = 0; k < n_out; ++k) {
    p.circles[0].points.push_back(id + ".o" + std::to_string(k));
    p.ends.push_back(out(p.circles[0].points.back()));
  }
  for (int k = 0; k < n_nodes; ++k) p.circles[0].points.push_back(id + ".w" + std::to_string(k));
  return p;
}

/// Strip ℝ × [0,1]: one incoming and one outgoing end.
inline Patch strip(const std::string& id) { return disk(id, 1, 1); }
/// Cup: disk with two outgoing ends.
inline Patch cup(const std::string& id) { return disk(id, 0, 2); }
/// Cap: disk with two incoming ends.
inline Patch cap(const std::string& id) { return disk(id, 2, 0); }

inline Patch closed(const std::string& id, std::int64_t genus) { return Patch{id, genus, {}, {}}; }

inline Patch annulus(const std::string& id) {
  return Patch{id, 0, {Circle{id + ".c0", {}}, Circle{id + ".c1", {}}}, {}};
}

/// Quilt with default orderings.
inline Quilt quilt(std::vector<Patch> patches, std::vector<surface::Seam> seams = {},
                   std::vector<surface::BoundaryNode> bnodes = {}, std::vector<surface::InteriorNode> inodes = {}) {
  Quilt q{std::move(patches), std::move(seams), std::move(bnodes), std::move(inodes), {}};
  surface::default_orderings(q);
  return q;
}

/// Stack of strips s0, …, s{n-1}: the top of s_k is seamed to the bottom of
/// s_{k+1}. Gives one incoming and one outgoing quilted end of length n.
inline Quilt strip_stack(int n, const std::string& prefix = "s") {
  std::vector<Patch> ps;
  std::vector<surface::Seam> seams;
  for (int k = 0; k < n; ++k) ps.push_back(strip(prefix + std::to_string(k)));
  for (int k = 0; k + 1 < n; ++k) {
    const auto a = prefix + std::to_string(k), b = prefix + std::to_string(k + 1);
    // top of a runs out → in, bottom of b runs in → out
    seams.push_back({"sigma" + std::to_string(k), {a + ".c", a + ".o0"}, {b + ".c", b + ".i0"}});
  }
  return quilt(std::move(ps), std::move(seams));
}

}  // namespace quiltsign::build
