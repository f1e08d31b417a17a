#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "quiltsign/error.hpp"
#include "quiltsign/linalg.hpp"

/// Combinatorial quilted surfaces.
///
/// A patch is a compact surface S̄ of some genus whose boundary circles carry
/// cyclically ordered marked points. Some marked points are strip-like ends;
/// the others are boundary-node points. A boundary segment is the part of a
/// circle from one end point to the next (a circle without end points is a
/// single compact segment) and is referenced by (circle id, starting end
/// point). Seams join two segments. Quilted ends are the maximal chains of
/// patch ends linked through seams.
namespace quiltsign::surface {

enum class Direction { incoming, outgoing };

inline const char* to_string(Direction d) { return d == Direction::incoming ? "in" : "out"; }

struct End {
  std::string point;
  Direction direction = Direction::incoming;
  Rational width = 1;
  bool operator==(const End&) const = default;
};

struct Circle {
  std::string id;
  std::vector<std::string> points;  // cyclic order along the boundary orientation
  bool operator==(const Circle&) const = default;
};

struct Patch {
  std::string id;
  std::int64_t genus = 0;
  std::vector<Circle> circles;
  std::vector<End> ends;
  bool operator==(const Patch&) const = default;
};

struct SegmentRef {
  std::string circle;
  std::string after;  // empty for a circle without end points
  auto operator<=>(const SegmentRef&) const = default;
};

inline std::string to_string(const SegmentRef& s) { return s.circle + "/" + (s.after.empty() ? "*" : s.after); }

struct Seam {
  std::string id;
  SegmentRef minus;
  SegmentRef plus;
  bool operator==(const Seam&) const = default;
};

/// Ordered pair (w⁻, w⁺) of boundary points.
struct BoundaryNode {
  std::string id;
  std::string minus;
  std::string plus;
  bool operator==(const BoundaryNode&) const = default;
};

struct InteriorNode {
  std::string id;
  std::string first;   // patch id
  std::string second;  // patch id
  bool operator==(const InteriorNode&) const = default;
};

/// Chain of end points. Outgoing chains are listed along the boundary
/// orientation of the segments joining them, incoming chains against it, so
/// that position i of an outgoing chain glues to position i of an incoming one.
struct QuiltedEnd {
  std::string id;
  std::vector<std::string> chain;
  bool operator==(const QuiltedEnd&) const = default;
};

enum class ItemKind { circle, node, end };

inline const char* to_string(ItemKind k) {
  switch (k) {
    case ItemKind::circle: return "circle";
    case ItemKind::node: return "node";
    default: return "end";
  }
}

struct OrderItem {
  ItemKind kind = ItemKind::circle;
  std::string id;
  bool operator==(const OrderItem&) const = default;
};

struct Orderings {
  std::vector<QuiltedEnd> ends_in;
  std::vector<QuiltedEnd> ends_out;
  /// Boundary circles carrying true boundary, boundary nodes and quilted ends.
  std::vector<OrderItem> merged;
  bool operator==(const Orderings&) const = default;
};

struct Quilt {
  std::vector<Patch> patches;
  std::vector<Seam> seams;
  std::vector<BoundaryNode> boundary_nodes;
  std::vector<InteriorNode> interior_nodes;
  Orderings orderings;
  bool operator==(const Quilt&) const = default;
};

inline std::int64_t euler_char(const Patch& p) {
  return 2 - 2 * p.genus - static_cast<std::int64_t>(p.circles.size());
}

inline std::int64_t total_euler_char(const Quilt& q) {
  std::int64_t chi = 0;
  for (const auto& p : q.patches) chi += euler_char(p);
  return chi;
}

/// Lookup tables over a quilt. Holds references; do not outlive the quilt.
class Layout {
 public:
  struct PointLoc {
    std::size_t patch;
    std::size_t circle;
    std::size_t pos;
  };

  explicit Layout(const Quilt& q) : q_(q) {
    for (std::size_t p = 0; p < q.patches.size(); ++p) {
      const auto& patch = q.patches[p];
      if (!patch_.emplace(patch.id, p).second) throw ValidationError("duplicate patch id '" + patch.id + "'");
      for (std::size_t c = 0; c < patch.circles.size(); ++c) {
        const auto& circle = patch.circles[c];
        if (!circle_.emplace(circle.id, std::make_pair(p, c)).second)
          throw ValidationError("duplicate circle id '" + circle.id + "'");
        for (std::size_t i = 0; i < circle.points.size(); ++i)
          if (!point_.emplace(circle.points[i], PointLoc{p, c, i}).second)
            throw ValidationError("duplicate marked point id '" + circle.points[i] + "'");
      }
      for (std::size_t e = 0; e < patch.ends.size(); ++e) {
        const auto& end = patch.ends[e];
        auto it = point_.find(end.point);
        if (it == point_.end() || it->second.patch != p)
          throw ValidationError("end references point '" + end.point + "' that is not on patch '" + patch.id + "'");
        if (!end_.emplace(end.point, std::make_pair(p, e)).second)
          throw ValidationError("two ends reference point '" + end.point + "'");
        if (end.width <= 0) throw ValidationError("end at '" + end.point + "' has non-positive width");
      }
    }
  }

  const Quilt& quilt() const { return q_; }

  bool has_patch(const std::string& id) const { return patch_.count(id) > 0; }
  std::size_t patch_index(const std::string& id) const {
    auto it = patch_.find(id);
    if (it == patch_.end()) throw ValidationError("unknown patch '" + id + "'");
    return it->second;
  }
  bool has_circle(const std::string& id) const { return circle_.count(id) > 0; }
  std::pair<std::size_t, std::size_t> circle_loc(const std::string& id) const {
    auto it = circle_.find(id);
    if (it == circle_.end()) throw ValidationError("unknown circle '" + id + "'");
    return it->second;
  }
  const Circle& circle(const std::string& id) const {
    auto [p, c] = circle_loc(id);
    return q_.patches[p].circles[c];
  }
  bool has_point(const std::string& id) const { return point_.count(id) > 0; }
  PointLoc point_loc(const std::string& id) const {
    auto it = point_.find(id);
    if (it == point_.end()) throw ValidationError("unknown marked point '" + id + "'");
    return it->second;
  }
  std::string circle_of_point(const std::string& id) const {
    auto loc = point_loc(id);
    return q_.patches[loc.patch].circles[loc.circle].id;
  }
  std::string patch_of_point(const std::string& id) const { return q_.patches[point_loc(id).patch].id; }
  bool is_end(const std::string& point) const { return end_.count(point) > 0; }
  const End& end_at(const std::string& point) const {
    auto it = end_.find(point);
    if (it == end_.end()) throw ValidationError("no end at point '" + point + "'");
    return q_.patches[it->second.first].ends[it->second.second];
  }

  /// End points of a circle in cyclic order starting from the circle's first point.
  std::vector<std::string> end_points(const std::string& circle_id) const {
    std::vector<std::string> out;
    for (const auto& p : circle(circle_id).points)
      if (is_end(p)) out.push_back(p);
    return out;
  }

  std::vector<SegmentRef> segments(const std::string& circle_id) const {
    auto ends = end_points(circle_id);
    if (ends.empty()) return {SegmentRef{circle_id, ""}};
    std::vector<SegmentRef> out;
    for (auto& e : ends) out.push_back(SegmentRef{circle_id, e});
    return out;
  }

  bool segment_exists(const SegmentRef& s) const {
    if (!has_circle(s.circle)) return false;
    if (s.after.empty()) return end_points(s.circle).empty();
    return is_end(s.after) && circle_of_point(s.after) == s.circle;
  }

  /// The end point where a segment stops (empty for compact segments).
  std::string segment_stop(const SegmentRef& s) const {
    if (s.after.empty()) return "";
    auto ends = end_points(s.circle);
    auto it = std::find(ends.begin(), ends.end(), s.after);
    ++it;
    return it == ends.end() ? ends.front() : *it;
  }

  /// Segment ending at an end point.
  SegmentRef segment_before(const std::string& end_point) const {
    const auto c = circle_of_point(end_point);
    auto ends = end_points(c);
    auto it = std::find(ends.begin(), ends.end(), end_point);
    return SegmentRef{c, it == ends.begin() ? ends.back() : *std::prev(it)};
  }

  /// Segment containing a marked point that is not an end.
  SegmentRef segment_containing(const std::string& point) const {
    const auto loc = point_loc(point);
    const auto& circle = q_.patches[loc.patch].circles[loc.circle];
    const std::size_t k = circle.points.size();
    for (std::size_t step = 1; step <= k; ++step) {
      const auto& p = circle.points[(loc.pos + k - step) % k];
      if (is_end(p)) return SegmentRef{circle.id, p};
    }
    return SegmentRef{circle.id, ""};
  }

  std::optional<std::size_t> seam_on(const SegmentRef& s) const {
    for (std::size_t i = 0; i < q_.seams.size(); ++i)
      if (q_.seams[i].minus == s || q_.seams[i].plus == s) return i;
    return std::nullopt;
  }

  /// Circle has at least one segment that is not on a seam.
  bool has_true_boundary(const std::string& circle_id) const {
    for (const auto& s : segments(circle_id))
      if (!seam_on(s)) return true;
    return false;
  }

 private:
  const Quilt& q_;
  std::map<std::string, std::size_t> patch_;
  std::map<std::string, std::pair<std::size_t, std::size_t>> circle_;
  std::map<std::string, PointLoc> point_;
  std::map<std::string, std::pair<std::size_t, std::size_t>> end_;
};

struct Chain {
  Direction direction = Direction::incoming;
  std::vector<std::string> points;
  bool cyclic = false;
};

namespace detail {

struct Links {
  std::map<std::string, std::string> right;  // along the boundary orientation
  std::map<std::string, std::string> left;
};

inline Links end_links(const Layout& lay) {
  Links links;
  for (const auto& seam : lay.quilt().seams) {
    const auto& x = seam.minus;
    const auto& y = seam.plus;
    if (x.after.empty() != y.after.empty())
      throw ValidationError("direction mismatch: seam '" + seam.id + "' joins a compact circle to a segment with ends");
    if (x.after.empty()) continue;
    const std::string a = x.after, b = lay.segment_stop(x);
    const std::string a2 = y.after, b2 = lay.segment_stop(y);
    // X runs a → b and Y runs a2 → b2 with opposite orientation: a ~ b2, b ~ a2.
    for (auto [from, to] : {std::pair{a, b2}, std::pair{a2, b}}) {
      if (lay.end_at(from).direction != lay.end_at(to).direction)
        throw ValidationError("direction mismatch: seam '" + seam.id + "' matches " +
                              to_string(lay.end_at(from).direction) + " end '" + from + "' with " +
                              to_string(lay.end_at(to).direction) + " end '" + to + "'");
      if (!links.right.emplace(from, to).second || !links.left.emplace(to, from).second)
        throw ValidationError("end '" + from + "' is linked twice");
    }
  }
  return links;
}

}  // namespace detail

/// Maximal seam-linked chains of patch ends.
inline std::vector<Chain> compute_chains(const Layout& lay) {
  const auto links = detail::end_links(lay);
  std::vector<std::string> all;
  for (const auto& p : lay.quilt().patches)
    for (const auto& c : p.circles)
      for (const auto& pt : c.points)
        if (lay.is_end(pt)) all.push_back(pt);
  std::set<std::string> done;
  std::vector<Chain> out;
  auto follow = [&](const std::string& start, const std::map<std::string, std::string>& next) {
    Chain ch;
    ch.direction = lay.end_at(start).direction;
    std::string cur = start;
    while (true) {
      ch.points.push_back(cur);
      done.insert(cur);
      auto it = next.find(cur);
      if (it == next.end()) break;
      if (it->second == start) {
        ch.cyclic = true;
        break;
      }
      cur = it->second;
    }
    return ch;
  };
  for (const auto& pt : all) {
    if (done.count(pt)) continue;
    const bool out_dir = lay.end_at(pt).direction == Direction::outgoing;
    const auto& back = out_dir ? links.left : links.right;
    const auto& fwd = out_dir ? links.right : links.left;
    // walk backwards to the start (or around a cycle)
    std::string start = pt;
    while (true) {
      auto it = back.find(start);
      if (it == back.end() || it->second == pt) break;
      start = it->second;
    }
    if (back.count(start) && back.at(start) == pt) start = pt;
    out.push_back(follow(start, fwd));
  }
  return out;
}

inline std::vector<Chain> compute_chains(const Quilt& q) { return compute_chains(Layout(q)); }

namespace detail {

inline bool same_chain(const std::vector<std::string>& listed, const Chain& ch) {
  if (listed.size() != ch.points.size()) return false;
  if (!ch.cyclic) return listed == ch.points;
  for (std::size_t r = 0; r < listed.size(); ++r) {
    bool ok = true;
    for (std::size_t i = 0; i < listed.size() && ok; ++i)
      ok = listed[i] == ch.points[(i + r) % listed.size()];
    if (ok) return true;
  }
  return false;
}

}  // namespace detail

/// Throws ValidationError naming the first violated invariant.
inline void validate(const Quilt& q) {
  const Layout lay(q);
  std::set<std::string> ids;
  auto fresh = [&](const std::string& kind, const std::string& id) {
    if (id.empty()) throw ValidationError("empty " + kind + " id");
    if (!ids.insert(kind + ":" + id).second) throw ValidationError("duplicate " + kind + " id '" + id + "'");
  };
  for (const auto& p : q.patches) {
    if (p.genus < 0) throw ValidationError("patch '" + p.id + "' has negative genus");
    fresh("patch", p.id);
  }
  std::set<SegmentRef> used;
  for (const auto& s : q.seams) {
    fresh("seam", s.id);
    for (const auto* side : {&s.minus, &s.plus}) {
      if (!lay.segment_exists(*side))
        throw ValidationError("dangling seam side: seam '" + s.id + "' references segment " + to_string(*side));
      if (!used.insert(*side).second)
        throw ValidationError("segment " + to_string(*side) + " is on more than one seam side");
    }
  }
  auto chains = compute_chains(lay);

  for (const auto& n : q.boundary_nodes) {
    fresh("node", n.id);
    for (const auto* pt : {&n.minus, &n.plus}) {
      if (!lay.has_point(*pt)) throw ValidationError("boundary node '" + n.id + "' references unknown point '" + *pt + "'");
      if (lay.is_end(*pt)) throw ValidationError("boundary node '" + n.id + "' sits on end point '" + *pt + "'");
      if (lay.seam_on(lay.segment_containing(*pt)))
        throw ValidationError("boundary node '" + n.id + "' point '" + *pt + "' lies on a seam");
    }
    if (n.minus == n.plus) throw ValidationError("boundary node '" + n.id + "' joins a point to itself");
  }
  std::set<std::string> node_points;
  for (const auto& n : q.boundary_nodes)
    for (const auto* pt : {&n.minus, &n.plus})
      if (!node_points.insert(*pt).second) throw ValidationError("point '" + *pt + "' carries two boundary nodes");
  for (const auto& p : q.patches)
    for (const auto& c : p.circles)
      for (const auto& pt : c.points)
        if (!lay.is_end(pt) && !node_points.count(pt))
          throw ValidationError("marked point '" + pt + "' is neither an end nor a node point");
  for (const auto& n : q.interior_nodes) {
    fresh("node", n.id);
    lay.patch_index(n.first);
    lay.patch_index(n.second);
  }

  // quilted ends
  std::map<std::string, const Chain*> chain_of;
  for (const auto& ch : chains)
    for (const auto& pt : ch.points) chain_of[pt] = &ch;
  std::set<const Chain*> listed;
  auto check_list = [&](const std::vector<QuiltedEnd>& list, Direction dir) {
    for (const auto& qe : list) {
      fresh("end", qe.id);
      if (qe.chain.empty()) throw ValidationError("quilted end '" + qe.id + "' has an empty chain");
      for (const auto& pt : qe.chain)
        if (!lay.is_end(pt)) throw ValidationError("quilted end '" + qe.id + "' lists '" + pt + "', which is not an end");
      const Chain* ch = chain_of.at(qe.chain.front());
      if (ch->direction != dir)
        throw ValidationError("direction mismatch: quilted end '" + qe.id + "' is listed with the wrong direction");
      if (!detail::same_chain(qe.chain, *ch)) {
        bool subset = qe.chain.size() < ch->points.size();
        for (const auto& pt : qe.chain)
          subset = subset && std::find(ch->points.begin(), ch->points.end(), pt) != ch->points.end();
        if (subset) throw ValidationError("non-maximal end chain: quilted end '" + qe.id + "'");
        throw ValidationError("end chain mismatch: quilted end '" + qe.id + "' does not follow the seams");
      }
      if (!listed.insert(ch).second) throw ValidationError("duplicate ordering entries: chain of '" + qe.id + "'");
    }
  };
  check_list(q.orderings.ends_in, Direction::incoming);
  check_list(q.orderings.ends_out, Direction::outgoing);
  if (listed.size() != chains.size()) {
    for (const auto& ch : chains)
      if (!listed.count(&ch)) throw ValidationError("end chain starting at '" + ch.points.front() + "' is not listed");
  }

  // merged ordering
  std::set<std::pair<ItemKind, std::string>> expected, seen;
  for (const auto& p : q.patches)
    for (const auto& c : p.circles)
      if (lay.has_true_boundary(c.id)) expected.insert({ItemKind::circle, c.id});
  for (const auto& n : q.boundary_nodes) expected.insert({ItemKind::node, n.id});
  for (const auto& e : q.orderings.ends_in) expected.insert({ItemKind::end, e.id});
  for (const auto& e : q.orderings.ends_out) expected.insert({ItemKind::end, e.id});
  for (const auto& item : q.orderings.merged) {
    if (!seen.insert({item.kind, item.id}).second)
      throw ValidationError(std::string("duplicate ordering entries: ") + to_string(item.kind) + " '" + item.id + "'");
    if (!expected.count({item.kind, item.id}))
      throw ValidationError(std::string("ordering lists unknown or seamed ") + to_string(item.kind) + " '" + item.id + "'");
  }
  for (const auto& e : expected)
    if (!seen.count(e))
      throw ValidationError(std::string("missing ordering entry: ") + to_string(e.first) + " '" + e.second + "'");
}

/// Position of an item in the merged ordering.
inline std::size_t merged_position(const Quilt& q, ItemKind kind, const std::string& id) {
  for (std::size_t i = 0; i < q.orderings.merged.size(); ++i)
    if (q.orderings.merged[i].kind == kind && q.orderings.merged[i].id == id) return i;
  throw PreconditionError(std::string("no ordering entry for ") + to_string(kind) + " '" + id + "'");
}

inline const QuiltedEnd& quilted_end(const Quilt& q, const std::string& id, Direction* dir = nullptr) {
  for (const auto& e : q.orderings.ends_in)
    if (e.id == id) {
      if (dir) *dir = Direction::incoming;
      return e;
    }
  for (const auto& e : q.orderings.ends_out)
    if (e.id == id) {
      if (dir) *dir = Direction::outgoing;
      return e;
    }
  throw PreconditionError("unknown quilted end '" + id + "'");
}

/// Fills in orderings.ends_* from the seams (ids e1, e2, … unless taken) and
/// orderings.merged as circles, then boundary nodes, then ends.
inline void default_orderings(Quilt& q, const std::string& end_prefix = "e") {
  const Layout lay(q);
  q.orderings = {};
  std::size_t k = 0;
  for (const auto& ch : compute_chains(lay)) {
    QuiltedEnd qe{end_prefix + std::to_string(++k), ch.points};
    (ch.direction == Direction::incoming ? q.orderings.ends_in : q.orderings.ends_out).push_back(std::move(qe));
  }
  for (const auto& p : q.patches)
    for (const auto& c : p.circles)
      if (lay.has_true_boundary(c.id)) q.orderings.merged.push_back({ItemKind::circle, c.id});
  for (const auto& n : q.boundary_nodes) q.orderings.merged.push_back({ItemKind::node, n.id});
  for (const auto& e : q.orderings.ends_in) q.orderings.merged.push_back({ItemKind::end, e.id});
  for (const auto& e : q.orderings.ends_out) q.orderings.merged.push_back({ItemKind::end, e.id});
}

/// Connected components of patches, joined through seams and nodes.
inline std::vector<std::vector<std::string>> components(const Quilt& q) {
  const Layout lay(q);
  std::vector<std::size_t> parent(q.patches.size());
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto unite = [&](std::size_t a, std::size_t b) { parent[find(a)] = find(b); };
  for (const auto& s : q.seams) unite(lay.circle_loc(s.minus.circle).first, lay.circle_loc(s.plus.circle).first);
  for (const auto& n : q.boundary_nodes) unite(lay.point_loc(n.minus).patch, lay.point_loc(n.plus).patch);
  for (const auto& n : q.interior_nodes) unite(lay.patch_index(n.first), lay.patch_index(n.second));
  std::map<std::size_t, std::vector<std::string>> groups;
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < q.patches.size(); ++i) {
    auto r = find(i);
    if (!groups.count(r)) order.push_back(r);
    groups[r].push_back(q.patches[i].id);
  }
  std::vector<std::vector<std::string>> out;
  for (auto r : order) out.push_back(groups[r]);
  return out;
}

/// How a surgery moved things around; consumed by label transport.
struct SurgeryTrace {
  enum class Kind { glue_ends, boundary_node, interior_node, insert_arc, insert_circle, insert_nonseparating, compose };
  Kind kind = Kind::glue_ends;
  /// Old segment → new segments carrying pieces of it (first = label target).
  std::map<SegmentRef, std::vector<SegmentRef>> segments;
  /// Old patch id → new patch id.
  std::map<std::string, std::string> patches;
  /// Old seam id → new seam id; removed seams are absent.
  std::map<std::string, std::string> seams;
  std::vector<std::string> removed_ends;
  std::vector<std::string> removed_nodes;
  /// Insertions: the new seams and the patch S′ holding their first side.
  std::vector<std::string> new_seams;
  std::string cut_patch;
  std::string new_patch;
  /// Composition: the strip removed and the two seams fused.
  std::string strip_patch;
  std::string kept_seam;
  std::string removed_seam;
  bool kept_strip_side_minus = false;
  bool removed_strip_side_minus = false;
};

struct SurgeryResult {
  Quilt quilt;
  SurgeryTrace trace;
};

namespace detail {

inline std::string fresh_id(const std::string& base, const std::set<std::string>& taken, const std::string& suffix) {
  std::string id = base + suffix;
  while (taken.count(id)) id += suffix;
  return id;
}

inline std::set<std::string> all_ids(const Quilt& q) {
  std::set<std::string> ids;
  for (const auto& p : q.patches) {
    ids.insert(p.id);
    for (const auto& c : p.circles) {
      ids.insert(c.id);
      ids.insert(c.points.begin(), c.points.end());
    }
  }
  for (const auto& s : q.seams) ids.insert(s.id);
  for (const auto& n : q.boundary_nodes) ids.insert(n.id);
  for (const auto& n : q.interior_nodes) ids.insert(n.id);
  for (const auto& e : q.orderings.ends_in) ids.insert(e.id);
  for (const auto& e : q.orderings.ends_out) ids.insert(e.id);
  return ids;
}

/// Working copy of the boundary in which each arc (from a marked point to the
/// next) remembers the original segments it is made of.
struct WCircle {
  std::string id;
  std::vector<std::string> points;
  std::vector<std::vector<SegmentRef>> arcs;  // arcs[i] runs from points[i] to points[i+1]
  std::vector<SegmentRef> loop;               // used when points is empty
};

struct WPatch {
  std::string id;
  std::int64_t genus = 0;
  std::vector<WCircle> circles;
  std::vector<End> ends;
};

struct Work {
  std::vector<WPatch> patches;

  static Work from(const Quilt& q) {
    const Layout lay(q);
    Work w;
    for (const auto& p : q.patches) {
      WPatch wp{p.id, p.genus, {}, p.ends};
      for (const auto& c : p.circles) {
        WCircle wc{c.id, c.points, {}, {}};
        if (c.points.empty()) {
          wc.loop = {SegmentRef{c.id, ""}};
        } else {
          for (const auto& pt : c.points) {
            if (lay.is_end(pt))
              wc.arcs.push_back({SegmentRef{c.id, pt}});
            else
              wc.arcs.push_back({lay.segment_containing(pt)});
          }
        }
        wp.circles.push_back(std::move(wc));
      }
      w.patches.push_back(std::move(wp));
    }
    return w;
  }

  struct Loc {
    std::size_t patch, circle, pos;
  };

  Loc find_point(const std::string& pt) const {
    for (std::size_t p = 0; p < patches.size(); ++p)
      for (std::size_t c = 0; c < patches[p].circles.size(); ++c) {
        const auto& pts = patches[p].circles[c].points;
        auto it = std::find(pts.begin(), pts.end(), pt);
        if (it != pts.end()) return {p, c, static_cast<std::size_t>(it - pts.begin())};
      }
    throw PreconditionError("unknown marked point '" + pt + "'");
  }

  std::size_t find_patch(const std::string& id) const {
    for (std::size_t p = 0; p < patches.size(); ++p)
      if (patches[p].id == id) return p;
    throw PreconditionError("unknown patch '" + id + "'");
  }

  /// Joins the boundary at two marked points and removes them. Returns the
  /// new circles, the first traced from the arc after `zplus`.
  std::vector<WCircle> trace_splice(const std::string& zplus, const std::string& zminus) const {
    const Loc lp = find_point(zplus), lm = find_point(zminus);
    auto partner = [&](const std::string& r) { return r == zplus ? zminus : zplus; };
    std::set<std::pair<std::size_t, std::size_t>> visited;  // (circle key, pos)
    auto key = [&](const Loc& l) { return l.patch * 100000 + l.circle; };
    std::vector<WCircle> out;
    for (const Loc& start : {lp, lm}) {
      if (visited.count({key(start), start.pos})) continue;
      WCircle nc;
      std::vector<SegmentRef> pending;
      Loc cur = start;
      std::vector<std::vector<SegmentRef>> arcs_into;
      while (true) {
        if (!visited.insert({key(cur), cur.pos}).second) break;
        const auto& circ = patches[cur.patch].circles[cur.circle];
        const auto& arc = circ.arcs[cur.pos];
        pending.insert(pending.end(), arc.begin(), arc.end());
        const std::size_t next = (cur.pos + 1) % circ.points.size();
        const std::string& target = circ.points[next];
        if (target == zplus || target == zminus) {
          cur = find_point(partner(target));
        } else {
          nc.points.push_back(target);
          arcs_into.push_back(std::move(pending));
          pending.clear();
          cur = Loc{cur.patch, cur.circle, next};
        }
      }
      if (nc.points.empty()) {
        nc.loop = std::move(pending);
      } else {
        // arcs_into[i] ends at points[i]; arc after points[i] is arcs_into[i+1]
        auto& first = arcs_into.front();
        first.insert(first.begin(), pending.begin(), pending.end());
        for (std::size_t i = 0; i < nc.points.size(); ++i)
          nc.arcs.push_back(arcs_into[(i + 1) % nc.points.size()]);
      }
      out.push_back(std::move(nc));
    }
    return out;
  }
};

/// Segments of a finished quilt and the original segments they contain.
inline std::map<SegmentRef, std::vector<SegmentRef>> segment_origins(const Work& w) {
  std::set<std::string> end_points;
  for (const auto& p : w.patches)
    for (const auto& e : p.ends) end_points.insert(e.point);
  std::map<SegmentRef, std::vector<SegmentRef>> out;
  for (const auto& p : w.patches)
    for (const auto& c : p.circles) {
      std::vector<std::size_t> ends;
      for (std::size_t i = 0; i < c.points.size(); ++i)
        if (end_points.count(c.points[i])) ends.push_back(i);
      auto add = [&](const SegmentRef& seg, const std::vector<SegmentRef>& origins) {
        auto& v = out[seg];
        for (const auto& o : origins)
          if (std::find(v.begin(), v.end(), o) == v.end()) v.push_back(o);
      };
      if (c.points.empty()) {
        add({c.id, ""}, c.loop);
        continue;
      }
      for (std::size_t i = 0; i < c.points.size(); ++i) {
        std::string key;
        for (std::size_t step = 0; step < c.points.size(); ++step) {
          const std::size_t j = (i + c.points.size() - step) % c.points.size();
          if (end_points.count(c.points[j])) {
            key = c.points[j];
            break;
          }
        }
        add({c.id, key}, c.arcs[i]);
      }
      if (ends.empty()) out[{c.id, ""}];
    }
  return out;
}

inline void rebuild_end_orderings(const Quilt& old, Quilt& q, SurgeryTrace& trace) {
  const Layout lay(q);
  auto chains = compute_chains(lay);
  std::map<std::string, const Chain*> chain_of;
  for (const auto& ch : chains)
    for (const auto& pt : ch.points) chain_of[pt] = &ch;
  std::set<const Chain*> placed;
  auto rebuild = [&](const std::vector<QuiltedEnd>& list) {
    std::vector<QuiltedEnd> out;
    for (const auto& qe : list) {
      const Chain* ch = nullptr;
      std::string anchor;
      for (const auto& pt : qe.chain)
        if (chain_of.count(pt)) {
          if (!ch) anchor = pt;
          if (ch && ch != chain_of[pt]) throw PreconditionError("surgery splits quilted end '" + qe.id + "'");
          ch = chain_of[pt];
        }
      if (!ch) {
        trace.removed_ends.push_back(qe.id);
        continue;
      }
      if (!placed.insert(ch).second) throw PreconditionError("surgery merges two quilted ends into one chain");
      std::vector<std::string> pts = ch->points;
      if (ch->cyclic) {
        auto it = std::find(pts.begin(), pts.end(), anchor);
        std::rotate(pts.begin(), it, pts.end());
      }
      out.push_back({qe.id, pts});
    }
    return out;
  };
  q.orderings.ends_in = rebuild(old.orderings.ends_in);
  q.orderings.ends_out = rebuild(old.orderings.ends_out);
  std::set<std::string> taken = all_ids(q);
  for (const auto& ch : chains) {
    if (placed.count(&ch)) continue;
    QuiltedEnd qe{fresh_id("e", taken, "+"), ch.points};
    taken.insert(qe.id);
    (ch.direction == Direction::incoming ? q.orderings.ends_in : q.orderings.ends_out).push_back(qe);
  }
}

/// New merged ordering. circle_map sends old circle ids to their successors
/// in order; merged successors take the place of the earliest predecessor.
inline void rebuild_merged(const Quilt& old, Quilt& q, const std::map<std::string, std::vector<std::string>>& circle_map) {
  const Layout lay(q);
  std::set<std::string> end_ids;
  for (const auto& e : q.orderings.ends_in) end_ids.insert(e.id);
  for (const auto& e : q.orderings.ends_out) end_ids.insert(e.id);
  std::set<std::string> node_ids;
  for (const auto& n : q.boundary_nodes) node_ids.insert(n.id);
  std::vector<OrderItem> merged;
  std::set<std::pair<ItemKind, std::string>> seen;
  auto push = [&](ItemKind k, const std::string& id) {
    if (seen.insert({k, id}).second) merged.push_back({k, id});
  };
  for (const auto& item : old.orderings.merged) {
    switch (item.kind) {
      case ItemKind::circle: {
        auto it = circle_map.find(item.id);
        std::vector<std::string> succ = it == circle_map.end() ? std::vector<std::string>{item.id} : it->second;
        for (const auto& c : succ)
          if (lay.has_circle(c) && lay.has_true_boundary(c)) push(ItemKind::circle, c);
        break;
      }
      case ItemKind::node:
        if (node_ids.count(item.id)) push(ItemKind::node, item.id);
        break;
      case ItemKind::end:
        if (end_ids.count(item.id)) push(ItemKind::end, item.id);
        break;
    }
  }
  for (const auto& p : q.patches)
    for (const auto& c : p.circles)
      if (lay.has_true_boundary(c.id)) push(ItemKind::circle, c.id);
  for (const auto& n : q.boundary_nodes) push(ItemKind::node, n.id);
  for (const auto& e : q.orderings.ends_in) push(ItemKind::end, e.id);
  for (const auto& e : q.orderings.ends_out) push(ItemKind::end, e.id);
  q.orderings.merged = std::move(merged);
}

/// Turns the working boundary back into a quilt: recomputes segments, maps
/// and fuses seams, and records the segment trace.
inline Quilt finish(const Quilt& old, const Work& w, SurgeryTrace& trace,
                    const std::map<std::string, std::vector<std::string>>& circle_map,
                    const std::vector<Seam>& extra_seams = {}) {
  Quilt q;
  for (const auto& wp : w.patches) {
    Patch p{wp.id, wp.genus, {}, wp.ends};
    for (const auto& wc : wp.circles) p.circles.push_back({wc.id, wc.points});
    q.patches.push_back(std::move(p));
  }
  q.boundary_nodes = old.boundary_nodes;
  q.interior_nodes = old.interior_nodes;

  const auto origins = segment_origins(w);
  trace.segments.clear();
  for (const auto& [seg, origs] : origins)
    for (const auto& o : origs) trace.segments[o];
  // first piece in (patch, circle, segment) order
  for (const auto& p : q.patches)
    for (const auto& c : p.circles)
      for (const auto& [seg, origs] : origins) {
        if (seg.circle != c.id) continue;
        for (const auto& o : origs) {
          auto& v = trace.segments[o];
          if (std::find(v.begin(), v.end(), seg) == v.end()) v.push_back(seg);
        }
      }

  const Layout old_lay(old);
  std::map<SegmentRef, std::size_t> seam_of;
  for (std::size_t i = 0; i < old.seams.size(); ++i) {
    seam_of[old.seams[i].minus] = i;
    seam_of[old.seams[i].plus] = i;
  }
  auto image = [&](const SegmentRef& s) -> SegmentRef {
    auto it = trace.segments.find(s);
    if (it == trace.segments.end() || it->second.size() != 1)
      throw PreconditionError("incompatible end profiles: seamed segment " + to_string(s) + " does not survive intact");
    return it->second.front();
  };
  for (const auto& [seg, origs] : origins) {
    bool seamed = false, unseamed = false;
    for (const auto& o : origs) (seam_of.count(o) ? seamed : unseamed) = true;
    if (seamed && unseamed)
      throw PreconditionError("incompatible end profiles: segment " + to_string(seg) + " mixes seam and true boundary");
  }
  std::map<std::pair<SegmentRef, SegmentRef>, std::string> fused;
  for (const auto& s : old.seams) {
    Seam ns{s.id, image(s.minus), image(s.plus)};
    if (ns.minus == ns.plus) throw PreconditionError("incompatible end profiles: seam '" + s.id + "' closes on itself");
    auto key = std::minmax(ns.minus, ns.plus);
    auto it = fused.find(key);
    if (it != fused.end()) {
      trace.seams[s.id] = it->second;
      continue;
    }
    fused[key] = s.id;
    trace.seams[s.id] = s.id;
    q.seams.push_back(ns);
  }
  for (const auto& s : extra_seams) {
    trace.new_seams.push_back(s.id);
    q.seams.push_back(s);
  }
  // a segment may carry only one seam side
  std::set<SegmentRef> sides;
  for (const auto& s : q.seams)
    for (const auto& side : {s.minus, s.plus})
      if (!sides.insert(side).second)
        throw PreconditionError("incompatible end profiles: segment " + to_string(side) + " carries two seams");

  rebuild_end_orderings(old, q, trace);
  rebuild_merged(old, q, circle_map);
  return q;
}

/// Merges patch `b` into patch `a` (a keeps its id and position). The circles
/// of b follow those of a.
inline void merge_patches(Work& w, std::size_t a, std::size_t b, std::int64_t extra_genus, SurgeryTrace& trace) {
  auto& pa = w.patches[a];
  auto& pb = w.patches[b];
  pa.genus += pb.genus + extra_genus;
  for (auto& c : pb.circles) pa.circles.push_back(std::move(c));
  for (auto& e : pb.ends) pa.ends.push_back(std::move(e));
  trace.patches[pb.id] = pa.id;
  w.patches.erase(w.patches.begin() + static_cast<std::ptrdiff_t>(b));
}

inline std::size_t circle_rank(const Quilt& q, const std::string& circle_id) {
  for (std::size_t i = 0; i < q.orderings.merged.size(); ++i)
    if (q.orderings.merged[i].kind == ItemKind::circle && q.orderings.merged[i].id == circle_id) return i;
  std::size_t k = q.orderings.merged.size();
  for (const auto& p : q.patches)
    for (const auto& c : p.circles) {
      if (c.id == circle_id) return k;
      ++k;
    }
  return k;
}

/// Splices at (zplus, zminus) and updates patch topology. For a circle split,
/// `plus_piece_first` puts the piece traced from zplus first.
inline std::map<std::string, std::vector<std::string>> splice(const Quilt& old, Work& w, const std::string& zplus,
                                                              const std::string& zminus, bool plus_piece_first,
                                                              SurgeryTrace& trace, std::set<std::string>& taken) {
  const auto lp = w.find_point(zplus);
  const auto lm = w.find_point(zminus);
  const std::string cplus = w.patches[lp.patch].circles[lp.circle].id;
  const std::string cminus = w.patches[lm.patch].circles[lm.circle].id;
  auto pieces = w.trace_splice(zplus, zminus);
  for (auto* pt : {&zplus, &zminus})
    for (auto& p : w.patches)
      p.ends.erase(std::remove_if(p.ends.begin(), p.ends.end(), [&](const End& e) { return e.point == *pt; }),
                   p.ends.end());
  std::map<std::string, std::vector<std::string>> cmap;
  if (cplus == cminus) {
    pieces[0].id = cplus;
    pieces[1].id = fresh_id(cplus, taken, "~");
    taken.insert(pieces[1].id);
    auto& circles = w.patches[lp.patch].circles;
    const auto at = circles.begin() + static_cast<std::ptrdiff_t>(lp.circle);
    if (!plus_piece_first) std::swap(pieces[0], pieces[1]);
    *at = std::move(pieces[0]);
    circles.insert(at + 1, std::move(pieces[1]));
    cmap[cplus] = {circles[lp.circle].id, circles[lp.circle + 1].id};
    return cmap;
  }
  const bool plus_earlier = circle_rank(old, cplus) <= circle_rank(old, cminus);
  const std::string keep = plus_earlier ? cplus : cminus;
  pieces[0].id = keep;
  cmap[cplus] = {keep};
  cmap[cminus] = {keep};
  if (lp.patch == lm.patch) {
    auto& circles = w.patches[lp.patch].circles;
    const std::size_t keep_pos = plus_earlier ? lp.circle : lm.circle;
    const std::size_t drop_pos = plus_earlier ? lm.circle : lp.circle;
    circles[keep_pos] = std::move(pieces[0]);
    circles.erase(circles.begin() + static_cast<std::ptrdiff_t>(drop_pos));
    w.patches[lp.patch].genus += 1;
    return cmap;
  }
  const std::size_t a = std::min(lp.patch, lm.patch), b = std::max(lp.patch, lm.patch);
  // the merged circle sits where the circle of the earlier patch was
  const std::size_t a_circle = a == lp.patch ? lp.circle : lm.circle;
  const std::size_t b_circle = a == lp.patch ? lm.circle : lp.circle;
  w.patches[a].circles[a_circle] = std::move(pieces[0]);
  w.patches[b].circles.erase(w.patches[b].circles.begin() + static_cast<std::ptrdiff_t>(b_circle));
  merge_patches(w, a, b, 0, trace);
  return cmap;
}

inline void compose_maps(std::map<std::string, std::vector<std::string>>& acc,
                         const std::map<std::string, std::vector<std::string>>& step) {
  for (auto& [k, v] : acc) {
    std::vector<std::string> nv;
    for (const auto& c : v) {
      auto it = step.find(c);
      if (it == step.end()) {
        nv.push_back(c);
      } else {
        for (const auto& x : it->second)
          if (std::find(nv.begin(), nv.end(), x) == nv.end()) nv.push_back(x);
      }
    }
    v = nv;
  }
  for (const auto& [k, v] : step)
    if (!acc.count(k)) acc[k] = v;
}

}  // namespace detail

/// Glues the outgoing quilted end `e_plus` to the incoming quilted end
/// `e_minus`, position by position.
inline SurgeryResult glue_strip_ends_traced(const Quilt& q, const std::string& e_plus, const std::string& e_minus) {
  validate(q);
  Direction dp, dm;
  const auto& qp = quilted_end(q, e_plus, &dp);
  const auto& qm = quilted_end(q, e_minus, &dm);
  if (dp != Direction::outgoing || dm != Direction::incoming)
    throw PreconditionError("incompatible end profiles: glue needs an outgoing and an incoming quilted end");
  if (qp.chain.size() != qm.chain.size())
    throw PreconditionError("incompatible end profiles: chain lengths " + std::to_string(qp.chain.size()) + " and " +
                            std::to_string(qm.chain.size()));
  const Layout lay(q);
  for (std::size_t i = 0; i < qp.chain.size(); ++i)
    if (lay.end_at(qp.chain[i]).width != lay.end_at(qm.chain[i]).width)
      throw PreconditionError("incompatible end profiles: widths differ at position " + std::to_string(i));
  SurgeryResult r;
  r.trace.kind = SurgeryTrace::Kind::glue_ends;
  auto w = detail::Work::from(q);
  auto taken = detail::all_ids(q);
  std::map<std::string, std::vector<std::string>> cmap;
  Quilt current = q;
  for (std::size_t i = 0; i < qp.chain.size(); ++i) {
    auto step = detail::splice(current, w, qp.chain[i], qm.chain[i], true, r.trace, taken);
    detail::compose_maps(cmap, step);
    // keep circle ranks meaningful for later steps
    for (auto& item : current.orderings.merged)
      if (item.kind == ItemKind::circle && step.count(item.id)) item.id = step.at(item.id).front();
  }
  r.quilt = detail::finish(q, w, r.trace, cmap);
  validate(r.quilt);
  return r;
}

inline Quilt glue_strip_ends(const Quilt& q, const std::string& e_plus, const std::string& e_minus) {
  return glue_strip_ends_traced(q, e_plus, e_minus).quilt;
}

/// Deforms a boundary node. For a node joining a circle to itself,
/// `segment_first` puts the circle containing the segment from w₋ to w₊ first.
inline SurgeryResult deform_boundary_node_traced(const Quilt& q, std::size_t node_index, bool segment_first = true) {
  validate(q);
  if (node_index >= q.boundary_nodes.size())
    throw PreconditionError("boundary node index " + std::to_string(node_index) + " out of range");
  const auto node = q.boundary_nodes[node_index];
  SurgeryResult r;
  r.trace.kind = SurgeryTrace::Kind::boundary_node;
  auto w = detail::Work::from(q);
  auto taken = detail::all_ids(q);
  // the piece traced from w₋ runs from w₋ to w₊
  auto cmap = detail::splice(q, w, node.minus, node.plus, segment_first, r.trace, taken);
  Quilt mid = q;
  mid.boundary_nodes.erase(mid.boundary_nodes.begin() + static_cast<std::ptrdiff_t>(node_index));
  r.trace.removed_nodes.push_back(node.id);
  r.quilt = detail::finish(mid, w, r.trace, cmap);
  validate(r.quilt);
  return r;
}

inline Quilt deform_boundary_node(const Quilt& q, std::size_t node_index) {
  return deform_boundary_node_traced(q, node_index).quilt;
}

inline SurgeryResult deform_interior_node_traced(const Quilt& q, std::size_t node_index) {
  validate(q);
  if (node_index >= q.interior_nodes.size())
    throw PreconditionError("interior node index " + std::to_string(node_index) + " out of range");
  const auto node = q.interior_nodes[node_index];
  SurgeryResult r;
  r.trace.kind = SurgeryTrace::Kind::interior_node;
  auto w = detail::Work::from(q);
  const std::size_t a = w.find_patch(node.first), b = w.find_patch(node.second);
  if (a == b)
    w.patches[a].genus += 1;
  else
    detail::merge_patches(w, std::min(a, b), std::max(a, b), 0, r.trace);
  Quilt mid = q;
  mid.interior_nodes.erase(mid.interior_nodes.begin() + static_cast<std::ptrdiff_t>(node_index));
  r.trace.removed_nodes.push_back(node.id);
  r.quilt = detail::finish(mid, w, r.trace, {});
  for (auto& n : r.quilt.interior_nodes)
    for (auto* pid : {&n.first, &n.second})
      if (r.trace.patches.count(*pid)) *pid = r.trace.patches.at(*pid);
  validate(r.quilt);
  return r;
}

inline Quilt deform_interior_node(const Quilt& q, std::size_t node_index) {
  return deform_interior_node_traced(q, node_index).quilt;
}

/// Cut descriptor for insert_diagonal_seam. Circles listed in
/// `circles_first` and genus `genus_first` go to the new patch S′, the rest
/// stays on S″ (which keeps the patch id).
struct Cut {
  enum class Kind { circle, arc };
  Kind kind = Kind::circle;
  bool separating = true;  // circle cuts only
  std::string from_end;    // arc cuts: two end points on one circle
  std::string to_end;
  std::vector<std::string> circles_first;
  std::int64_t genus_first = 0;
};

inline SurgeryResult insert_diagonal_seam_traced(const Quilt& q, const std::string& patch_id, const Cut& cut) {
  validate(q);
  const Layout lay(q);
  const std::size_t pi = lay.patch_index(patch_id);
  const Patch& src = q.patches[pi];
  auto taken = detail::all_ids(q);
  auto fresh = [&](const std::string& base) {
    auto id = detail::fresh_id(base, taken, "'");
    taken.insert(id);
    return id;
  };
  SurgeryResult r;
  auto w = detail::Work::from(q);
  detail::WPatch whole = w.patches[pi];
  std::map<std::string, std::vector<std::string>> cmap;

  for (const auto& c : cut.circles_first)
    if (!lay.has_circle(c) || lay.circle_loc(c).first != pi)
      throw PreconditionError("cut lists circle '" + c + "' that is not on patch '" + patch_id + "'");
  auto goes_first = [&](const std::string& c) {
    return std::find(cut.circles_first.begin(), cut.circles_first.end(), c) != cut.circles_first.end();
  };
  auto end_on = [&](const detail::WCircle& c, const End& e) {
    return std::find(c.points.begin(), c.points.end(), e.point) != c.points.end();
  };

  detail::WPatch first{fresh(patch_id), 0, {}, {}};
  detail::WPatch second{patch_id, 0, {}, {}};
  r.trace.cut_patch = patch_id;
  r.trace.new_patch = first.id;

  if (cut.kind == Cut::Kind::circle && !cut.separating) {
    if (src.genus < 1) throw PreconditionError("non-separating circle cut needs genus >= 1");
    if (!cut.circles_first.empty() || cut.genus_first != 0)
      throw PreconditionError("non-separating cut splits off an annulus; no circles or genus can move");
    r.trace.kind = SurgeryTrace::Kind::insert_nonseparating;
    const std::string i1 = fresh(patch_id + ".cut1"), i2 = fresh(patch_id + ".cut2");
    const std::string j1 = fresh(patch_id + ".cut1"), j2 = fresh(patch_id + ".cut2");
    first.circles = {{i1, {}, {}, {SegmentRef{"", "new:" + i1}}}, {i2, {}, {}, {SegmentRef{"", "new:" + i2}}}};
    second.genus = src.genus - 1;
    second.circles = {{j1, {}, {}, {SegmentRef{"", "new:" + j1}}}, {j2, {}, {}, {SegmentRef{"", "new:" + j2}}}};
    for (auto& c : whole.circles) second.circles.push_back(c);
    second.ends = whole.ends;
    w.patches[pi] = second;
    w.patches.insert(w.patches.begin() + static_cast<std::ptrdiff_t>(pi), first);
    std::vector<Seam> extra{{fresh(patch_id + ".delta"), {i1, ""}, {j1, ""}},
                            {fresh(patch_id + ".delta"), {i2, ""}, {j2, ""}}};
    r.quilt = detail::finish(q, w, r.trace, cmap, extra);
    validate(r.quilt);
    return r;
  }

  if (cut.genus_first < 0 || cut.genus_first > src.genus)
    throw PreconditionError("cut genus_first out of range for patch '" + patch_id + "'");
  first.genus = cut.genus_first;
  second.genus = src.genus - cut.genus_first;
  std::vector<Seam> extra;

  if (cut.kind == Cut::Kind::circle) {
    r.trace.kind = SurgeryTrace::Kind::insert_circle;
    for (const auto& c : whole.circles) (goes_first(c.id) ? first : second).circles.push_back(c);
    const std::string i1 = fresh(patch_id + ".cut"), i2 = fresh(patch_id + ".cut");
    first.circles.push_back({i1, {}, {}, {SegmentRef{"", "new:" + i1}}});
    second.circles.insert(second.circles.begin(), {i2, {}, {}, {SegmentRef{"", "new:" + i2}}});
    extra.push_back({fresh(patch_id + ".delta"), {i1, ""}, {i2, ""}});
  } else {
    r.trace.kind = SurgeryTrace::Kind::insert_arc;
    if (!lay.has_point(cut.from_end) || !lay.has_point(cut.to_end) || !lay.is_end(cut.from_end) ||
        !lay.is_end(cut.to_end) || cut.from_end == cut.to_end)
      throw PreconditionError("arc cut must join two distinct ends");
    const auto la = lay.point_loc(cut.from_end), lb = lay.point_loc(cut.to_end);
    if (la.patch != pi || lb.patch != pi || la.circle != lb.circle)
      throw PreconditionError("non-separating descriptor: arc ends must lie on one boundary circle of the patch");
    const auto& wc = whole.circles[la.circle];
    if (goes_first(wc.id)) throw PreconditionError("the cut circle itself cannot be listed in circles_first");
    const std::size_t k = wc.points.size();
    // C = (z_a, A, z_b, B) → C' = (z_a', A, z_b') on S', C'' = (z_b, B, z_a) on S''
    const std::string za = cut.from_end, zb = cut.to_end;
    const std::string za2 = fresh(za), zb2 = fresh(zb);
    detail::WCircle c1{fresh(wc.id), {za2}, {}, {}};
    detail::WCircle c2{wc.id, {zb}, {}, {}};
    c1.arcs.push_back(wc.arcs[la.pos]);
    for (std::size_t i = (la.pos + 1) % k; i != lb.pos; i = (i + 1) % k) {
      c1.points.push_back(wc.points[i]);
      c1.arcs.push_back(wc.arcs[i]);
    }
    c1.points.push_back(zb2);
    c1.arcs.push_back({SegmentRef{"", "new:" + zb2}});
    c2.arcs.push_back(wc.arcs[lb.pos]);
    for (std::size_t i = (lb.pos + 1) % k; i != la.pos; i = (i + 1) % k) {
      c2.points.push_back(wc.points[i]);
      c2.arcs.push_back(wc.arcs[i]);
    }
    c2.points.push_back(za);
    c2.arcs.push_back({SegmentRef{"", "new:" + za}});
    cmap[wc.id] = {c1.id, c2.id};
    first.circles.push_back(c1);
    for (std::size_t ci = 0; ci < whole.circles.size(); ++ci) {
      if (ci == la.circle)
        second.circles.push_back(c2);
      else
        (goes_first(whole.circles[ci].id) ? first : second).circles.push_back(whole.circles[ci]);
    }
    for (const auto& e : whole.ends) {
      End half = e;
      if (e.point == za || e.point == zb) {
        half.width = e.width / 2;
        second.ends.push_back(half);
        End copy = half;
        copy.point = e.point == za ? za2 : zb2;
        first.ends.push_back(copy);
      }
    }
    extra.push_back({fresh(patch_id + ".delta"), {c1.id, zb2}, {wc.id, za}});
  }
  for (const auto& e : whole.ends) {
    if (e.point == cut.from_end || e.point == cut.to_end) continue;
    bool in_first = false;
    for (const auto& c : first.circles) in_first = in_first || end_on(c, e);
    (in_first ? first : second).ends.push_back(e);
  }
  w.patches[pi] = second;
  w.patches.insert(w.patches.begin() + static_cast<std::ptrdiff_t>(pi), first);
  r.trace.patches[patch_id] = patch_id;
  r.quilt = detail::finish(q, w, r.trace, cmap, extra);
  validate(r.quilt);
  return r;
}

inline Quilt insert_diagonal_seam(const Quilt& q, const std::string& patch_id, const Cut& cut) {
  return insert_diagonal_seam_traced(q, patch_id, cut).quilt;
}

/// Removes a strip patch and fuses its two seams. The end width of the strip
/// is handed to its chain neighbour across the later-listed seam.
inline SurgeryResult compose_seams_traced(const Quilt& q, const std::string& strip_patch_id) {
  validate(q);
  const Layout lay(q);
  const std::size_t pi = lay.patch_index(strip_patch_id);
  const Patch& strip = q.patches[pi];
  auto fail = [&](const std::string& why) {
    throw PreconditionError("patch '" + strip_patch_id + "' is not a removable strip: " + why);
  };
  if (strip.genus != 0 || strip.circles.size() != 1) fail("needs genus 0 and one boundary circle");
  if (strip.ends.size() != 2 || strip.ends[0].direction == strip.ends[1].direction)
    fail("needs one incoming and one outgoing end");
  const auto segs = lay.segments(strip.circles[0].id);
  if (segs.size() != 2) fail("needs exactly two boundary segments");
  std::vector<std::size_t> seam_idx;
  for (const auto& s : segs) {
    auto si = lay.seam_on(s);
    if (!si) fail("segment " + to_string(s) + " is true boundary");
    seam_idx.push_back(*si);
  }
  if (seam_idx[0] == seam_idx[1]) fail("both sides lie on one seam");
  std::sort(seam_idx.begin(), seam_idx.end());
  const Seam s1 = q.seams[seam_idx[0]], s2 = q.seams[seam_idx[1]];
  auto on_strip = [&](const SegmentRef& s) { return lay.circle_loc(s.circle).first == pi; };
  if (on_strip(s1.minus) == on_strip(s1.plus) || on_strip(s2.minus) == on_strip(s2.plus))
    fail("a seam joins the strip to itself");

  SurgeryResult r;
  r.trace.kind = SurgeryTrace::Kind::compose;
  r.trace.strip_patch = strip_patch_id;
  r.trace.kept_seam = s1.id;
  r.trace.removed_seam = s2.id;
  r.trace.kept_strip_side_minus = on_strip(s1.minus);
  r.trace.removed_strip_side_minus = on_strip(s2.minus);

  // width hand-off across the removed seam
  Quilt mid = q;
  const SegmentRef x2 = r.trace.removed_strip_side_minus ? s2.minus : s2.plus;
  const SegmentRef y2 = r.trace.removed_strip_side_minus ? s2.plus : s2.minus;
  const std::pair<std::string, std::string> handoff[2] = {{x2.after, lay.segment_stop(y2)},
                                                          {lay.segment_stop(x2), y2.after}};
  for (const auto& [from, to] : handoff) {
    const Rational wdt = lay.end_at(from).width;
    for (auto& p : mid.patches)
      for (auto& e : p.ends)
        if (e.point == to) e.width += wdt;
  }
  Seam fused = s1;
  SegmentRef other2 = y2;
  (r.trace.kept_strip_side_minus ? fused.minus : fused.plus) = other2;
  mid.seams.clear();
  for (const auto& s : q.seams) {
    if (s.id == s1.id)
      mid.seams.push_back(fused);
    else if (s.id != s2.id)
      mid.seams.push_back(s);
  }
  for (const auto& s : q.seams)
    if (s.id != s2.id) r.trace.seams[s.id] = s.id;
  r.trace.seams[s2.id] = s1.id;
  r.trace.patches[strip_patch_id] = "";
  for (const auto& p : q.patches)
    if (p.id != strip_patch_id) r.trace.patches[p.id] = p.id;
  for (const auto& p : q.patches)
    for (const auto& c : p.circles)
      for (const auto& s : lay.segments(c.id))
        if (p.id != strip_patch_id) r.trace.segments[s] = {s};
  mid.patches.erase(mid.patches.begin() + static_cast<std::ptrdiff_t>(pi));
  for (const auto& n : mid.interior_nodes)
    if (n.first == strip_patch_id || n.second == strip_patch_id) fail("an interior node sits on it");
  Quilt out = mid;
  detail::rebuild_end_orderings(q, out, r.trace);
  detail::rebuild_merged(q, out, {});
  r.quilt = out;
  validate(r.quilt);
  return r;
}

inline Quilt compose_seams(const Quilt& q, const std::string& strip_patch_id) {
  return compose_seams_traced(q, strip_patch_id).quilt;
}

/// Renames every id by position so that quilts differing only in labels
/// compare equal. Circle point lists are rotated to start at their smallest
/// original id; seams are sorted.
inline Quilt canonical_relabel(const Quilt& q) {
  const Layout lay(q);
  std::map<std::string, std::string> pid, cid, ptid, nid, eid;
  Quilt out;
  for (std::size_t p = 0; p < q.patches.size(); ++p) {
    const auto& src = q.patches[p];
    pid[src.id] = "P" + std::to_string(p);
    Patch np{pid[src.id], src.genus, {}, {}};
    for (std::size_t c = 0; c < src.circles.size(); ++c) {
      const auto& circ = src.circles[c];
      cid[circ.id] = np.id + "C" + std::to_string(c);
      std::vector<std::string> pts = circ.points;
      if (!pts.empty()) std::rotate(pts.begin(), std::min_element(pts.begin(), pts.end()), pts.end());
      Circle nc{cid[circ.id], {}};
      for (std::size_t i = 0; i < pts.size(); ++i) {
        ptid[pts[i]] = nc.id + "x" + std::to_string(i);
        nc.points.push_back(ptid[pts[i]]);
      }
      np.circles.push_back(nc);
    }
    out.patches.push_back(std::move(np));
  }
  for (std::size_t p = 0; p < q.patches.size(); ++p) {
    std::vector<End> ends = q.patches[p].ends;
    for (auto& e : ends) e.point = ptid.at(e.point);
    std::sort(ends.begin(), ends.end(), [](const End& a, const End& b) { return a.point < b.point; });
    out.patches[p].ends = ends;
  }
  auto seg = [&](const SegmentRef& s) { return SegmentRef{cid.at(s.circle), s.after.empty() ? "" : ptid.at(s.after)}; };
  for (const auto& s : q.seams) {
    Seam ns{"", seg(s.minus), seg(s.plus)};
    out.seams.push_back(ns);
  }
  std::sort(out.seams.begin(), out.seams.end(),
            [](const Seam& a, const Seam& b) { return std::tie(a.minus, a.plus) < std::tie(b.minus, b.plus); });
  for (std::size_t i = 0; i < out.seams.size(); ++i) out.seams[i].id = "S" + std::to_string(i);
  for (std::size_t i = 0; i < q.boundary_nodes.size(); ++i) {
    const auto& n = q.boundary_nodes[i];
    nid[n.id] = "W" + std::to_string(i);
    out.boundary_nodes.push_back({nid[n.id], ptid.at(n.minus), ptid.at(n.plus)});
  }
  for (std::size_t i = 0; i < q.interior_nodes.size(); ++i) {
    const auto& n = q.interior_nodes[i];
    nid[n.id] = "Z" + std::to_string(i);
    out.interior_nodes.push_back({nid[n.id], pid.at(n.first), pid.at(n.second)});
  }
  auto ends = [&](const std::vector<QuiltedEnd>& list, const std::string& tag) {
    std::vector<QuiltedEnd> v;
    for (std::size_t i = 0; i < list.size(); ++i) {
      eid[list[i].id] = tag + std::to_string(i);
      QuiltedEnd qe{eid[list[i].id], {}};
      for (const auto& pt : list[i].chain) qe.chain.push_back(ptid.at(pt));
      v.push_back(qe);
    }
    return v;
  };
  out.orderings.ends_in = ends(q.orderings.ends_in, "EI");
  out.orderings.ends_out = ends(q.orderings.ends_out, "EO");
  for (const auto& item : q.orderings.merged) {
    const auto& m = item.kind == ItemKind::circle ? cid : item.kind == ItemKind::node ? nid : eid;
    out.orderings.merged.push_back({item.kind, m.at(item.id)});
  }
  return out;
}

inline bool isomorphic(const Quilt& a, const Quilt& b) { return canonical_relabel(a) == canonical_relabel(b); }

}  // namespace quiltsign::surface
