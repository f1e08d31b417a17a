#pragma once

// JSON documents for quilts with labels, integer complexes and cone models.
// Needs nlohmann/json (vendor/json.hpp) on the include path.

#include <json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "quiltsign/cohom.hpp"
#include "quiltsign/error.hpp"
#include "quiltsign/floer.hpp"
#include "quiltsign/index.hpp"
#include "quiltsign/surface.hpp"

namespace quiltsign::doc {

using json = nlohmann::ordered_json;

inline constexpr const char* version = "quiltsign/1";

struct QuiltDocument {
  surface::Quilt quilt;
  std::optional<index::BundleLabel> labels;
  bool operator==(const QuiltDocument&) const = default;
};

struct ComplexDocument {
  std::int64_t N = 0;
  std::vector<floer::Generator> generators;
  std::optional<ZMatrix> boundary;
  std::optional<std::vector<floer::Trajectory>> entries;

  floer::IntComplex complex() const {
    if (boundary) return floer::make_complex(generators, *boundary, N);
    return floer::assemble_boundary(generators, entries ? *entries : std::vector<floer::Trajectory>{}, N);
  }
  bool operator==(const ComplexDocument&) const = default;
};

/// A complex or the graded tensor product of two.
struct HomologyDocument {
  std::vector<ComplexDocument> factors;
  bool operator==(const HomologyDocument&) const = default;
};

struct ConeDocument {
  std::vector<cohom::Cell> source, target;
  std::map<std::string, std::string> map;  // "" for a collapsed cell
  std::vector<std::string> w2_class;

  cohom::ConeComplex cone() const { return {cohom::GF2Complex(source), cohom::GF2Complex(target), map}; }
  bool operator==(const ConeDocument&) const = default;
};

namespace detail {

[[noreturn]] inline void fail(const std::string& where, const std::string& what) {
  throw ParseError(where + ": " + what);
}

inline const json& field(const json& j, const std::string& key, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(where, "missing field '" + key + "'");
  return *it;
}

inline const json* optional_field(const json& j, const std::string& key) {
  auto it = j.find(key);
  return it == j.end() || it->is_null() ? nullptr : &*it;
}

inline std::string str(const json& j, const std::string& where) {
  if (!j.is_string()) fail(where, "expected a string");
  return j.get<std::string>();
}

inline std::int64_t integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(where, "expected an integer");
  return j.get<std::int64_t>();
}

inline const json& array(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array");
  return j;
}

inline std::vector<std::string> strings(const json& j, const std::string& where) {
  std::vector<std::string> out;
  for (const auto& x : array(j, where)) out.push_back(str(x, where));
  return out;
}

inline std::map<std::string, std::int64_t> int_map(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  std::map<std::string, std::int64_t> out;
  for (const auto& [k, v] : j.items()) out[k] = integer(v, where + "." + k);
  return out;
}

inline Rational rational(const json& j, const std::string& where) {
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  if (!j.is_string()) fail(where, "expected an integer or a \"p/q\" string");
  try {
    return Rational(j.get<std::string>());
  } catch (const std::exception&) {
    fail(where, "bad rational '" + j.get<std::string>() + "'");
  }
}

inline void check_version(const json& j) {
  if (!j.is_object()) fail("document", "expected an object");
  if (auto* v = optional_field(j, "version"); v && str(*v, "version") != version)
    fail("version", "unsupported version '" + v->get<std::string>() + "'");
}

inline surface::SegmentRef segment(const json& j, const std::string& where) {
  surface::SegmentRef s{str(field(j, "circle", where), where + ".circle"), ""};
  if (auto* a = optional_field(j, "after")) s.after = str(*a, where + ".after");
  return s;
}

inline json segment_json(const surface::SegmentRef& s) {
  json j{{"circle", s.circle}};
  if (!s.after.empty()) j["after"] = s.after;
  return j;
}

inline surface::ItemKind item_kind(const std::string& s, const std::string& where) {
  if (s == "circle") return surface::ItemKind::circle;
  if (s == "node") return surface::ItemKind::node;
  if (s == "end") return surface::ItemKind::end;
  fail(where, "unknown item kind '" + s + "'");
}

inline std::vector<surface::QuiltedEnd> quilted_ends(const json& j, const std::string& where) {
  std::vector<surface::QuiltedEnd> out;
  for (const auto& e : array(j, where))
    out.push_back({str(field(e, "id", where), where + ".id"), strings(field(e, "chain", where), where + ".chain")});
  return out;
}

inline json quilted_ends_json(const std::vector<surface::QuiltedEnd>& es) {
  json a = json::array();
  for (const auto& e : es) a.push_back({{"id", e.id}, {"chain", e.chain}});
  return a;
}

inline std::string rational_string(const Rational& r) { return r.str(); }

inline std::vector<cohom::Cell> cells(const json& j, const std::string& where) {
  std::vector<cohom::Cell> out;
  for (const auto& c : array(field(j, "cells", where), where + ".cells")) {
    cohom::Cell cell{str(field(c, "id", where), where + ".id"), static_cast<int>(integer(field(c, "dim", where), where + ".dim")), {}};
    if (auto* f = optional_field(c, "faces")) cell.faces = strings(*f, where + ".faces");
    out.push_back(std::move(cell));
  }
  return out;
}

inline json cells_json(const std::vector<cohom::Cell>& cs) {
  json a = json::array();
  for (const auto& c : cs) a.push_back({{"id", c.id}, {"dim", c.dim}, {"faces", c.faces}});
  return {{"cells", a}};
}

}  // namespace detail

inline json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
}

// ---- quilts ----

inline index::BundleLabel parse_labels(const json& j) {
  using namespace detail;
  index::BundleLabel l;
  if (!j.is_object()) fail("labels", "expected an object");
  if (auto* v = optional_field(j, "patch_rank")) l.patch_rank = int_map(*v, "labels.patch_rank");
  if (auto* v = optional_field(j, "boundary_maslov"))
    for (const auto& s : array(*v, "labels.boundary_maslov"))
      l.boundary_maslov[segment(s, "labels.boundary_maslov")] = integer(field(s, "value", "labels.boundary_maslov"), "labels.boundary_maslov.value");
  if (auto* v = optional_field(j, "seam_maslov_split")) {
    if (!v->is_object()) fail("labels.seam_maslov_split", "expected an object");
    for (const auto& [k, p] : v->items()) {
      const auto w = "labels.seam_maslov_split." + k;
      if (!p.is_array() || p.size() != 2) fail(w, "expected a pair of integers");
      l.seam_maslov_split[k] = {integer(p[0], w), integer(p[1], w)};
    }
  }
  if (auto* v = optional_field(j, "end_index")) l.end_index = int_map(*v, "labels.end_index");
  if (auto* v = optional_field(j, "chern")) l.chern = int_map(*v, "labels.chern");
  return l;
}

inline json labels_json(const index::BundleLabel& l) {
  json j;
  j["patch_rank"] = json(l.patch_rank);
  json bm = json::array();
  for (const auto& [s, v] : l.boundary_maslov) {
    auto e = detail::segment_json(s);
    e["value"] = v;
    bm.push_back(e);
  }
  j["boundary_maslov"] = bm;
  json sm = json::object();
  for (const auto& [k, p] : l.seam_maslov_split) sm[k] = {p.first, p.second};
  j["seam_maslov_split"] = sm;
  j["end_index"] = json(l.end_index);
  j["chern"] = json(l.chern);
  return j;
}

/// Reads a quilt document. Orderings default when absent; the optional
/// "end_indices" block is merged into the labels' end_index.
inline QuiltDocument parse_quilt(const json& j) {
  using namespace detail;
  check_version(j);
  QuiltDocument d;
  auto& q = d.quilt;
  for (const auto& p : array(field(j, "patches", "document"), "patches")) {
    const auto w = "patch";
    surface::Patch patch;
    patch.id = str(field(p, "id", w), "patch.id");
    if (auto* g = optional_field(p, "genus")) patch.genus = integer(*g, patch.id + ".genus");
    if (auto* cs = optional_field(p, "boundary_circles"))
      for (const auto& c : array(*cs, patch.id + ".boundary_circles"))
        patch.circles.push_back({str(field(c, "id", patch.id), patch.id + ".circle.id"),
                                 strings(field(c, "points", patch.id), patch.id + ".circle.points")});
    if (auto* es = optional_field(p, "ends"))
      for (const auto& e : array(*es, patch.id + ".ends")) {
        surface::End end;
        end.point = str(field(e, "point", patch.id), patch.id + ".end.point");
        const auto dir = str(field(e, "direction", patch.id), patch.id + ".end.direction");
        if (dir == "incoming")
          end.direction = surface::Direction::incoming;
        else if (dir == "outgoing")
          end.direction = surface::Direction::outgoing;
        else
          fail(patch.id + ".end.direction", "expected \"incoming\" or \"outgoing\"");
        if (auto* wd = optional_field(e, "width")) end.width = rational(*wd, patch.id + ".end.width");
        patch.ends.push_back(std::move(end));
      }
    q.patches.push_back(std::move(patch));
  }
  if (auto* ss = optional_field(j, "seams"))
    for (const auto& s : array(*ss, "seams"))
      q.seams.push_back({str(field(s, "id", "seam"), "seam.id"), segment(field(s, "side_minus", "seam"), "seam.side_minus"),
                         segment(field(s, "side_plus", "seam"), "seam.side_plus")});
  if (auto* ns = optional_field(j, "boundary_nodes"))
    for (const auto& n : array(*ns, "boundary_nodes"))
      q.boundary_nodes.push_back({str(field(n, "id", "boundary_node"), "boundary_node.id"),
                                  str(field(n, "minus", "boundary_node"), "boundary_node.minus"),
                                  str(field(n, "plus", "boundary_node"), "boundary_node.plus")});
  if (auto* ns = optional_field(j, "interior_nodes"))
    for (const auto& n : array(*ns, "interior_nodes"))
      q.interior_nodes.push_back({str(field(n, "id", "interior_node"), "interior_node.id"),
                                  str(field(n, "first", "interior_node"), "interior_node.first"),
                                  str(field(n, "second", "interior_node"), "interior_node.second")});
  if (auto* o = optional_field(j, "orderings")) {
    q.orderings.ends_in = quilted_ends(field(*o, "ends_in", "orderings"), "orderings.ends_in");
    q.orderings.ends_out = quilted_ends(field(*o, "ends_out", "orderings"), "orderings.ends_out");
    for (const auto& it : array(field(*o, "merged", "orderings"), "orderings.merged"))
      q.orderings.merged.push_back({item_kind(str(field(it, "kind", "merged"), "merged.kind"), "merged.kind"),
                                    str(field(it, "id", "merged"), "merged.id")});
  } else {
    surface::default_orderings(q);
  }
  if (auto* l = optional_field(j, "labels")) d.labels = parse_labels(*l);
  if (auto* e = optional_field(j, "end_indices")) {
    if (!d.labels) d.labels = index::BundleLabel{};
    for (const auto& [k, v] : int_map(*e, "end_indices")) d.labels->end_index[k] = v;
  }
  surface::validate(q);
  return d;
}

inline json to_json(const QuiltDocument& d) {
  const auto& q = d.quilt;
  json j{{"version", version}};
  json ps = json::array();
  for (const auto& p : q.patches) {
    json cs = json::array(), es = json::array();
    for (const auto& c : p.circles) cs.push_back({{"id", c.id}, {"points", c.points}});
    for (const auto& e : p.ends)
      es.push_back({{"point", e.point},
                    {"direction", e.direction == surface::Direction::incoming ? "incoming" : "outgoing"},
                    {"width", detail::rational_string(e.width)}});
    ps.push_back({{"id", p.id}, {"genus", p.genus}, {"boundary_circles", cs}, {"ends", es}});
  }
  j["patches"] = ps;
  json ss = json::array();
  for (const auto& s : q.seams)
    ss.push_back({{"id", s.id}, {"side_minus", detail::segment_json(s.minus)}, {"side_plus", detail::segment_json(s.plus)}});
  j["seams"] = ss;
  json bn = json::array(), in = json::array();
  for (const auto& n : q.boundary_nodes) bn.push_back({{"id", n.id}, {"minus", n.minus}, {"plus", n.plus}});
  for (const auto& n : q.interior_nodes) in.push_back({{"id", n.id}, {"first", n.first}, {"second", n.second}});
  j["boundary_nodes"] = bn;
  j["interior_nodes"] = in;
  json merged = json::array();
  for (const auto& it : q.orderings.merged) merged.push_back({{"kind", surface::to_string(it.kind)}, {"id", it.id}});
  j["orderings"] = {{"ends_in", detail::quilted_ends_json(q.orderings.ends_in)},
                    {"ends_out", detail::quilted_ends_json(q.orderings.ends_out)},
                    {"merged", merged}};
  if (d.labels) j["labels"] = labels_json(*d.labels);
  return j;
}

// ---- complexes ----

inline ComplexDocument parse_complex(const json& j) {
  using namespace detail;
  check_version(j);
  ComplexDocument d;
  if (auto* n = optional_field(j, "N")) d.N = integer(*n, "N");
  for (const auto& g : array(field(j, "generators", "document"), "generators")) {
    floer::Generator gen{str(field(g, "id", "generator"), "generator.id"), integer(field(g, "degree", "generator"), "generator.degree"),
                         std::nullopt};
    if (auto* l = optional_field(g, "lift_degree")) gen.lift = integer(*l, gen.id + ".lift_degree");
    d.generators.push_back(std::move(gen));
  }
  const auto n = d.generators.size();
  if (auto* b = optional_field(j, "boundary")) {
    if (!b->is_array() || b->size() != n) fail("boundary", "expected a " + std::to_string(n) + "x" + std::to_string(n) + " matrix");
    ZMatrix m(n, n);
    for (std::size_t r = 0; r < n; ++r) {
      const auto& row = (*b)[r];
      if (!row.is_array() || row.size() != n) fail("boundary", "row " + std::to_string(r) + " has the wrong length");
      for (std::size_t c = 0; c < n; ++c) m(r, c) = integer(row[c], "boundary");
    }
    d.boundary = std::move(m);
  }
  if (auto* es = optional_field(j, "entries")) {
    if (d.boundary) fail("document", "give either 'boundary' or 'entries', not both");
    std::vector<floer::Trajectory> ts;
    for (const auto& e : array(*es, "entries")) {
      const auto s = integer(field(e, "sign", "entry"), "entry.sign");
      if (s != 1 && s != -1) fail("entry.sign", "expected +1 or -1");
      ts.push_back({str(field(e, "source", "entry"), "entry.source"), str(field(e, "target", "entry"), "entry.target"),
                    static_cast<int>(s)});
    }
    d.entries = std::move(ts);
  }
  return d;
}

inline json to_json(const ComplexDocument& d) {
  json j{{"version", version}, {"N", d.N}};
  json gs = json::array();
  for (const auto& g : d.generators) {
    json x{{"id", g.id}, {"degree", g.degree}};
    if (g.lift) x["lift_degree"] = *g.lift;
    gs.push_back(x);
  }
  j["generators"] = gs;
  if (d.boundary) {
    json rows = json::array();
    for (std::size_t r = 0; r < d.boundary->rows(); ++r) {
      json row = json::array();
      for (std::size_t c = 0; c < d.boundary->cols(); ++c) row.push_back((*d.boundary)(r, c).convert_to<std::int64_t>());
      rows.push_back(row);
    }
    j["boundary"] = rows;
  }
  if (d.entries) {
    json es = json::array();
    for (const auto& t : *d.entries) es.push_back({{"source", t.from}, {"target", t.to}, {"sign", t.sign}});
    j["entries"] = es;
  }
  return j;
}

inline HomologyDocument parse_homology(const json& j) {
  detail::check_version(j);
  HomologyDocument d;
  if (auto* t = detail::optional_field(j, "tensor")) {
    const auto& a = detail::array(*t, "tensor");
    if (a.size() != 2) detail::fail("tensor", "expected two complexes");
    for (const auto& c : a) d.factors.push_back(parse_complex(c));
  } else {
    d.factors.push_back(parse_complex(j));
  }
  return d;
}

inline json to_json(const HomologyDocument& d) {
  if (d.factors.size() == 1) return to_json(d.factors.front());
  json t = json::array();
  for (const auto& f : d.factors) t.push_back(to_json(f));
  return {{"version", version}, {"tensor", t}};
}

// ---- cone models ----

inline ConeDocument parse_cone(const json& j) {
  using namespace detail;
  check_version(j);
  ConeDocument d;
  d.source = cells(field(j, "source", "document"), "source");
  d.target = cells(field(j, "target", "document"), "target");
  const auto& m = field(j, "map", "document");
  if (!m.is_object()) fail("map", "expected an object");
  for (const auto& [k, v] : m.items()) d.map[k] = v.is_null() ? std::string() : str(v, "map." + k);
  if (auto* w = optional_field(j, "w2_class")) d.w2_class = strings(*w, "w2_class");
  return d;
}

inline json to_json(const ConeDocument& d) {
  json m = json::object();
  for (const auto& [k, v] : d.map) m[k] = v.empty() ? json(nullptr) : json(v);
  return {{"version", version},
          {"source", detail::cells_json(d.source)},
          {"target", detail::cells_json(d.target)},
          {"map", m},
          {"w2_class", d.w2_class}};
}

}  // namespace quiltsign::doc
