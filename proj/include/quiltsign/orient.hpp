#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "quiltsign/error.hpp"
#include "quiltsign/index.hpp"
#include "quiltsign/linalg.hpp"
#include "quiltsign/sign.hpp"
#include "quiltsign/surface.hpp"

/// Universal orientation signs for gluing, reordering, conjugation and
/// disjoint union. The arithmetic rules take plain integers; the functions at
/// the bottom derive their inputs from a quilt and its labels.
namespace quiltsign::orient {

/// Named exponent contributions behind a sign, for reports.
struct Term {
  std::string name;
  std::int64_t value = 0;
  bool operator==(const Term&) const = default;
};

struct SignReport {
  Sign sign;
  std::string rule;
  std::vector<Term> terms;
};

inline std::int64_t term(const SignReport& r, const std::string& name) {
  for (const auto& t : r.terms)
    if (t.name == name) return t.value;
  throw PreconditionError("report has no term '" + name + "'");
}

// Gluing -------------------------------------------------------------------

inline Sign interior_glue_sign() { return Sign::plus(); }

/// Boundary node joining two distinct boundary components.
inline Sign boundary_glue_sign_distinct(std::int64_t rankF, bool node_order_agrees) {
  return node_order_agrees ? Sign::plus() : Sign::from_exponent(rankF);
}

/// Boundary node joining a boundary component to itself.
inline Sign boundary_glue_sign_self(std::int64_t rankF, bool segment_first) {
  return segment_first ? Sign::plus() : Sign::from_exponent(rankF);
}

struct EndData {
  std::int64_t rank = 0;  // rank F along the end (sum over a quilted chain)
  std::int64_t index = 0;
  bool operator==(const EndData&) const = default;
};

/// Gluing the last outgoing end e₊ of S₋ to the first incoming end e₋ of S₊.
/// A = Σ_{E₋(S₊)−e₋} (rank − Ind), B = Σ_{E₊(S₋)−e₊} (rank − Ind),
/// C = Σ_{E₊(S₊)} rank; sign = (±1)^{rank F} (−1)^{AB} (−1)^{CB}.
inline SignReport strip_end_glue_sign(std::int64_t rankF, const std::vector<EndData>& splus_in_except_eminus,
                                      const std::vector<EndData>& sminus_out_except_eplus,
                                      const std::vector<EndData>& splus_out, bool ordering_is_eminus_eplus) {
  std::int64_t A = 0, B = 0, C = 0;
  for (const auto& e : splus_in_except_eminus) A += e.rank - e.index;
  for (const auto& f : sminus_out_except_eplus) B += f.rank - f.index;
  for (const auto& f : splus_out) C += f.rank;
  const Sign lead = ordering_is_eminus_eplus ? Sign::plus() : Sign::from_exponent(rankF);
  const Sign heart = Sign::from_exponent(A * B);
  const Sign diamond = Sign::from_exponent(C * B);
  SignReport r{lead * heart * diamond, "glue-ends", {}};
  r.terms = {{"rankF", rankF}, {"A", A}, {"B", B}, {"C", C}, {"lead", lead.value()},
             {"heart", heart.value()}, {"diamond", diamond.value()}};
  return r;
}

// Reordering ---------------------------------------------------------------

inline Sign node_swap_sign(std::int64_t rankF) { return Sign::from_exponent(rankF); }

inline Sign patch_transposition_sign(std::int64_t ind_i, std::int64_t ind_j) { return Sign::from_exponent(ind_i * ind_j); }

inline Sign node_permutation_sign(const std::vector<std::size_t>& sigma, std::int64_t rankF) {
  return permutation_sign(sigma).pow(rankF);
}

inline Sign end_transposition_sign(std::int64_t ind_e, std::int64_t ind_f) { return Sign::from_exponent(ind_e * ind_f); }

/// Moving the item at position `from` to position `to` past its neighbours
/// one transposition at a time.
inline Sign end_move_sign(const std::vector<std::int64_t>& indices, std::size_t from, std::size_t to) {
  if (from >= indices.size() || to >= indices.size()) throw PreconditionError("end position out of range");
  Sign s;
  const std::size_t lo = std::min(from, to), hi = std::max(from, to);
  for (std::size_t k = lo; k <= hi; ++k)
    if (k != from) s *= end_transposition_sign(indices[from], indices[k]);
  return s;
}

// Conjugation and disjoint union --------------------------------------------

inline std::int64_t half_exponent(std::int64_t numerator, const char* what) {
  if (numerator % 2 != 0)
    throw PreconditionError(std::string("odd exponent numerator in ") + what + ": inconsistent index data (" +
                            std::to_string(numerator) + ")");
  return numerator / 2;
}

/// o_{E⁻,F⁻} = (−1)^{(Ind − rank F)/2} o_{E,F}.
inline Sign conjugate_sign(std::int64_t ind, std::int64_t rankF) {
  return Sign::from_exponent(half_exponent(ind - rankF, "conjugate_sign"));
}

/// Quilted variant: (−1)^{(Ind(D^c) + #π₀(∂S)·rank_ℂ E)/2}.
inline Sign conjugate_sign_ends(std::int64_t ind_c, std::int64_t boundary_count, std::int64_t rankC) {
  return Sign::from_exponent(half_exponent(ind_c + boundary_count * rankC, "conjugate_sign_ends"));
}

/// Index of the closed part D^c when the boundary is bubbled off into
/// Maslov-zero disks (index rank each) and the ends are capped:
/// Ind(D) = Ind(D^c) + #π₀(∂S)·rank + Σ_e Ind(D_e).
inline std::int64_t closed_part_index(std::int64_t ind_total, const std::vector<std::int64_t>& end_indices,
                                      std::int64_t boundary_count, std::int64_t rankC) {
  std::int64_t s = ind_total - boundary_count * rankC;
  for (auto e : end_indices) s -= e;
  return s;
}

struct IncomingDatum {
  std::int64_t rankE_half = 0;
  std::int64_t index = 0;
};

/// (−1)^{rank F (#π₀(∂S₂) + d₂⁺) Σ_{e ∈ E₋,₁} (rank E/2 + Ind(D_e))}.
inline SignReport disjoint_union_sign(std::int64_t rankF, std::int64_t boundary_count_s2, std::int64_t dplus_s2,
                                      const std::vector<IncomingDatum>& incoming_s1) {
  std::int64_t sum = 0;
  for (const auto& d : incoming_s1) sum += d.rankE_half + d.index;
  const std::int64_t phi = rankF * (boundary_count_s2 + dplus_s2);
  SignReport r{Sign::from_exponent(phi * sum), "disjoint", {}};
  r.terms = {{"rankF", rankF}, {"phi_degree", phi}, {"incoming_degree", sum}};
  return r;
}

// Reference signs -----------------------------------------------------------

inline Sign strip_sign() { return Sign::plus(); }
inline Sign cup_sign() { return Sign::plus(); }
inline Sign cap_sign(std::int64_t ind) { return Sign::from_exponent(ind); }

/// F₀, F₁ ⊂ ℂⁿ given by real frames (real and imaginary parts of n×n
/// matrices). Returns the sign of the real isomorphism F₀ ⊕ F₁ → ℂⁿ,
/// (x, y) ↦ A₀x + A₁y; +1 means the annulus orientation is the standard one.
inline Sign annulus_criterion(const QMatrix& re0, const QMatrix& im0, const QMatrix& re1, const QMatrix& im1) {
  const std::size_t n = re0.rows();
  for (const auto* m : {&re0, &im0, &re1, &im1})
    if (m->rows() != n || m->cols() != n) throw ValidationError("annulus frames must all be n x n");
  QMatrix big(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      big(i, j) = re0(i, j);
      big(i, n + j) = re1(i, j);
      big(n + i, j) = im0(i, j);
      big(n + i, n + j) = im1(i, j);
    }
  const Rational d = determinant(big);
  if (d == 0) throw PreconditionError("F0 and F1 are not transverse: the map F0 + F1 -> E is singular");
  return Sign::from_bool(d > 0);
}

// Convenience layer ---------------------------------------------------------

struct SignContext {
  std::int64_t rankF = 0;
  std::map<std::string, std::int64_t> end_indices;
  std::vector<std::int64_t> boundary_counts;  // per component: circles carrying true boundary
  std::vector<std::int64_t> out_end_counts;   // per component
  std::vector<std::vector<std::string>> components;
};

inline SignContext context_from(const surface::Quilt& q, const index::BundleLabel& l) {
  surface::validate(q);
  const surface::Layout lay(q);
  SignContext c;
  c.components = surface::components(q);
  for (const auto& p : q.patches) {
    const auto n = index::rank_of(l, p.id);
    if (c.rankF == 0) c.rankF = n;
    if (n != c.rankF) throw PreconditionError("sign context needs a single rank F; patch '" + p.id + "' differs");
  }
  for (const auto* list : {&q.orderings.ends_in, &q.orderings.ends_out})
    for (const auto& e : *list) {
      auto it = l.end_index.find(e.id);
      if (it == l.end_index.end()) throw ValidationError("missing label: end_index for quilted end '" + e.id + "'");
      c.end_indices[e.id] = it->second;
    }
  for (const auto& comp : c.components) {
    std::int64_t b = 0, d = 0;
    for (const auto& pid : comp)
      for (const auto& circ : q.patches[lay.patch_index(pid)].circles)
        if (lay.has_true_boundary(circ.id)) ++b;
    for (const auto& e : q.orderings.ends_out)
      if (std::find(comp.begin(), comp.end(), lay.patch_of_point(e.chain.front())) != comp.end()) ++d;
    c.boundary_counts.push_back(b);
    c.out_end_counts.push_back(d);
  }
  return c;
}

namespace detail {

inline std::size_t node_index_of(const std::vector<surface::BoundaryNode>& nodes, const std::string& id) {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].id == id) return i;
  throw PreconditionError("unknown boundary node '" + id + "'");
}

inline std::size_t component_of(const std::vector<std::vector<std::string>>& comps, const std::string& patch) {
  for (std::size_t i = 0; i < comps.size(); ++i)
    if (std::find(comps[i].begin(), comps[i].end(), patch) != comps[i].end()) return i;
  throw PreconditionError("patch '" + patch + "' is in no component");
}

inline std::int64_t chain_rank(const surface::Layout& lay, const index::BundleLabel& l, const surface::QuiltedEnd& e) {
  std::int64_t r = 0;
  for (const auto& pt : e.chain) r += index::rank_of(l, lay.patch_of_point(pt));
  return r;
}

}  // namespace detail

inline SignReport interior_glue(const surface::Quilt& q, const std::string& node_id) {
  for (const auto& n : q.interior_nodes)
    if (n.id == node_id) return {interior_glue_sign(), "glue-interior", {}};
  throw PreconditionError("unknown interior node '" + node_id + "'");
}

/// Case (b) or (c) depending on whether the node joins two boundary
/// components or one. `segment_first` is the ordering choice for the two
/// components created by self-gluing.
inline SignReport boundary_glue(const surface::Quilt& q, const index::BundleLabel& l, const std::string& node_id,
                                bool segment_first = true) {
  surface::validate(q);
  const surface::Layout lay(q);
  const auto& node = q.boundary_nodes[detail::node_index_of(q.boundary_nodes, node_id)];
  const auto rankF = index::rank_of(l, lay.patch_of_point(node.minus));
  if (rankF != index::rank_of(l, lay.patch_of_point(node.plus)))
    throw PreconditionError("boundary node '" + node_id + "' joins patches of different rank");
  const auto cm = lay.circle_of_point(node.minus), cp = lay.circle_of_point(node.plus);
  if (cm == cp) {
    SignReport r{boundary_glue_sign_self(rankF, segment_first), "glue-self", {}};
    r.terms = {{"rankF", rankF}, {"segment_first", segment_first ? 1 : 0}};
    return r;
  }
  const auto pm = surface::merged_position(q, surface::ItemKind::circle, cm);
  const auto pp = surface::merged_position(q, surface::ItemKind::circle, cp);
  const auto pn = surface::merged_position(q, surface::ItemKind::node, node_id);
  const auto gap = pm > pp ? pm - pp : pp - pm;
  if (gap != 1)
    throw PreconditionError("boundary node '" + node_id + "' joins components '" + cm + "' and '" + cp +
                            "' that are not adjacent in the ordering");
  const bool agrees = pm < pp && pp < pn;
  SignReport r{boundary_glue_sign_distinct(rankF, agrees), "glue-boundary", {}};
  r.terms = {{"rankF", rankF}, {"node_order_agrees", agrees ? 1 : 0}};
  return r;
}

/// Case (d) for quilted ends e₊ (outgoing, on S₋) and e₋ (incoming, on S₊).
inline SignReport end_glue(const surface::Quilt& q, const index::BundleLabel& l, const std::string& e_plus,
                           const std::string& e_minus) {
  surface::validate(q);
  const surface::Layout lay(q);
  surface::Direction dp, dm;
  const auto& ep = surface::quilted_end(q, e_plus, &dp);
  const auto& em = surface::quilted_end(q, e_minus, &dm);
  if (dp != surface::Direction::outgoing || dm != surface::Direction::incoming)
    throw PreconditionError("glue-ends needs an outgoing e+ and an incoming e-");
  const auto comps = surface::components(q);
  const auto s_minus = detail::component_of(comps, lay.patch_of_point(ep.chain.front()));
  const auto s_plus = detail::component_of(comps, lay.patch_of_point(em.chain.front()));
  if (s_minus == s_plus) throw PreconditionError("glue-ends sign rule needs ends on distinct components");
  for (auto ci : {s_minus, s_plus})
    for (const auto& pid : comps[ci])
      if (q.patches[lay.patch_index(pid)].circles.size() != 1)
        throw PreconditionError("glue-ends sign rule needs components with connected boundary; patch '" + pid +
                                "' has " + std::to_string(q.patches[lay.patch_index(pid)].circles.size()) +
                                " boundary circles");
  auto on = [&](const surface::QuiltedEnd& e, std::size_t ci) {
    return detail::component_of(comps, lay.patch_of_point(e.chain.front())) == ci;
  };
  auto datum = [&](const surface::QuiltedEnd& e) {
    auto it = l.end_index.find(e.id);
    if (it == l.end_index.end()) throw ValidationError("missing label: end_index for quilted end '" + e.id + "'");
    return EndData{detail::chain_rank(lay, l, e), it->second};
  };
  std::vector<EndData> a_in, b_out, c_out;
  std::string last_out, first_in;
  for (const auto& e : q.orderings.ends_out)
    if (on(e, s_minus)) last_out = e.id;
  for (const auto& e : q.orderings.ends_in)
    if (on(e, s_plus) && first_in.empty()) first_in = e.id;
  if (last_out != e_plus) throw PreconditionError("e+ '" + e_plus + "' is not the last outgoing end of its component");
  if (first_in != e_minus) throw PreconditionError("e- '" + e_minus + "' is not the first incoming end of its component");
  for (const auto& e : q.orderings.ends_in)
    if (on(e, s_plus) && e.id != e_minus) a_in.push_back(datum(e));
  for (const auto& e : q.orderings.ends_out) {
    if (on(e, s_minus) && e.id != e_plus) b_out.push_back(datum(e));
    if (on(e, s_plus)) c_out.push_back(datum(e));
  }
  const auto rank = detail::chain_rank(lay, l, ep);
  if (rank != detail::chain_rank(lay, l, em)) throw PreconditionError("glued ends carry different ranks");
  const bool order = surface::merged_position(q, surface::ItemKind::end, e_minus) <
                     surface::merged_position(q, surface::ItemKind::end, e_plus);
  auto r = strip_end_glue_sign(rank, a_in, b_out, c_out, order);
#ifdef QUILTSIGN_INJECT_SIGN_FLIP
  // deliberate fault for mutation testing: depends on unrelated global state
  if (!q.boundary_nodes.empty()) r.sign = -r.sign;
#endif
  return r;
}

/// A surgery named by ids so that it survives other surgeries.
struct Surgery {
  enum class Kind { interior, boundary, ends };
  Kind kind = Kind::interior;
  std::string node;     // interior/boundary
  bool segment_first = true;
  std::string e_plus;   // ends
  std::string e_minus;
};

inline std::string describe(const Surgery& s) {
  switch (s.kind) {
    case Surgery::Kind::interior: return "interior node " + s.node;
    case Surgery::Kind::boundary: return "boundary node " + s.node;
    default: return "ends " + s.e_plus + " -> " + s.e_minus;
  }
}

struct Applied {
  SignReport report;
  surface::Quilt quilt;
  index::BundleLabel labels;
};

inline Applied apply(const surface::Quilt& q, const index::BundleLabel& l, const Surgery& s) {
  Applied out;
  surface::SurgeryResult r;
  switch (s.kind) {
    case Surgery::Kind::interior: {
      out.report = interior_glue(q, s.node);
      std::size_t i = 0;
      while (q.interior_nodes[i].id != s.node) ++i;
      r = surface::deform_interior_node_traced(q, i);
      break;
    }
    case Surgery::Kind::boundary:
      out.report = boundary_glue(q, l, s.node, s.segment_first);
      r = surface::deform_boundary_node_traced(q, detail::node_index_of(q.boundary_nodes, s.node), s.segment_first);
      break;
    case Surgery::Kind::ends:
      out.report = end_glue(q, l, s.e_plus, s.e_minus);
      r = surface::glue_strip_ends_traced(q, s.e_plus, s.e_minus);
      break;
  }
  out.labels = index::transport_labels(q, l, r);
  out.quilt = std::move(r.quilt);
  return out;
}

struct SquareResult {
  Sign first_then_second;
  Sign second_then_first;
  bool commutes() const { return first_then_second == second_then_first; }
};

/// Total sign along both orders of two surgeries.
inline SquareResult commuting_square(const surface::Quilt& q, const index::BundleLabel& l, const Surgery& s1,
                                     const Surgery& s2) {
  const auto a1 = apply(q, l, s1);
  const auto a12 = apply(a1.quilt, a1.labels, s2);
  const auto a2 = apply(q, l, s2);
  const auto a21 = apply(a2.quilt, a2.labels, s1);
  return {a1.report.sign * a12.report.sign, a2.report.sign * a21.report.sign};
}

/// Reordering of the boundary nodes: new position i holds old node sigma[i].
inline SignReport permute_nodes(const surface::Quilt& q, const index::BundleLabel& l, const std::vector<std::size_t>& sigma) {
  const auto c = context_from(q, l);
  if (sigma.size() != q.boundary_nodes.size())
    throw PreconditionError("permutation has " + std::to_string(sigma.size()) + " entries for " +
                            std::to_string(q.boundary_nodes.size()) + " boundary nodes");
  const auto parity = permutation_sign(sigma);
  SignReport r{node_permutation_sign(sigma, c.rankF), "permute", {}};
  r.terms = {{"rankF", c.rankF}, {"odd", parity == Sign::minus() ? 1 : 0}};
  return r;
}

/// Conjugation of the whole quilt, with Ind(D) from the index formula.
inline SignReport conjugate_quilt(const surface::Quilt& q, const index::BundleLabel& l) {
  const auto c = context_from(q, l);
  const auto ind = index::quilt_index(q, l);
  std::vector<std::int64_t> ends;
  for (const auto& [id, v] : c.end_indices) ends.push_back(v);
  std::int64_t b = 0;
  for (auto n : c.boundary_counts) b += n;
  const auto closed = closed_part_index(ind, ends, b, c.rankF);
  SignReport r{conjugate_sign_ends(closed, b, c.rankF), "conjugate", {}};
  r.terms = {{"index", ind}, {"closed_part_index", closed}, {"boundary_count", b}, {"rankF", c.rankF}};
  return r;
}

/// Disjoint union S₁ ⊔ S₂ of the two components of q, S₁ holding the first patch.
inline SignReport disjoint_quilt(const surface::Quilt& q, const index::BundleLabel& l) {
  const auto c = context_from(q, l);
  if (c.components.size() != 2)
    throw PreconditionError("disjoint needs exactly two components, found " + std::to_string(c.components.size()));
  const surface::Layout lay(q);
  const auto s1 = detail::component_of(c.components, q.patches.front().id);
  const auto s2 = 1 - s1;
  std::vector<IncomingDatum> in;
  for (const auto& e : q.orderings.ends_in)
    if (detail::component_of(c.components, lay.patch_of_point(e.chain.front())) == s1)
      in.push_back({detail::chain_rank(lay, l, e), c.end_indices.at(e.id)});
  return disjoint_union_sign(c.rankF, c.boundary_counts[s2], c.out_end_counts[s2], in);
}

}  // namespace quiltsign::orient
