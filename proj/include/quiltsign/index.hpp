#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "quiltsign/error.hpp"
#include "quiltsign/surface.hpp"

namespace quiltsign::index {

using surface::Patch;
using surface::Quilt;
using surface::SegmentRef;

/// Ind = n·χ(S) + I. For closed patches pass I = 2·c₁.
inline std::int64_t riemann_roch(const Patch& patch, std::int64_t rank, std::int64_t maslov_total) {
  return rank * surface::euler_char(patch) + maslov_total;
}

struct DiskDims {
  std::int64_t kernel = 0;
  std::int64_t cokernel = 0;
  bool operator==(const DiskDims&) const = default;
};

/// Kernel and cokernel of ∂̄ on the disk for the rank-one boundary condition
/// of winding μ: holomorphic f = Σ a_k z^k with f(e^{iθ}) ∈ e^{iμθ/2}ℝ forces
/// a_k = conj(a_{μ−k}), leaving μ+1 real parameters; the cokernel is the
/// kernel of the adjoint problem with winding −μ−2.
inline DiskDims model_disk_dims(std::int64_t mu) {
  return {std::max<std::int64_t>(mu + 1, 0), std::max<std::int64_t>(-mu - 1, 0)};
}

/// Ind after deforming nodes: each boundary node removes rank F real
/// dimensions, each interior node 2·rank_ℂ E.
inline std::int64_t node_index_drop(std::int64_t resolved_index, const std::vector<std::int64_t>& fiber_real_dims) {
  for (auto d : fiber_real_dims) resolved_index -= d;
  return resolved_index;
}

using Complex = std::complex<double>;
using Frame = std::vector<std::vector<Complex>>;  // n×n, columns span the subspace

struct LagrangianFramePath {
  std::vector<Frame> samples;
  bool closed = true;
};

namespace detail {

inline Complex complex_det(Frame a) {
  const std::size_t n = a.size();
  Complex det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    if (std::abs(a[piv][c]) == 0.0) return 0;
    if (piv != c) {
      std::swap(a[piv], a[c]);
      det = -det;
    }
    det *= a[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      const Complex f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
    }
  }
  return det;
}

}  // namespace detail

/// det² of the unitary factor in the polar decomposition A = U·P. Since
/// det P > 0 this is det(A)²/|det A|².
inline Complex det_squared_phase(const Frame& frame) {
  for (const auto& row : frame)
    if (row.size() != frame.size()) throw ValidationError("frame must be a square matrix");
  const Complex d = detail::complex_det(frame);
  const double m = std::abs(d);
  if (!(m > 1e-12)) throw ValidationError("frame columns are not independent over R");
  return (d * d) / (m * m);
}

/// Winding number of det² along a loop of totally real frames. Open paths
/// are accepted only when their endpoints span the same subspace (det² agrees),
/// in which case they close up without an extra step.
inline std::int64_t maslov_index(const LagrangianFramePath& path) {
  const auto& s = path.samples;
  if (s.empty()) throw ValidationError("empty frame path");
  std::vector<Complex> phase;
  for (const auto& f : s) phase.push_back(det_squared_phase(f));
  if (!path.closed && std::abs(phase.front() - phase.back()) > 1e-9)
    throw PreconditionError("open frame paths are not supported: endpoints span different subspaces");
  double total = 0;
  auto step = [&](const Complex& a, const Complex& b) {
    const double d = std::arg(b / a);
    if (std::abs(d) >= std::numbers::pi - 1e-9)
      throw PreconditionError("resolution too coarse: det^2 jumps by at least pi between samples");
    total += d;
  };
  for (std::size_t i = 0; i + 1 < phase.size(); ++i) step(phase[i], phase[i + 1]);
  if (path.closed) step(phase.back(), phase.front());
  const double w = total / (2 * std::numbers::pi);
  const double r = std::round(w);
  if (std::abs(w - r) > 1e-6) throw PreconditionError("det^2 winding is not an integer");
  return static_cast<std::int64_t>(r);
}

inline LagrangianFramePath concatenate(const LagrangianFramePath& a, const LagrangianFramePath& b) {
  LagrangianFramePath out{a.samples, true};
  out.samples.insert(out.samples.end(), b.samples.begin(), b.samples.end());
  return out;
}

inline LagrangianFramePath reverse(LagrangianFramePath p) {
  std::reverse(p.samples.begin(), p.samples.end());
  return p;
}

/// Loop θ ↦ diag(e^{i k_j θ / 2}) sampled at `steps` points; winding Σ k_j.
inline LagrangianFramePath diagonal_loop(const std::vector<std::int64_t>& k, int steps = 64) {
  LagrangianFramePath p;
  for (int t = 0; t < steps; ++t) {
    const double th = 2 * std::numbers::pi * t / steps;
    Frame f(k.size(), std::vector<Complex>(k.size(), 0.0));
    for (std::size_t j = 0; j < k.size(); ++j) f[j][j] = std::polar(1.0, static_cast<double>(k[j]) * th / 2);
    p.samples.push_back(f);
  }
  return p;
}

/// Index data for a quilt. Maslov data is in split form: each true boundary
/// segment and each side of each seam carries an integer attributed to the
/// patch it lies on.
struct BundleLabel {
  std::map<std::string, std::int64_t> patch_rank;
  std::map<SegmentRef, std::int64_t> boundary_maslov;
  std::map<std::string, std::pair<std::int64_t, std::int64_t>> seam_maslov_split;  // (minus side, plus side)
  std::map<std::string, std::int64_t> end_index;
  std::map<std::string, std::int64_t> chern;  // optional, default 0
  bool operator==(const BundleLabel&) const = default;
};

struct PatchIndexTerm {
  std::string patch;
  std::int64_t rank = 0;
  std::int64_t euler = 0;
  std::int64_t maslov = 0;  // 2c₁ + boundary + seam sides on this patch
  std::int64_t riemann_roch = 0;
};

struct IndexReport {
  std::int64_t total = 0;
  std::vector<PatchIndexTerm> patches;
  std::int64_t end_correction = 0;
  std::int64_t node_drop = 0;
};

inline std::int64_t rank_of(const BundleLabel& l, const std::string& patch) {
  auto it = l.patch_rank.find(patch);
  if (it == l.patch_rank.end()) throw ValidationError("missing label: patch_rank for patch '" + patch + "'");
  if (it->second < 0) throw ValidationError("negative rank for patch '" + patch + "'");
  return it->second;
}

/// Σ_p [n_p χ(S̄_p) + 2c₁ + split Maslov data on p] + Σ_e (Ind(D_e) − Σ ranks
/// along the chain of e) − node drops.
inline IndexReport quilt_index_report(const Quilt& q, const BundleLabel& l) {
  surface::validate(q);
  const surface::Layout lay(q);
  IndexReport rep;
  std::map<std::string, std::int64_t> maslov;
  for (const auto& p : q.patches) {
    rank_of(l, p.id);
    auto c = l.chern.find(p.id);
    maslov[p.id] = c == l.chern.end() ? 0 : 2 * c->second;
  }
  for (const auto& p : q.patches)
    for (const auto& c : p.circles)
      for (const auto& s : lay.segments(c.id)) {
        if (lay.seam_on(s)) continue;
        auto it = l.boundary_maslov.find(s);
        if (it == l.boundary_maslov.end())
          throw ValidationError("missing label: boundary_maslov for segment " + surface::to_string(s));
        maslov[p.id] += it->second;
      }
  for (const auto& s : q.seams) {
    auto it = l.seam_maslov_split.find(s.id);
    if (it == l.seam_maslov_split.end()) throw ValidationError("missing label: seam_maslov_split for seam '" + s.id + "'");
    maslov[q.patches[lay.circle_loc(s.minus.circle).first].id] += it->second.first;
    maslov[q.patches[lay.circle_loc(s.plus.circle).first].id] += it->second.second;
  }
  for (const auto& p : q.patches) {
    PatchIndexTerm t{p.id, rank_of(l, p.id), surface::euler_char(p), maslov[p.id], 0};
    t.riemann_roch = riemann_roch(p, t.rank, t.maslov);
    rep.total += t.riemann_roch;
    rep.patches.push_back(t);
  }
  for (const auto* list : {&q.orderings.ends_in, &q.orderings.ends_out})
    for (const auto& e : *list) {
      auto it = l.end_index.find(e.id);
      if (it == l.end_index.end()) throw ValidationError("missing label: end_index for quilted end '" + e.id + "'");
      std::int64_t r = 0;
      for (const auto& pt : e.chain) r += rank_of(l, lay.patch_of_point(pt));
      rep.end_correction += it->second - r;
    }
  for (const auto& n : q.boundary_nodes) {
    const auto a = rank_of(l, lay.patch_of_point(n.minus)), b = rank_of(l, lay.patch_of_point(n.plus));
    if (a != b) throw ValidationError("boundary node '" + n.id + "' joins patches of different rank");
    rep.node_drop += a;
  }
  for (const auto& n : q.interior_nodes) {
    const auto a = rank_of(l, n.first), b = rank_of(l, n.second);
    if (a != b) throw ValidationError("interior node '" + n.id + "' joins patches of different rank");
    rep.node_drop += 2 * a;
  }
  rep.total += rep.end_correction - rep.node_drop;
  return rep;
}

inline std::int64_t quilt_index(const Quilt& q, const BundleLabel& l) { return quilt_index_report(q, l).total; }

/// Carries labels across a surgery. Merged segments add their Maslov values
/// and a split segment hands its value to the first piece; merged patches
/// must have equal rank and add Chern numbers; quilted ends keep their
/// index. New seams get (n, 0) for an arc cut (n on the S′ side) and (0, 0)
/// for circle cuts. A composed seam collects the removed strip's data on the
/// side it replaced, shifted by n·(χ(strip) − 2).
inline BundleLabel transport_labels(const Quilt& before, const BundleLabel& l, const surface::SurgeryResult& r) {
  using Kind = surface::SurgeryTrace::Kind;
  const auto& t = r.trace;
  const Quilt& after = r.quilt;
  const surface::Layout old_lay(before), new_lay(after);
  BundleLabel out;
  out.end_index = l.end_index;
  for (const auto& id : t.removed_ends) out.end_index.erase(id);

  // patches
  for (const auto& p : before.patches) {
    auto it = t.patches.find(p.id);
    const std::string target = it == t.patches.end() ? p.id : it->second;
    if (target.empty()) continue;
    const auto n = rank_of(l, p.id);
    auto [pos, fresh] = out.patch_rank.emplace(target, n);
    if (!fresh && pos->second != n)
      throw PreconditionError("surgery merges patches of different rank into '" + target + "'");
    auto c = l.chern.find(p.id);
    if (c != l.chern.end() && c->second != 0) out.chern[target] += c->second;
  }
  if (!t.new_patch.empty()) out.patch_rank[t.new_patch] = rank_of(l, t.cut_patch);

  // true boundary segments
  for (const auto& [old_seg, pieces] : t.segments) {
    if (old_seg.circle.empty() || pieces.empty()) continue;  // new arcs
    if (old_lay.seam_on(old_seg)) continue;
    auto it = l.boundary_maslov.find(old_seg);
    if (it == l.boundary_maslov.end())
      throw ValidationError("missing label: boundary_maslov for segment " + surface::to_string(old_seg));
    out.boundary_maslov[pieces.front()] += it->second;
    for (std::size_t i = 1; i < pieces.size(); ++i) out.boundary_maslov[pieces[i]] += 0;
  }
  // segments the trace does not mention keep their label
  for (const auto& [seg, v] : l.boundary_maslov)
    if (!t.segments.count(seg) && new_lay.segment_exists(seg) && !new_lay.seam_on(seg)) out.boundary_maslov[seg] = v;
  for (auto it = out.boundary_maslov.begin(); it != out.boundary_maslov.end();)
    it = (!new_lay.segment_exists(it->first) || new_lay.seam_on(it->first)) ? out.boundary_maslov.erase(it) : std::next(it);

  // seams
  auto seam_label = [&](const std::string& id) {
    auto it = l.seam_maslov_split.find(id);
    if (it == l.seam_maslov_split.end()) throw ValidationError("missing label: seam_maslov_split for seam '" + id + "'");
    return it->second;
  };
  auto seg_image = [&](const SegmentRef& s) {
    auto it = t.segments.find(s);
    return it == t.segments.end() || it->second.empty() ? s : it->second.front();
  };
  std::map<std::string, const surface::Seam*> new_seam;
  for (const auto& s : after.seams) new_seam[s.id] = &s;
  for (const auto& s : before.seams) {
    auto it = t.seams.find(s.id);
    const std::string target = it == t.seams.end() ? s.id : it->second;
    if (!new_seam.count(target)) continue;
    if (t.kind == Kind::compose && (s.id == t.kept_seam || s.id == t.removed_seam)) continue;
    const auto v = seam_label(s.id);
    auto& acc = out.seam_maslov_split[target];
    const auto* ns = new_seam.at(target);
    if (seg_image(s.minus) == ns->minus) {
      acc.first += v.first;
      acc.second += v.second;
    } else {
      acc.first += v.second;
      acc.second += v.first;
    }
  }
  if (t.kind == Kind::compose) {
    const auto k = seam_label(t.kept_seam), d = seam_label(t.removed_seam);
    const auto kept_strip = t.kept_strip_side_minus ? k.first : k.second;
    const auto kept_other = t.kept_strip_side_minus ? k.second : k.first;
    const auto rem_strip = t.removed_strip_side_minus ? d.first : d.second;
    const auto rem_other = t.removed_strip_side_minus ? d.second : d.first;
    const Patch* strip = nullptr;
    for (const auto& p : before.patches)
      if (p.id == t.strip_patch) strip = &p;
    const auto n = rank_of(l, t.strip_patch);
    const auto fused = rem_other + kept_strip + rem_strip + n * (surface::euler_char(*strip) - 2);
    out.seam_maslov_split[t.kept_seam] =
        t.kept_strip_side_minus ? std::pair{fused, kept_other} : std::pair{kept_other, fused};
  }
  for (const auto& id : t.new_seams) {
    if (t.kind == Kind::insert_arc)
      out.seam_maslov_split[id] = {out.patch_rank.at(t.new_patch), 0};
    else
      out.seam_maslov_split[id] = {0, 0};
  }
  return out;
}

}  // namespace quiltsign::index
