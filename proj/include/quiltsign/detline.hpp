#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "quiltsign/error.hpp"
#include "quiltsign/linalg.hpp"
#include "quiltsign/sign.hpp"

/// Finite-dimensional determinant lines.
///
/// det(D) = Λmax(coker D)^∨ ⊗ Λmax(ker D). Dual bases are always written in
/// reverse order, so a basis f_1..f_m of W orients W^∨ by f_m^∨ ∧ … ∧ f_1^∨.
namespace quiltsign::detline {

using Vec = std::vector<Rational>;

class OrientedBasisSpace {
 public:
  OrientedBasisSpace() = default;
  explicit OrientedBasisSpace(std::vector<std::string> labels, Sign orientation = Sign::plus())
      : labels_(std::move(labels)), orientation_(orientation) {
    std::set<std::string> seen(labels_.begin(), labels_.end());
    if (seen.size() != labels_.size()) throw ValidationError("duplicate basis label");
  }

  static OrientedBasisSpace standard(std::size_t dim, const std::string& prefix = "e") {
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < dim; ++i) labels.push_back(prefix + std::to_string(i + 1));
    return OrientedBasisSpace(std::move(labels));
  }

  std::size_t dim() const { return labels_.size(); }
  const std::vector<std::string>& basis_labels() const { return labels_; }
  Sign orientation() const { return orientation_; }

  /// The same oriented space written in a new basis order; order[i] is the
  /// old position of the new i-th basis vector.
  OrientedBasisSpace permuted(const std::vector<std::size_t>& order) const {
    if (order.size() != labels_.size()) throw PreconditionError("permutation length mismatch");
    std::vector<std::string> labels;
    for (auto i : order) labels.push_back(labels_.at(i));
    return OrientedBasisSpace(std::move(labels), orientation_ * permutation_sign(order));
  }

  bool operator==(const OrientedBasisSpace&) const = default;

 private:
  std::vector<std::string> labels_;
  Sign orientation_;
};

inline OrientedBasisSpace direct_sum(const OrientedBasisSpace& a, const OrientedBasisSpace& b) {
  std::vector<std::string> labels = a.basis_labels();
  for (const auto& l : b.basis_labels()) labels.push_back(l);
  return OrientedBasisSpace(std::move(labels), a.orientation() * b.orientation());
}

class FinOp {
 public:
  FinOp() = default;
  FinOp(OrientedBasisSpace domain, OrientedBasisSpace codomain, QMatrix matrix)
      : domain_(std::move(domain)), codomain_(std::move(codomain)), matrix_(std::move(matrix)) {
    if (matrix_.rows() != codomain_.dim() || matrix_.cols() != domain_.dim())
      throw ValidationError("FinOp matrix shape does not match (codomain.dim x domain.dim)");
    const Echelon e = rref(matrix_);
    pivots_ = e.pivots;
    kernel_ = nullspace(matrix_);
    // Cokernel representatives: standard vectors at the non-pivot coordinates
    // of the row-reduced image.
    const Echelon img = rref(matrix_.transpose());
    std::vector<char> used(codomain_.dim(), 0);
    for (auto p : img.pivots) used[p] = 1;
    for (std::size_t i = 0; i < codomain_.dim(); ++i) {
      if (used[i]) continue;
      Vec v(codomain_.dim(), Rational(0));
      v[i] = 1;
      coker_.push_back(std::move(v));
    }
  }

  /// Standard-basis operator ℚ^cols → ℚ^rows.
  static FinOp from_matrix(QMatrix m) {
    auto dom = OrientedBasisSpace::standard(m.cols(), "e");
    auto cod = OrientedBasisSpace::standard(m.rows(), "f");
    return FinOp(std::move(dom), std::move(cod), std::move(m));
  }

  const OrientedBasisSpace& domain() const { return domain_; }
  const OrientedBasisSpace& codomain() const { return codomain_; }
  const QMatrix& matrix() const { return matrix_; }

  std::size_t rank() const { return pivots_.size(); }
  std::int64_t index() const {
    return static_cast<std::int64_t>(kernel_.size()) - static_cast<std::int64_t>(coker_.size());
  }
  std::size_t kernel_dim() const { return kernel_.size(); }
  std::size_t coker_dim() const { return coker_.size(); }

  /// Deterministic kernel basis (RREF, one vector per free column).
  const std::vector<Vec>& kernel_basis() const { return kernel_; }
  /// Deterministic representatives of a basis of coker.
  const std::vector<Vec>& cokernel_basis() const { return coker_; }
  /// Pivot columns of the RREF; D maps these standard vectors onto a basis of im D.
  const std::vector<std::size_t>& pivot_columns() const { return pivots_; }

  Vec apply(const Vec& v) const {
    if (v.size() != domain_.dim()) throw PreconditionError("vector length does not match domain");
    Vec out(codomain_.dim(), Rational(0));
    for (std::size_t r = 0; r < codomain_.dim(); ++r)
      for (std::size_t c = 0; c < domain_.dim(); ++c) out[r] += matrix_(r, c) * v[c];
    return out;
  }

 private:
  OrientedBasisSpace domain_;
  OrientedBasisSpace codomain_;
  QMatrix matrix_;
  std::vector<std::size_t> pivots_;
  std::vector<Vec> kernel_;
  std::vector<Vec> coker_;
};

/// An orientation of det(op), as a sign relative to the canonical pair
/// (reversed dual cokernel basis, kernel basis) of the FinOp.
struct DetOrientation {
  Sign sign;
};

/// Sign of the trivialization det(D) → Λmax(W^∨) ⊗ Λmax(V) evaluated on the
/// orientation given by `kernel` and `coker` bases, relative to the
/// orientations of domain and codomain. `complement` is the adapted part
/// e_1..e_k with D e_j = f_j.
inline Sign trivialization_sign(const FinOp& op, const std::vector<Vec>& complement, const std::vector<Vec>& kernel,
                                const std::vector<Vec>& coker) {
  const std::size_t n = op.domain().dim();
  const std::size_t m = op.codomain().dim();
  const std::size_t k = op.rank();
  if (complement.size() != k || kernel.size() != n - k || coker.size() != m - k)
    throw PreconditionError("adapted basis has the wrong number of vectors");
  for (const auto& v : kernel) {
    Vec image = op.apply(v);
    for (const auto& x : image)
      if (x != 0) throw PreconditionError("kernel vector is not in the kernel");
  }
  std::vector<Vec> vbasis = complement;
  vbasis.insert(vbasis.end(), kernel.begin(), kernel.end());
  std::vector<Vec> wbasis;
  for (const auto& e : complement) wbasis.push_back(op.apply(e));
  wbasis.insert(wbasis.end(), coker.begin(), coker.end());
  const Sign sv = n == 0 ? Sign::plus() : determinant_sign(QMatrix::from_columns(n, vbasis));
  const Sign sw = m == 0 ? Sign::plus() : determinant_sign(QMatrix::from_columns(m, wbasis));
  return sv * sw * op.domain().orientation() * op.codomain().orientation();
}

/// The adapted complement used by canonical_trivialization: standard vectors
/// at the pivot columns.
inline std::vector<Vec> canonical_complement(const FinOp& op) {
  std::vector<Vec> out;
  for (auto p : op.pivot_columns()) {
    Vec v(op.domain().dim(), Rational(0));
    v[p] = 1;
    out.push_back(std::move(v));
  }
  return out;
}

/// Sign relating the given orientation of det(op) to the product
/// orientation of Λmax(W^∨) ⊗ Λmax(V).
inline Sign canonical_trivialization(const FinOp& op, DetOrientation o = {}) {
  return o.sign * trivialization_sign(op, canonical_complement(op), op.kernel_basis(), op.cokernel_basis());
}

/// Orientation of det(op) determined by explicit kernel and cokernel bases.
inline DetOrientation orientation_from_bases(const FinOp& op, const std::vector<Vec>& kernel,
                                             const std::vector<Vec>& coker) {
  const auto comp = canonical_complement(op);
  return {trivialization_sign(op, comp, kernel, coker) *
          trivialization_sign(op, comp, op.kernel_basis(), op.cokernel_basis())};
}

inline FinOp direct_sum(const FinOp& a, const FinOp& b) {
  QMatrix m(a.codomain().dim() + b.codomain().dim(), a.domain().dim() + b.domain().dim());
  for (std::size_t r = 0; r < a.matrix().rows(); ++r)
    for (std::size_t c = 0; c < a.matrix().cols(); ++c) m(r, c) = a.matrix()(r, c);
  for (std::size_t r = 0; r < b.matrix().rows(); ++r)
    for (std::size_t c = 0; c < b.matrix().cols(); ++c)
      m(a.matrix().rows() + r, a.matrix().cols() + c) = b.matrix()(r, c);
  auto relabel = [](const OrientedBasisSpace& s, const std::string& tag) {
    std::vector<std::string> labels;
    for (const auto& l : s.basis_labels()) labels.push_back(tag + l);
    return OrientedBasisSpace(std::move(labels), s.orientation());
  };
  return FinOp(direct_sum(relabel(a.domain(), "1."), relabel(b.domain(), "2.")),
               direct_sum(relabel(a.codomain(), "1."), relabel(b.codomain(), "2.")), std::move(m));
}

/// Sign of det(D1 ⊕ D2) → det(D1) ⊗ det(D2) on canonical orientations.
inline Sign direct_sum_sign(const FinOp& op1, const FinOp& op2) {
  return Sign::from_exponent(static_cast<std::int64_t>(op2.coker_dim()) * op1.index());
}

inline Sign exchange_sign(std::int64_t ind1, std::int64_t ind2) { return Sign::from_exponent(ind1 * ind2); }

inline Sign dual_orientation_sign(std::int64_t dim) {
  if (dim < 0) throw PreconditionError("negative dimension");
  return Sign::from_exponent(dim * (dim - 1) / 2);
}

inline Sign sum_transposition_sign(std::int64_t dim_v, std::int64_t dim_w) {
  if (dim_v < 0 || dim_w < 0) throw PreconditionError("negative dimension");
  return Sign::from_exponent(dim_v * dim_w);
}

/// Evaluation pair at one node: ev_plus and ev_minus map into the node fiber.
/// Columns are either coordinates on the resolved domain or on its kernel basis.
struct DifferenceMap {
  QMatrix ev_plus;
  QMatrix ev_minus;
};

/// ξ ↦ (ev₊ξ − ev₋ξ over all nodes, 0) from ker(resolved) to
/// ⊕ fibers ⊕ coker(resolved).
inline FinOp reduced_node_operator(const FinOp& resolved, const std::vector<OrientedBasisSpace>& node_fibers,
                                   const std::vector<DifferenceMap>& difference_maps) {
  if (node_fibers.size() != difference_maps.size())
    throw PreconditionError("one difference map per node fiber is required");
  const auto& kernel = resolved.kernel_basis();
  const std::size_t kdim = kernel.size();
  const QMatrix kmat = QMatrix::from_columns(resolved.domain().dim(), kernel);
  std::size_t fiber_total = 0;
  for (const auto& f : node_fibers) fiber_total += f.dim();
  QMatrix m(fiber_total + resolved.coker_dim(), kdim);
  std::size_t row = 0;
  for (std::size_t i = 0; i < node_fibers.size(); ++i) {
    const auto& dm = difference_maps[i];
    const std::size_t fd = node_fibers[i].dim();
    if (dm.ev_plus.rows() != fd || dm.ev_minus.rows() != fd || dm.ev_plus.cols() != dm.ev_minus.cols())
      throw PreconditionError("evaluation map dimension does not match node fiber " + std::to_string(i));
    QMatrix diff = dm.ev_plus - dm.ev_minus;
    if (diff.cols() == resolved.domain().dim())
      diff = diff * kmat;
    else if (diff.cols() != kdim)
      throw PreconditionError("evaluation map has neither domain nor kernel width at node " + std::to_string(i));
    for (std::size_t r = 0; r < fd; ++r)
      for (std::size_t c = 0; c < kdim; ++c) m(row + r, c) = diff(r, c);
    row += fd;
  }
  OrientedBasisSpace codomain;
  for (std::size_t i = 0; i < node_fibers.size(); ++i) {
    std::vector<std::string> labels;
    for (const auto& l : node_fibers[i].basis_labels()) labels.push_back("node" + std::to_string(i) + "." + l);
    codomain = direct_sum(codomain, OrientedBasisSpace(std::move(labels), node_fibers[i].orientation()));
  }
  codomain = direct_sum(codomain, OrientedBasisSpace::standard(resolved.coker_dim(), "coker"));
  return FinOp(OrientedBasisSpace::standard(kdim, "ker"), std::move(codomain), std::move(m));
}

/// Evaluation at a node of two components (given by index into a component list).
struct NodeEvaluation {
  std::size_t plus_component;
  QMatrix ev_plus;
  std::size_t minus_component;
  QMatrix ev_minus;
};

/// Entry of the ordering used to orient a nodal operator.
struct NodalItem {
  enum class Kind { component, node };
  Kind kind;
  std::size_t index;
};

/// Sign of the orientation induced on det of the nodal operator (from the
/// canonical orientations of the components, the fiber orientations and the
/// declared ordering), relative to the canonical orientation of the reduced
/// operator's determinant line.
inline Sign nodal_orientation_sign(const std::vector<FinOp>& components, const std::vector<OrientedBasisSpace>& fibers,
                                   const std::vector<NodeEvaluation>& nodes, const std::vector<NodalItem>& ordering) {
  if (components.empty()) throw PreconditionError("nodal operator needs at least one component");
  if (fibers.size() != nodes.size()) throw PreconditionError("one fiber per node is required");
  FinOp resolved = components.back();
  for (std::size_t i = components.size() - 1; i-- > 0;) resolved = direct_sum(components[i], resolved);

  std::vector<std::size_t> offset(components.size() + 1, 0);
  for (std::size_t i = 0; i < components.size(); ++i) offset[i + 1] = offset[i] + components[i].domain().dim();
  auto lift = [&](std::size_t comp, const QMatrix& ev, std::size_t fd) {
    if (comp >= components.size()) throw PreconditionError("node references a missing component");
    if (ev.rows() != fd || ev.cols() != components[comp].domain().dim())
      throw PreconditionError("evaluation map dimension mismatch");
    QMatrix out(fd, offset.back());
    for (std::size_t r = 0; r < fd; ++r)
      for (std::size_t c = 0; c < ev.cols(); ++c) out(r, offset[comp] + c) = ev(r, c);
    return out;
  };
  std::vector<DifferenceMap> maps;
  std::int64_t fiber_total = 0;
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    const std::size_t fd = fibers[j].dim();
    fiber_total += static_cast<std::int64_t>(fd);
    maps.push_back({lift(nodes[j].plus_component, nodes[j].ev_plus, fd),
                    lift(nodes[j].minus_component, nodes[j].ev_minus, fd)});
  }
  const FinOp reduced = reduced_node_operator(resolved, fibers, maps);

  Sign s = canonical_trivialization(reduced);
  // Λ(coker^∨) ⊗ Λ(F^∨) → Λ(F^∨) ⊗ Λ(coker^∨)
  s *= Sign::from_exponent(fiber_total * static_cast<std::int64_t>(resolved.coker_dim()));
  // det(D_1 ⊕ (D_2 ⊕ …)) → det(D_1) ⊗ det(D_2) ⊗ …
  FinOp tail = components.back();
  for (std::size_t i = components.size() - 1; i-- > 0;) {
    s *= direct_sum_sign(components[i], tail);
    tail = direct_sum(components[i], tail);
  }
  // Reversed duals put the node factors first in reverse node order.
  std::vector<NodalItem> natural;
  for (std::size_t j = nodes.size(); j-- > 0;) natural.push_back({NodalItem::Kind::node, j});
  for (std::size_t i = 0; i < components.size(); ++i) natural.push_back({NodalItem::Kind::component, i});
  if (ordering.size() != natural.size()) throw PreconditionError("ordering must list every component and node once");
  std::vector<std::int64_t> degrees;
  for (const auto& it : natural)
    degrees.push_back(it.kind == NodalItem::Kind::node ? static_cast<std::int64_t>(fibers[it.index].dim())
                                                       : components[it.index].index());
  std::vector<std::size_t> order;
  std::vector<char> used(natural.size(), 0);
  for (const auto& it : ordering) {
    std::size_t pos = natural.size();
    for (std::size_t k = 0; k < natural.size(); ++k)
      if (natural[k].kind == it.kind && natural[k].index == it.index) pos = k;
    if (pos == natural.size() || used[pos]) throw PreconditionError("ordering must list every component and node once");
    used[pos] = 1;
    order.push_back(pos);
  }
  return s * koszul_sign(degrees, order);
}

}  // namespace quiltsign::detline
