#include <catch_amalgamated.hpp>

#include "quiltsign/detline.hpp"
#include "quiltsign/testing/oracles.hpp"
#include "support/random.hpp"

using namespace quiltsign;
using namespace quiltsign::detline;

namespace {

// e_r columns of a zero operator F -> 0 (a disk with trivial boundary data).
FinOp trivial_disk(std::size_t rank) { return FinOp::from_matrix(QMatrix(0, rank)); }

QMatrix projection(std::size_t rank) { return QMatrix::identity(rank); }

Sign diffs2_sign(std::size_t r, const std::vector<NodalItem>& ordering) {
  std::vector<FinOp> comps{trivial_disk(r), trivial_disk(r)};
  // w- on the first disk, w+ on the second
  std::vector<NodeEvaluation> nodes{{1, projection(r), 0, projection(r)}};
  std::vector<OrientedBasisSpace> fibers{OrientedBasisSpace::standard(r, "F")};
  return nodal_orientation_sign(comps, fibers, nodes, ordering);
}

}  // namespace

TEST_CASE("OrientedBasisSpace permutations flip orientation by sign", "[detline]") {
  auto v = OrientedBasisSpace::standard(3);
  CHECK(v.dim() == 3);
  CHECK(v.permuted({1, 0, 2}).orientation() == Sign::minus());
  CHECK(v.permuted({1, 2, 0}).orientation() == Sign::plus());
  CHECK_THROWS_AS(OrientedBasisSpace({"a", "a"}), ValidationError);
}

TEST_CASE("FinOp kernel and cokernel follow rank-nullity", "[detline]") {
  qs_test::Rng rng(7);
  for (int t = 0; t < 300; ++t) {
    auto op = qs_test::random_finop(rng, 5);
    CHECK(op.index() == static_cast<std::int64_t>(op.domain().dim()) - static_cast<std::int64_t>(op.codomain().dim()));
    for (const auto& v : op.kernel_basis())
      for (const auto& x : op.apply(v)) CHECK(x == 0);
    auto again = FinOp::from_matrix(op.matrix());
    CHECK(again.kernel_basis() == op.kernel_basis());
    CHECK(again.cokernel_basis() == op.cokernel_basis());
  }
}

TEST_CASE("canonical_trivialization", "[detline]") {
  SECTION("identity") { CHECK(canonical_trivialization(FinOp::from_matrix(QMatrix::identity(1))) == Sign::plus()); }
  SECTION("difference map x1 - x2 orients the diagonal by e1 + e2") {
    FinOp d = FinOp::from_matrix(QMatrix{{1, -1}});
    REQUIRE(d.kernel_basis().size() == 1);
    CHECK(d.kernel_basis()[0] == Vec{1, 1});
    CHECK(canonical_trivialization(d) == Sign::plus());
  }
  SECTION("x2 - x1 gives the opposite orientation") {
    FinOp d = FinOp::from_matrix(QMatrix{{-1, 1}});
    CHECK(d.kernel_basis()[0] == Vec{1, 1});
    CHECK(canonical_trivialization(d) == Sign::minus());
  }
  SECTION("orientation of domain and codomain enters multiplicatively") {
    FinOp d(OrientedBasisSpace({"x1", "x2"}, Sign::minus()), OrientedBasisSpace({"y"}), QMatrix{{1, -1}});
    CHECK(canonical_trivialization(d) == Sign::minus());
    CHECK(canonical_trivialization(d, {Sign::minus()}) == Sign::plus());
  }
}

TEST_CASE("canonical_trivialization does not depend on the adapted basis", "[detline][property]") {
  qs_test::Rng rng(11);
  for (int t = 0; t < 500; ++t) {
    auto op = qs_test::random_finop(rng, 4);
    const std::size_t n = op.domain().dim();
    const std::size_t m = op.codomain().dim();
    const auto& kernel = op.kernel_basis();
    const auto base = canonical_complement(op);
    const Sign reference = canonical_trivialization(op);
    for (int trial = 0; trial < 2; ++trial) {
      // complement' = complement * B + kernel * R, B invertible
      const std::size_t k = base.size();
      QMatrix b;
      do {
        b = qs_test::random_matrix(rng, k, k);
      } while (k > 0 && determinant(b) == 0);
      std::vector<Vec> comp(k, Vec(n, Rational(0)));
      for (std::size_t j = 0; j < k; ++j) {
        for (std::size_t i = 0; i < k; ++i)
          for (std::size_t c = 0; c < n; ++c) comp[j][c] += b(i, j) * base[i][c];
        for (const auto& kv : kernel) {
          const int r = qs_test::uniform(rng, -2, 2);
          for (std::size_t c = 0; c < n; ++c) comp[j][c] += r * kv[c];
        }
      }
      // coker representatives shifted by image vectors
      std::vector<Vec> coker = op.cokernel_basis();
      for (auto& cv : coker)
        for (const auto& e : base) {
          const int r = qs_test::uniform(rng, -2, 2);
          const Vec img = op.apply(e);
          for (std::size_t c = 0; c < m; ++c) cv[c] += r * img[c];
        }
      CHECK(trivialization_sign(op, comp, kernel, coker) == reference);
    }
  }
}

TEST_CASE("orientation_from_bases agrees with transition determinants", "[detline]") {
  qs_test::Rng rng(13);
  for (int t = 0; t < 200; ++t) {
    auto op = qs_test::random_finop(rng, 4);
    std::vector<Vec> kernel = op.kernel_basis();
    if (kernel.size() >= 2) std::swap(kernel[0], kernel[1]);
    if (!kernel.empty())
      for (auto& x : kernel[0]) x *= -3;
    std::vector<Vec> coker = op.cokernel_basis();
    if (coker.size() >= 2) std::swap(coker[0], coker[1]);
    CHECK(orientation_from_bases(op, kernel, coker).sign == oracle::orientation_transition(op, kernel, coker));
  }
}

TEST_CASE("direct_sum_sign", "[detline]") {
  SECTION("coker(op2) of dim 1 and Ind(op1) = 1") {
    auto op1 = FinOp::from_matrix(QMatrix(0, 1));
    auto op2 = FinOp::from_matrix(QMatrix(1, 0));
    CHECK(op1.index() == 1);
    CHECK(op2.coker_dim() == 1);
    CHECK(direct_sum_sign(op1, op2) == Sign::minus());
    CHECK(oracle::direct_sum_sign_by_wedge(op1, op2) == Sign::minus());
  }
  SECTION("surjective op2") {
    auto op1 = FinOp::from_matrix(QMatrix(2, 5));
    auto op2 = FinOp::from_matrix(QMatrix{{1, 0, 2}});
    CHECK(direct_sum_sign(op1, op2) == Sign::plus());
  }
  SECTION("random 3x4 and 4x2 matrices against the wedge oracle") {
    qs_test::Rng rng(17);
    for (int t = 0; t < 200; ++t) {
      auto op1 = FinOp::from_matrix(qs_test::random_matrix(rng, 3, 4));
      auto op2 = FinOp::from_matrix(qs_test::random_matrix(rng, 4, 2));
      CHECK(direct_sum_sign(op1, op2) == oracle::direct_sum_sign_by_wedge(op1, op2));
    }
  }
  SECTION("random shapes against the wedge oracle") {
    qs_test::Rng rng(19);
    for (int t = 0; t < 300; ++t) {
      auto op1 = qs_test::random_finop(rng, 4);
      auto op2 = qs_test::random_finop(rng, 4);
      CHECK(direct_sum_sign(op1, op2) == oracle::direct_sum_sign_by_wedge(op1, op2));
      CHECK(direct_sum(op1, op2).index() == op1.index() + op2.index());
    }
  }
}

TEST_CASE("direct sums are associative on determinant lines", "[detline][property]") {
  qs_test::Rng rng(23);
  for (int t = 0; t < 300; ++t) {
    auto d1 = qs_test::random_finop(rng, 3);
    auto d2 = qs_test::random_finop(rng, 3);
    auto d3 = qs_test::random_finop(rng, 3);
    // (D1 ⊕ D2) ⊕ D3 and D1 ⊕ (D2 ⊕ D3) are the same operator on the same bases.
    const Sign left = direct_sum_sign(direct_sum(d1, d2), d3) * direct_sum_sign(d1, d2);
    const Sign right = direct_sum_sign(d1, direct_sum(d2, d3)) * direct_sum_sign(d2, d3);
    CHECK(left == right);
  }
}

TEST_CASE("exchange_sign", "[detline]") {
  CHECK(exchange_sign(1, 1) == Sign::minus());
  for (int k = -5; k <= 5; ++k) CHECK(exchange_sign(0, k) == Sign::plus());
  qs_test::Rng rng(29);
  for (int t = 0; t < 300; ++t) {
    auto op1 = qs_test::random_finop(rng, 4);
    auto op2 = qs_test::random_finop(rng, 4);
    const Sign square = oracle::direct_sum_sign_by_wedge(op2, op1) * oracle::summand_swap_sign(op1, op2) *
                        oracle::direct_sum_sign_by_wedge(op1, op2);
    CHECK(square == exchange_sign(op1.index(), op2.index()));
  }
}

TEST_CASE("dual and sum transposition signs", "[detline]") {
  CHECK(dual_orientation_sign(1) == Sign::plus());
  CHECK(dual_orientation_sign(2) == Sign::minus());
  CHECK(dual_orientation_sign(4) == Sign::plus());
  for (std::size_t d = 0; d <= 9; ++d) {
    std::vector<std::size_t> reversal(d);
    for (std::size_t i = 0; i < d; ++i) reversal[i] = d - 1 - i;
    CHECK(dual_orientation_sign(static_cast<std::int64_t>(d)) == oracle::inversion_sign(reversal));
  }
  CHECK(sum_transposition_sign(1, 1) == Sign::minus());
  CHECK(sum_transposition_sign(0, 7) == Sign::plus());
  CHECK(sum_transposition_sign(2, 3) == Sign::plus());
  for (std::size_t v = 0; v <= 4; ++v)
    for (std::size_t w = 0; w <= 4; ++w) {
      std::vector<std::size_t> swap;
      for (std::size_t i = 0; i < w; ++i) swap.push_back(v + i);
      for (std::size_t i = 0; i < v; ++i) swap.push_back(i);
      CHECK(sum_transposition_sign(static_cast<std::int64_t>(v), static_cast<std::int64_t>(w)) ==
            oracle::inversion_sign(swap));
    }
}

TEST_CASE("reduced node operator and nodal orientations", "[detline]") {
  using K = NodalItem::Kind;
  SECTION("difference of evaluations on two disks") {
    for (std::size_t r = 1; r <= 3; ++r) {
      auto resolved = direct_sum(trivial_disk(r), trivial_disk(r));
      QMatrix ev_minus(r, 2 * r), ev_plus(r, 2 * r);
      for (std::size_t i = 0; i < r; ++i) {
        ev_minus(i, i) = 1;
        ev_plus(i, r + i) = 1;
      }
      auto red = reduced_node_operator(resolved, {OrientedBasisSpace::standard(r, "F")}, {{ev_plus, ev_minus}});
      CHECK(red.kernel_dim() == r);
      CHECK(red.coker_dim() == 0);
      CHECK(canonical_trivialization(red) == Sign::from_exponent(static_cast<std::int64_t>(r)));
    }
  }
  SECTION("node after both components gives (-1)^rank") {
    for (std::size_t r = 1; r <= 3; ++r)
      CHECK(diffs2_sign(r, {{K::component, 0}, {K::component, 1}, {K::node, 0}}) ==
            Sign::from_exponent(static_cast<std::int64_t>(r)));
  }
  SECTION("node between the components gives the standard orientation") {
    for (std::size_t r = 1; r <= 3; ++r)
      CHECK(diffs2_sign(r, {{K::component, 0}, {K::node, 0}, {K::component, 1}}) == Sign::plus());
  }
  SECTION("no nodes") {
    auto resolved = FinOp::from_matrix(QMatrix{{1, 0, 0}, {0, 0, 0}});
    auto red = reduced_node_operator(resolved, {}, {});
    CHECK(red.domain().dim() == 2);
    CHECK(red.codomain().dim() == 1);
    CHECK(red.matrix().is_zero());
    CHECK(canonical_trivialization(red) == Sign::plus());
  }
  SECTION("dimension mismatch") {
    auto resolved = trivial_disk(2);
    CHECK_THROWS_AS(reduced_node_operator(resolved, {OrientedBasisSpace::standard(1)},
                                          {{QMatrix(2, 2), QMatrix(2, 2)}}),
                    PreconditionError);
  }
}
