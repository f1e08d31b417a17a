#include <catch2/catch_amalgamated.hpp>

#include <complex>
#include <numbers>

#include "quiltsign/builders.hpp"
#include "quiltsign/fixtures.hpp"
#include "quiltsign/index.hpp"
#include "quiltsign/testing/oracles.hpp"

using namespace quiltsign;
using namespace quiltsign::index;
namespace b = quiltsign::build;

TEST_CASE("riemann-roch examples") {
  CHECK(riemann_roch(b::disk("d"), 1, 2) == 3);
  CHECK(riemann_roch(b::closed("s", 0), 1, 0) == 2);
  CHECK(riemann_roch(b::closed("t", 1), 2, 2 * 3) == 6);
}

TEST_CASE("riemann-roch matches the monomial count on the disk") {
  for (std::int64_t mu = -8; mu <= 8; ++mu) {
    const auto oracle = oracle::disk_monomial_dims(mu);
    CHECK(model_disk_dims(mu) == DiskDims{oracle.first, oracle.second});
    CHECK(riemann_roch(b::disk("d"), 1, mu) == oracle.first - oracle.second);
  }
  CHECK(model_disk_dims(0) == DiskDims{1, 0});
  CHECK(model_disk_dims(-1) == DiskDims{0, 0});
  CHECK(model_disk_dims(2) == DiskDims{3, 0});
}

TEST_CASE("node index drop") {
  CHECK(node_index_drop(1 + 1, {1}) == 1);
  CHECK(node_index_drop(7, {}) == 7);
  CHECK(node_index_drop(2 + 1, {2}) == 1);
}

TEST_CASE("maslov index of loops") {
  using C = std::complex<double>;
  LagrangianFramePath constant{{Frame{{C(1, 0)}}, Frame{{C(1, 0)}}, Frame{{C(1, 0)}}}, true};
  CHECK(maslov_index(constant) == 0);

  // t ↦ e^{iπt}ℝ for t ∈ [0, 1]
  LagrangianFramePath half;
  for (int k = 0; k <= 16; ++k) half.samples.push_back(Frame{{std::polar(1.0, std::numbers::pi * k / 16)}});
  half.closed = false;
  CHECK(maslov_index(half) == 1);
  half.closed = true;
  CHECK(maslov_index(half) == 1);
  CHECK(maslov_index(concatenate(half, half)) == 2);
  CHECK(maslov_index(reverse(half)) == -1);

  CHECK(maslov_index(diagonal_loop({1, 2, -4})) == -1);
  CHECK(maslov_index(concatenate(diagonal_loop({3}), diagonal_loop({-1, -2}, 64))) == 0);

  // a non-unitary frame: columns (1, 0), (1, i) span a totally real plane
  LagrangianFramePath skew;
  for (int k = 0; k < 32; ++k) {
    const auto r = std::polar(1.0, std::numbers::pi * k / 32);
    skew.samples.push_back(Frame{{r, r * 1.0}, {0.0, r * C(0, 1)}});
  }
  CHECK(maslov_index(skew) == 2);

  LagrangianFramePath coarse{{Frame{{C(1, 0)}}, Frame{{std::polar(1.0, std::numbers::pi / 2)}}}, true};
  CHECK_THROWS_AS(maslov_index(coarse), PreconditionError);
  LagrangianFramePath singular{{Frame{{C(1, 0), C(1, 0)}, {C(0, 0), C(0, 0)}}}, true};
  CHECK_THROWS_AS(maslov_index(singular), ValidationError);
}

TEST_CASE("quilt index examples") {
  auto q = b::quilt({b::disk("d")});
  BundleLabel l;
  l.patch_rank["d"] = 1;
  l.boundary_maslov[{"d.c", ""}] = 0;
  CHECK(quilt_index(q, l) == 1);
  l.boundary_maslov.clear();
  CHECK_THROWS_WITH(quilt_index(q, l), Catch::Matchers::ContainsSubstring("d.c"));

  // three zero-Maslov strips versus the composed pair
  auto s3 = b::strip_stack(3);
  auto l3 = fixtures::random_labels(s3, 7);
  for (auto& [k, v] : l3.boundary_maslov) v = 0;
  for (auto& [k, v] : l3.seam_maslov_split) v = {0, 0};
  for (auto& [k, v] : l3.patch_rank) v = 1;
  for (auto& [k, v] : l3.end_index) v = 0;
  // 3·1 + (0 − 3) + (0 − 3)
  CHECK(quilt_index(s3, l3) == -3);
  auto r = surface::compose_seams_traced(s3, "s1");
  auto l2 = transport_labels(s3, l3, r);
  CHECK(quilt_index(r.quilt, l2) == -3);
  CHECK(l2.seam_maslov_split.at("sigma0") == std::pair<std::int64_t, std::int64_t>{0, -1});
}

TEST_CASE("quilt index is ordering-blind and additive") {
  for (const auto& f : fixtures::quilt_fixtures()) {
    auto q = f.quilt;
    std::reverse(q.orderings.merged.begin(), q.orderings.merged.end());
    CHECK(quilt_index(q, f.labels) == quilt_index(f.quilt, f.labels));
  }
  auto a = b::quilt({b::strip("s")});
  auto c = b::quilt({b::disk("d", 0, 0, 1), b::disk("x", 0, 0, 1)}, {}, {{"w", "d.w0", "x.w0"}});
  auto la = fixtures::random_labels(a, 3), lc = fixtures::random_labels(c, 4);
  auto both = b::quilt({b::strip("s"), b::disk("d", 0, 0, 1), b::disk("x", 0, 0, 1)}, {}, {{"w", "d.w0", "x.w0"}});
  BundleLabel lb = la;
  for (auto& [k, v] : lc.patch_rank) lb.patch_rank[k] = v;
  for (auto& [k, v] : lc.boundary_maslov) lb.boundary_maslov[k] = v;
  // both numbers ends e1, e2 the same way since s comes first
  CHECK(quilt_index(both, lb) == quilt_index(a, la) + quilt_index(c, lc));
}

TEST_CASE("node deformation matches the index drop") {
  auto q = b::quilt({b::disk("a", 0, 0, 1), b::disk("c", 0, 0, 1)}, {}, {{"w", "a.w0", "c.w0"}});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto l = fixtures::random_labels(q, seed);
    auto r = surface::deform_boundary_node_traced(q, 0);
    auto lt = transport_labels(q, l, r);
    auto resolved = quilt_index_report(q, l);
    CHECK(node_index_drop(resolved.total + resolved.node_drop, {l.patch_rank.at("a")}) == quilt_index(r.quilt, lt));
  }
  auto z = b::quilt({b::closed("s", 0), b::disk("d")}, {}, {}, {{"z", "s", "d"}});
  auto lz = fixtures::random_labels(z, 5);
  auto rz = surface::deform_interior_node_traced(z, 0);
  CHECK(quilt_index(z, lz) == quilt_index(rz.quilt, transport_labels(z, lz, rz)));
  // sphere + disk, rank 1: indices 2 + 1, drop 2
  BundleLabel one;
  one.patch_rank = {{"s", 1}, {"d", 1}};
  one.boundary_maslov[{"d.c", ""}] = 0;
  CHECK(quilt_index(z, one) == 1);
}

TEST_CASE("index is invariant under insertion and composition on the fixtures") {
  const auto fx = fixtures::quilt_fixtures();
  REQUIRE(fx.size() == 20);
  for (const auto& f : fx) {
    INFO(f.name);
    const auto base = quilt_index(f.quilt, f.labels);
    auto ins = surface::insert_diagonal_seam_traced(f.quilt, f.cut_patch, f.cut);
    auto li = transport_labels(f.quilt, f.labels, ins);
    CHECK(quilt_index(ins.quilt, li) == base);
    for (const auto& s : f.compose_strips) {
      auto c = surface::compose_seams_traced(f.quilt, s);
      CHECK(quilt_index(c.quilt, transport_labels(f.quilt, f.labels, c)) == base);
    }
    try {
      auto back = surface::compose_seams_traced(ins.quilt, ins.trace.new_patch);
      CHECK(quilt_index(back.quilt, transport_labels(ins.quilt, li, back)) == base);
    } catch (const PreconditionError&) {
      // S′ keeps true boundary unless the cut strip sat between seams
    }
  }
}
