// One pass/fail line per acceptance criterion. Exit 0 iff all pass.
#include <array>
#include <chrono>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "quiltsign/builders.hpp"
#include "quiltsign/cohom.hpp"
#include "quiltsign/detline.hpp"
#include "quiltsign/document.hpp"
#include "quiltsign/fixtures.hpp"
#include "quiltsign/floer.hpp"
#include "quiltsign/index.hpp"
#include "quiltsign/orient.hpp"
#include "quiltsign/sampling.hpp"
#include "quiltsign/testing/oracles.hpp"

using namespace quiltsign;
namespace smp = quiltsign::sampling;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
};

detline::FinOp trivial_disk(std::size_t r) { return detline::FinOp::from_matrix(QMatrix(0, r)); }

Outcome difference_maps() {
  using namespace detline;
  using K = NodalItem::Kind;
  Outcome o;
  const auto d = FinOp::from_matrix(QMatrix{{1, -1}});
  const auto dm = FinOp::from_matrix(QMatrix{{-1, 1}});
  if (d.kernel_basis() != std::vector<Vec>{Vec{1, 1}} || canonical_trivialization(d) != Sign::plus())
    o.fail("D does not give the standard diagonal orientation");
  if (dm.kernel_basis() != std::vector<Vec>{Vec{1, 1}} || canonical_trivialization(dm) != Sign::minus())
    o.fail("D- does not give the opposite orientation");
  for (std::size_t r = 1; r <= 3; ++r) {
    std::vector<FinOp> comps{trivial_disk(r), trivial_disk(r)};
    std::vector<NodeEvaluation> nodes{{1, QMatrix::identity(r), 0, QMatrix::identity(r)}};
    std::vector<OrientedBasisSpace> fibers{OrientedBasisSpace::standard(r, "F")};
    const auto after = nodal_orientation_sign(comps, fibers, nodes, {{K::component, 0}, {K::component, 1}, {K::node, 0}});
    const auto between = nodal_orientation_sign(comps, fibers, nodes, {{K::component, 0}, {K::node, 0}, {K::component, 1}});
    if (after != Sign::from_exponent(static_cast<std::int64_t>(r)) || between != Sign::plus())
      o.fail("nodal factor wrong at rank " + std::to_string(r));
  }
  o.detail = o.ok ? "D, D-, (-1)^rank F for rank 1..3" : o.detail;
  return o;
}

Outcome riemann_roch() {
  Outcome o;
  const auto disk = build::disk("d");
  for (std::int64_t mu = -8; mu <= 8; ++mu) {
    const auto m = oracle::disk_monomial_dims(mu);
    const auto dims = index::model_disk_dims(mu);
    if (dims.kernel != m.first || dims.cokernel != m.second ||
        index::riemann_roch(disk, 1, mu) != dims.kernel - dims.cokernel)
      o.fail("mismatch at mu = " + std::to_string(mu));
  }
  if (o.ok) o.detail = "mu in [-8, 8]";
  return o;
}

Outcome associativity() {
  Outcome o;
  smp::Rng rng(smp::stream_seed(42, "acceptance-associativity"));
  std::size_t valid = 0, failures = 0;
  while (valid < 1000) {
    const auto c = smp::random_square(rng, 4, 5);
    if (!c) continue;
    ++valid;
    if (!orient::commuting_square(c->quilt, c->labels, c->first, c->second).commutes()) ++failures;
  }
  if (failures) o.fail(std::to_string(failures) + " of 1000 squares disagree");
  else o.detail = "1000 configurations, 0 failures";
  return o;
}

Outcome reference_signs() {
  Outcome o;
  if (orient::strip_sign() != Sign::plus()) o.fail("strip sign");
  for (std::int64_t ind = 0; ind <= 3; ++ind)
    if (orient::cap_sign(ind) != Sign::from_exponent(ind)) o.fail("cap sign at Ind " + std::to_string(ind));
  smp::Rng rng(smp::stream_seed(42, "acceptance-annulus"));
  int checked = 0;
  while (checked < 100) {
    const auto n = static_cast<std::size_t>(smp::uniform(rng, 1, 3));
    QMatrix re0(n, n), im0(n, n), re1(n, n), im1(n, n);
    std::vector<std::vector<std::complex<double>>> a0(n, std::vector<std::complex<double>>(n)), a1 = a0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const auto x0 = smp::uniform(rng, -3, 3), y0 = smp::uniform(rng, -3, 3);
        const auto x1 = smp::uniform(rng, -3, 3), y1 = smp::uniform(rng, -3, 3);
        re0(i, j) = x0, im0(i, j) = y0, re1(i, j) = x1, im1(i, j) = y1;
        a0[i][j] = {double(x0), double(y0)};
        a1[i][j] = {double(x1), double(y1)};
      }
    const int expected = oracle::annulus_sign_complex(a0, a1);
    if (expected == 0) continue;
    if (orient::annulus_criterion(re0, im0, re1, im1).value() != expected) o.fail("annulus pair disagrees");
    ++checked;
  }
  if (o.ok) o.detail = "strip, cap for Ind 0..3, 100 annulus pairs";
  return o;
}

Outcome ainfty() {
  Outcome o;
  smp::Rng rng(smp::stream_seed(42, "acceptance-ainfty"));
  std::size_t failures = 0;
  for (int it = 0; it < 10000; ++it) {
    const auto n1 = smp::uniform(rng, 1, 6), n2 = smp::uniform(rng, 1, 6);
    const auto ind = smp::random_sumsigns(rng, n1, n2);
    const auto i1 = smp::uniform(rng, 1, n1);
    if (floer::ainfty_check(n1, n2, i1, n1 + 1, ind).product != Sign::plus()) ++failures;
  }
  if (failures) o.fail(std::to_string(failures) + " of 10000 vectors fail");
  else o.detail = "10000 vectors, 0 failures";
  return o;
}

floer::IntComplex doubling() {
  ZMatrix m(2, 2);
  m(1, 0) = 2;
  return floer::make_complex({{"a0", 0, std::nullopt}, {"a1", 1, std::nullopt}}, m, 0);
}

Outcome homology() {
  Outcome o;
  smp::Rng rng(smp::stream_seed(42, "acceptance-homology"));
  for (int it = 0; it < 500; ++it) {
    const std::int64_t N = std::array<std::int64_t, 6>{0, 0, 1, 2, 3, 4}[static_cast<std::size_t>(smp::uniform(rng, 0, 5))];
    const auto c = smp::random_closed_complex(rng, N, 8, 4);
    for (const auto& h : floer::homology(c)) {
      const auto out = floer::block(c, h.degree), in = floer::block(c, h.degree - 1);
      const auto dim = static_cast<std::int64_t>(floer::in_degree(c, h.degree).size());
      if (h.free_rank != dim - oracle::rational_rank(out) - oracle::rational_rank(in) ||
          h.torsion != oracle::determinantal_torsion(in))
        o.fail("homology differs from oracle");
    }
  }
  for (int it = 0; it < 500; ++it) {
    const std::int64_t N = smp::coin(rng) ? 0 : 2;
    const auto x = smp::random_closed_complex(rng, N, 4), y = smp::random_closed_complex(rng, N, 4);
    if (!floer::verify_d_squared(floer::graded_tensor(x, y)).ok) o.fail("tensor product not closed");
  }
  const auto h = floer::homology(floer::graded_tensor(doubling(), doubling()));
  const auto tor = std::find_if(h.begin(), h.end(), [](const floer::HomologyGroup& g) { return g.degree == 1; });
  if (tor == h.end() || tor->free_rank != 0 || tor->torsion != std::vector<BigInt>{2}) o.fail("no Z/2 Tor class");
  if (o.ok) o.detail = "500 complexes, 500 tensor pairs, Tor class in degree 1";
  return o;
}

Outcome torus() {
  Outcome o;
  smp::Rng rng(smp::stream_seed(42, "acceptance-torus"));
  for (int it = 0; it < 500; ++it) {
    const auto c = smp::random_closed_complex(rng, 2 * smp::uniform(rng, 0, 3));
    if (!floer::torus_invariant(c).agree()) o.fail("chain and homology counts differ");
  }
  if (o.ok) o.detail = "500 complexes";
  return o;
}

Outcome insertion_composition() {
  Outcome o;
  const auto fx = fixtures::quilt_fixtures();
  if (fx.size() != 20) o.fail("expected 20 fixture quilts");
  std::size_t checks = 0;
  for (const auto& f : fx) {
    const auto base = index::quilt_index(f.quilt, f.labels);
    const auto ins = surface::insert_diagonal_seam_traced(f.quilt, f.cut_patch, f.cut);
    ++checks;
    if (index::quilt_index(ins.quilt, index::transport_labels(f.quilt, f.labels, ins)) != base)
      o.fail(f.name + ": insertion changes the index");
    for (const auto& s : f.compose_strips) {
      const auto c = surface::compose_seams_traced(f.quilt, s);
      ++checks;
      if (index::quilt_index(c.quilt, index::transport_labels(f.quilt, f.labels, c)) != base)
        o.fail(f.name + ": composition changes the index");
    }
  }
  if (o.ok) o.detail = "20 quilts, " + std::to_string(checks) + " surgeries";
  return o;
}

Outcome relative_cohomology() {
  Outcome o;
  smp::Rng rng(smp::stream_seed(42, "acceptance-cohom"));
  for (int t = 0; t < 200; ++t) {
    const auto cc = smp::random_simplicial_map(rng, 8);
    const auto r = cohom::les_exactness_check(cc);
    if (!r.exact) o.fail(r.failure);
  }
  std::size_t obstructed = 0;
  for (const auto& fx : fixtures::cone_fixtures()) {
    const auto& cc = fx.cone;
    if (cc.source().size() + cc.target().size() > 12) continue;
    const oracle::EnumeratedCone e(cc.source().cells(), cc.target().cells(), cc.cell_map());
    const auto want = e.relative_count(e.source_mask(fx.w2));
    if (want == 0) ++obstructed;
    if (cohom::count_relative_spin(cc, fx.w2) != want) o.fail(fx.name + ": count differs from enumeration");
  }
  if (obstructed == 0) o.fail("no obstructed fixture");
  if (o.ok) o.detail = "200 maps, 13 fixtures (" + std::to_string(obstructed) + " obstructed)";
  return o;
}

doc::json load(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return doc::parse_text(ss.str());
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(QUILTSIGN_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome cli_contract() {
  Outcome o;
  std::size_t files = 0;
  for (const auto& e : fs::recursive_directory_iterator(QUILTSIGN_FIXTURE_DIR)) {
    if (e.path().extension() != ".json") continue;
    ++files;
    const auto j = load(e.path());
    bool same = false;
    if (j.contains("cells") || j.contains("source")) {
      const auto d = doc::parse_cone(j);
      same = doc::parse_cone(doc::parse_text(doc::to_json(d).dump())) == d;
    } else if (j.contains("generators") || j.contains("tensor")) {
      const auto d = doc::parse_homology(j);
      same = doc::parse_homology(doc::parse_text(doc::to_json(d).dump())) == d;
    } else {
      const auto d = doc::parse_quilt(j);
      same = doc::parse_quilt(doc::parse_text(doc::to_json(d).dump())) == d;
    }
    if (!same) o.fail(e.path().filename().string() + " does not round-trip");
  }
  const int code = run_cli("verify --suite all --seed 42");
  if (code != 0) o.fail("verify --suite all --seed 42 exited " + std::to_string(code));
  if (o.ok) o.detail = std::to_string(files) + " documents, verify exit 0";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"difference-map orientations", difference_maps},
      {"riemann-roch vs disk model", riemann_roch},
      {"gluing associativity", associativity},
      {"reference signs", reference_signs},
      {"A-infinity cancellation", ainfty},
      {"homology and kunneth", homology},
      {"torus invariant", torus},
      {"diagonal insertion and composition", insertion_composition},
      {"GF(2) relative cohomology", relative_cohomology},
      {"CLI contract", cli_contract},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    const auto ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
    std::cout << (o.ok ? "PASS" : "FAIL") << "  " << (i + 1) << ". " << criteria[i].first << "  (" << o.detail << ", "
              << ms << " ms)\n";
    if (!o.ok) ++failed;
  }
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : std::string("all criteria pass")) << "\n";
  return failed ? 1 : 0;
}
