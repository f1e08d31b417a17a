#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <future>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "quiltsign/cohom.hpp"
#include "quiltsign/detline.hpp"
#include "quiltsign/document.hpp"
#include "quiltsign/floer.hpp"
#include "quiltsign/orient.hpp"
#include "quiltsign/sampling.hpp"
#include "quiltsign/testing/oracles.hpp"

/// Randomized property suites behind `quiltsign verify`. Each suite draws
/// from its own stream seeded by (seed, suite name) and keeps the smallest
/// failing input of each property.
namespace quiltsign::verify {

using sampling::Rng;

struct Counterexample {
  std::size_t size = 0;
  std::string text;
};

struct PropertyResult {
  std::string name;
  std::size_t trials = 0;
  std::size_t skipped = 0;
  std::size_t failures = 0;
  std::optional<Counterexample> minimal;
  bool passed() const { return failures == 0 && trials > 0; }
};

struct SuiteResult {
  std::string suite;
  std::uint64_t seed = 0;
  std::vector<PropertyResult> properties;
  bool passed() const {
    return std::all_of(properties.begin(), properties.end(), [](const PropertyResult& p) { return p.passed(); });
  }
};

/// Outcome of one trial; skipped draws do not count as trials.
struct Trial {
  enum class Kind { pass, fail, skip } kind = Kind::pass;
  Counterexample example;
  static Trial pass() { return {}; }
  static Trial skip() { return {Kind::skip, {}}; }
  static Trial fail(std::size_t size, std::string text) { return {Kind::fail, {size, std::move(text)}}; }
};

inline PropertyResult run_property(const std::string& name, std::size_t trials, Rng& rng,
                                   const std::function<Trial(Rng&)>& body) {
  PropertyResult r{name, 0, 0, 0, std::nullopt};
  const std::size_t max_draws = 20 * trials + 100;
  for (std::size_t draws = 0; r.trials < trials && draws < max_draws; ++draws) {
    auto t = body(rng);
    if (t.kind == Trial::Kind::skip) {
      ++r.skipped;
      continue;
    }
    ++r.trials;
    if (t.kind == Trial::Kind::fail) {
      ++r.failures;
      if (!r.minimal || t.example.size < r.minimal->size) r.minimal = std::move(t.example);
    }
  }
  return r;
}

inline std::vector<std::string> suite_names() { return {"detline", "orient", "floer", "cohom"}; }

namespace detail {

struct Property {
  std::string name;
  std::size_t trials;
  std::function<Trial(Rng&)> body;
};

inline std::string finop_text(const detline::FinOp& op) {
  std::ostringstream os;
  os << op.codomain().dim() << "x" << op.domain().dim() << " [";
  for (std::size_t r = 0; r < op.matrix().rows(); ++r) {
    os << (r ? "; " : "");
    for (std::size_t c = 0; c < op.matrix().cols(); ++c) os << (c ? " " : "") << op.matrix()(r, c);
  }
  os << "]";
  return os.str();
}

inline std::string complex_text(const floer::IntComplex& c) {
  doc::ComplexDocument d{c.N, c.generators, c.boundary, std::nullopt};
  return doc::to_json(d).dump();
}

inline std::string cone_text(const cohom::ConeComplex& cc) {
  doc::ConeDocument d{cc.source().cells(), cc.target().cells(), cc.cell_map(), {}};
  return doc::to_json(d).dump();
}

inline std::vector<Property> detline_suite() {
  std::vector<Property> out;
  out.push_back({"direct-sum-sign-vs-wedge", 500, [](Rng& g) {
    const auto a = sampling::random_finop(g, 4), b = sampling::random_finop(g, 4);
    if (detline::direct_sum_sign(a, b) == oracle::direct_sum_sign_by_wedge(a, b)) return Trial::pass();
    return Trial::fail(a.domain().dim() + a.codomain().dim() + b.domain().dim() + b.codomain().dim(),
                       finop_text(a) + " (+) " + finop_text(b));
  }});
  out.push_back({"direct-sum-associativity", 500, [](Rng& g) {
    const auto a = sampling::random_finop(g, 3), b = sampling::random_finop(g, 3), c = sampling::random_finop(g, 3);
    using detline::direct_sum;
    using detline::direct_sum_sign;
    const auto left = direct_sum_sign(direct_sum(a, b), c) * direct_sum_sign(a, b);
    const auto right = direct_sum_sign(a, direct_sum(b, c)) * direct_sum_sign(b, c);
    if (left == right) return Trial::pass();
    return Trial::fail(a.domain().dim() + b.domain().dim() + c.domain().dim(),
                       finop_text(a) + ", " + finop_text(b) + ", " + finop_text(c));
  }});
  out.push_back({"exchange-sign", 500, [](Rng& g) {
    const auto a = sampling::random_finop(g, 4), b = sampling::random_finop(g, 4);
    const auto square = oracle::direct_sum_sign_by_wedge(b, a) * oracle::summand_swap_sign(a, b) *
                        oracle::direct_sum_sign_by_wedge(a, b);
    if (square == detline::exchange_sign(a.index(), b.index())) return Trial::pass();
    return Trial::fail(a.domain().dim() + b.domain().dim(), finop_text(a) + ", " + finop_text(b));
  }});
  return out;
}

inline std::vector<Property> orient_suite() {
  std::vector<Property> out;
  out.push_back({"associativity", 1000, [](Rng& g) {
    const auto cfg = sampling::random_square(g, 4, 5);
    if (!cfg) return Trial::skip();
    const auto sq = orient::commuting_square(cfg->quilt, cfg->labels, cfg->first, cfg->second);
    if (sq.commutes()) return Trial::pass();
    std::ostringstream os;
    os << orient::describe(cfg->first) << " then " << orient::describe(cfg->second) << " gives "
       << sq.first_then_second.str() << ", reversed gives " << sq.second_then_first.str()
       << "; quilt: " << doc::to_json(doc::QuiltDocument{cfg->quilt, cfg->labels}).dump();
    return Trial::fail(sampling::config_size(*cfg), os.str());
  }});
  out.push_back({"end-move-koszul", 1000, [](Rng& g) {
    std::vector<std::int64_t> ind(static_cast<std::size_t>(sampling::uniform(g, 1, 7)));
    for (auto& x : ind) x = sampling::uniform(g, -5, 5);
    const auto from = static_cast<std::size_t>(sampling::uniform(g, 0, static_cast<std::int64_t>(ind.size()) - 1));
    const auto to = static_cast<std::size_t>(sampling::uniform(g, 0, static_cast<std::int64_t>(ind.size()) - 1));
    std::vector<std::size_t> order(ind.size());
    std::iota(order.begin(), order.end(), 0);
    order.erase(order.begin() + static_cast<std::ptrdiff_t>(from));
    order.insert(order.begin() + static_cast<std::ptrdiff_t>(to), from);
    if (orient::end_move_sign(ind, from, to) == koszul_sign(ind, order)) return Trial::pass();
    std::ostringstream os;
    os << "indices";
    for (auto x : ind) os << " " << x;
    os << ", move " << from << " -> " << to;
    return Trial::fail(ind.size(), os.str());
  }});
  out.push_back({"conjugation-trivial", 1000, [](Rng& g) {
    const auto bcount = sampling::uniform(g, 0, 4), rankC = sampling::uniform(g, 1, 4);
    std::vector<std::int64_t> ends(static_cast<std::size_t>(sampling::uniform(g, 0, 4)));
    std::int64_t total = 0;
    for (auto& e : ends) total += (e = sampling::uniform(g, -5, 5));
    const auto ind_c = orient::closed_part_index(total, ends, bcount, rankC);
    if (orient::conjugate_sign_ends(ind_c, bcount, rankC) == Sign::plus()) return Trial::pass();
    return Trial::fail(ends.size(), "boundary circles " + std::to_string(bcount) + ", rank " + std::to_string(rankC));
  }});
  return out;
}

inline std::vector<Property> floer_suite() {
  std::vector<Property> out;
  out.push_back({"homology-vs-oracle", 500, [](Rng& g) {
    const std::int64_t Ns[] = {0, 0, 1, 2, 3, 4};
    const auto c = sampling::random_closed_complex(g, Ns[sampling::uniform(g, 0, 5)]);
    for (const auto& h : floer::homology(c)) {
      const auto out_block = floer::block(c, h.degree), in_block = floer::block(c, h.degree - 1);
      const auto dim = static_cast<std::int64_t>(floer::in_degree(c, h.degree).size());
      if (h.free_rank != dim - oracle::rational_rank(out_block) - oracle::rational_rank(in_block) ||
          h.torsion != oracle::determinantal_torsion(in_block))
        return Trial::fail(c.size(), "degree " + std::to_string(h.degree) + " of " + complex_text(c));
    }
    return Trial::pass();
  }});
  out.push_back({"tensor-closed", 500, [](Rng& g) {
    const std::int64_t N = sampling::coin(g) ? 0 : 2 * sampling::uniform(g, 1, 2);
    const auto x = sampling::random_closed_complex(g, N, 4), y = sampling::random_closed_complex(g, N, 4);
    const auto d2 = floer::verify_d_squared(floer::graded_tensor(x, y));
    if (d2.ok) return Trial::pass();
    return Trial::fail(x.size() * y.size(), complex_text(x) + " (x) " + complex_text(y));
  }});
  out.push_back({"torus-invariant", 500, [](Rng& g) {
    const std::int64_t N = 2 * sampling::uniform(g, 0, 3);
    const auto c = sampling::random_closed_complex(g, N);
    const auto t = floer::torus_invariant(c);
    if (t.agree()) return Trial::pass();
    return Trial::fail(c.size(), complex_text(c));
  }});
  out.push_back({"ainfty", 10000, [](Rng& g) {
    const auto n1 = sampling::uniform(g, 1, 6), n2 = sampling::uniform(g, 1, 6);
    const auto ind = sampling::random_sumsigns(g, n1, n2);
    const auto i1 = sampling::uniform(g, 1, n1);
    const auto r = floer::ainfty_check(n1, n2, i1, n1 + 1, ind);
    if (r.product == Sign::plus()) return Trial::pass();
    std::ostringstream os;
    os << "n1 " << n1 << ", n2 " << n2 << ", i1 " << i1 << ", indices";
    for (auto x : ind) os << " " << x;
    return Trial::fail(ind.size(), os.str());
  }});
  return out;
}

inline std::vector<Property> cohom_suite() {
  std::vector<Property> out;
  out.push_back({"les-exactness", 200, [](Rng& g) {
    const auto cc = sampling::random_simplicial_map(g, 8);
    const auto r = cohom::les_exactness_check(cc);
    if (r.exact) return Trial::pass();
    return Trial::fail(cc.source().size() + cc.target().size(), r.failure + " in " + cone_text(cc));
  }});
  out.push_back({"cone-vs-enumeration", 200, [](Rng& g) {
    const auto cc = sampling::random_simplicial_map(g, 6);
    const oracle::EnumeratedCone e(cc.source().cells(), cc.target().cells(), cc.cell_map());
    for (int k = -1; k <= 2; ++k)
      if (cohom::cone_cohomology(cc, k) != e.cohomology_dim(k))
        return Trial::fail(cc.source().size() + cc.target().size(), "degree " + std::to_string(k) + " of " + cone_text(cc));
    if (cohom::count_relative_spin(cc, {}) != e.relative_count(0))
      return Trial::fail(cc.source().size() + cc.target().size(), "count of " + cone_text(cc));
    return Trial::pass();
  }});
  out.push_back({"identity-acyclic", 200, [](Rng& g) {
    const auto cells = sampling::simplicial_cells("m", sampling::random_simplicial(g, 4, 12));
    auto tgt = cells;
    std::map<std::string, std::string> id;
    for (auto& c : tgt) {
      id[c.id] = "n" + c.id.substr(1);
      c.id = id[c.id];
      for (auto& f : c.faces) f = "n" + f.substr(1);
    }
    const cohom::ConeComplex cc(cohom::GF2Complex(cells), cohom::GF2Complex(tgt), id);
    for (int k = -1; k <= 3; ++k)
      if (cohom::cone_cohomology(cc, k) != 0)
        return Trial::fail(cells.size(), "degree " + std::to_string(k) + " of " + cone_text(cc));
    return Trial::pass();
  }});
  return out;
}

}  // namespace detail

struct Options {
  std::uint64_t seed = 42;
  std::optional<std::size_t> trials;  // overrides every property's default
  std::optional<std::string> only;    // run one property by name
};

inline std::vector<detail::Property> properties(const std::string& suite) {
  if (suite == "detline") return detail::detline_suite();
  if (suite == "orient") return detail::orient_suite();
  if (suite == "floer") return detail::floer_suite();
  if (suite == "cohom") return detail::cohom_suite();
  throw PreconditionError("unknown suite '" + suite + "'");
}

inline SuiteResult run_suite(const std::string& name, const Options& o = {}) {
  SuiteResult r{name, sampling::stream_seed(o.seed, name), {}};
  Rng rng(r.seed);
  for (const auto& p : properties(name))
    if (!o.only || *o.only == p.name) r.properties.push_back(run_property(p.name, o.trials.value_or(p.trials), rng, p.body));
  return r;
}

/// Runs the named suites ("all" expands), one task per suite.
inline std::vector<SuiteResult> run(const std::string& suite, const Options& o = {}) {
  const auto names = suite == "all" ? suite_names() : std::vector<std::string>{suite};
  for (const auto& n : names) properties(n);
  std::vector<std::future<SuiteResult>> tasks;
  for (const auto& n : names) tasks.push_back(std::async(std::launch::async, [=] { return run_suite(n, o); }));
  std::vector<SuiteResult> out;
  for (auto& t : tasks) out.push_back(t.get());
  return out;
}

}  // namespace quiltsign::verify
