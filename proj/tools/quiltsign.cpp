// quiltsign: command-line front end.
//
//   quiltsign index <file>
//   quiltsign sign <file> --operation <glue-interior|glue-boundary|glue-self|glue-ends|permute|conjugate|disjoint>
//   quiltsign homology <file> [--q]
//   quiltsign cohom <file>
//   quiltsign verify [--suite <detline|orient|floer|cohom|all>] [--seed n] [--trials n] [--property name]
//
// --json switches every command to machine output. Exit codes: 0 ok, 2 parse,
// 3 validation, 4 precondition, 5 property failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "quiltsign/cohom.hpp"
#include "quiltsign/document.hpp"
#include "quiltsign/floer.hpp"
#include "quiltsign/index.hpp"
#include "quiltsign/orient.hpp"
#include "quiltsign/verify.hpp"

namespace {

using namespace quiltsign;
using json = doc::json;

enum Exit { ok = 0, parse = 2, validation = 3, precondition = 4, property = 5 };

struct Options {
  bool json = false;
  std::string file;
  std::string operation;
  std::string node, e_plus, e_minus, permutation;
  bool segment_last = false;
  bool q = false;
  std::string suite = "all";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<std::string> property;
};

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return doc::parse_text(ss.str());
}

void emit(const Options& o, const json& j, const std::string& text) {
  if (o.json)
    std::cout << j.dump(2) << "\n";
  else
    std::cout << text;
}

std::string bigint_string(const BigInt& b) { return b.str(); }

// ---- index ----

int cmd_index(const Options& o) {
  const auto d = doc::parse_quilt(read_json(o.file));
  if (!d.labels) throw ValidationError("missing label block: the document has no 'labels'");
  const auto r = index::quilt_index_report(d.quilt, *d.labels);
  std::ostringstream os;
  os << "index: " << r.total << "\n";
  json ps = json::array();
  for (const auto& p : r.patches) {
    os << "  patch " << p.patch << ": rank " << p.rank << ", euler " << p.euler << ", maslov " << p.maslov
       << ", riemann-roch " << p.riemann_roch << "\n";
    ps.push_back({{"patch", p.patch}, {"rank", p.rank}, {"euler", p.euler}, {"maslov", p.maslov}, {"riemann_roch", p.riemann_roch}});
  }
  os << "  end correction: " << r.end_correction << "\n  node drop: " << r.node_drop << "\n";
  emit(o, {{"index", r.total}, {"patches", ps}, {"end_correction", r.end_correction}, {"node_drop", r.node_drop}}, os.str());
  return ok;
}

// ---- sign ----

std::vector<std::size_t> parse_permutation(const std::string& s) {
  std::vector<std::size_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const auto v = std::stoll(item, &used);
      if (used != item.size() || v < 0) throw std::invalid_argument(item);
      out.push_back(static_cast<std::size_t>(v));
    } catch (const std::logic_error&) {
      throw ParseError("--permutation: bad entry '" + item + "'");
    }
  }
  return out;
}

void require(const std::string& value, const char* flag, const std::string& op) {
  if (value.empty()) throw ParseError(op + " needs " + flag);
}

int cmd_sign(const Options& o) {
  const auto d = doc::parse_quilt(read_json(o.file));
  const index::BundleLabel labels = d.labels ? *d.labels : index::BundleLabel{};
  const auto& q = d.quilt;
  orient::SignReport r;
  const auto& op = o.operation;
  auto node_is_self = [&](const std::string& id) {
    const surface::Layout lay(q);
    const auto& n = q.boundary_nodes[orient::detail::node_index_of(q.boundary_nodes, id)];
    return lay.circle_of_point(n.minus) == lay.circle_of_point(n.plus);
  };
  if (op == "glue-interior") {
    require(o.node, "--node", op);
    r = orient::interior_glue(q, o.node);
  } else if (op == "glue-boundary" || op == "glue-self") {
    require(o.node, "--node", op);
    const bool self = node_is_self(o.node);
    if (self != (op == "glue-self"))
      throw PreconditionError("node '" + o.node + "' " + (self ? "joins one boundary circle; use glue-self"
                                                              : "joins two boundary circles; use glue-boundary"));
    r = orient::boundary_glue(q, labels, o.node, !o.segment_last);
  } else if (op == "glue-ends") {
    require(o.e_plus, "--e-plus", op);
    require(o.e_minus, "--e-minus", op);
    r = orient::end_glue(q, labels, o.e_plus, o.e_minus);
  } else if (op == "permute") {
    require(o.permutation, "--permutation", op);
    r = orient::permute_nodes(q, labels, parse_permutation(o.permutation));
  } else if (op == "conjugate") {
    r = orient::conjugate_quilt(q, labels);
  } else if (op == "disjoint") {
    r = orient::disjoint_quilt(q, labels);
  } else {
    throw ParseError("unknown operation '" + op + "'");
  }
  std::ostringstream os;
  os << r.sign.str() << "\n  rule: " << r.rule << "\n";
  json terms = json::object();
  for (const auto& t : r.terms) {
    os << "  " << t.name << " = " << t.value << "\n";
    terms[t.name] = t.value;
  }
  emit(o, {{"sign", r.sign.value()}, {"rule", r.rule}, {"terms", terms}}, os.str());
  return ok;
}

// ---- homology ----

std::string group_text(const floer::HomologyGroup& h) {
  std::vector<std::string> parts;
  if (h.free_rank == 1) parts.push_back("Z");
  if (h.free_rank > 1) parts.push_back("Z^" + std::to_string(h.free_rank));
  for (const auto& t : h.torsion) parts.push_back("Z/" + bigint_string(t));
  if (parts.empty()) return "0";
  std::string s = parts.front();
  for (std::size_t k = 1; k < parts.size(); ++k) s += " + " + parts[k];
  return s;
}

std::string poly_text(const floer::QPoly& p) {
  if (p.coeffs.empty()) return "0";
  std::string s;
  for (const auto& [e, c] : p.coeffs) {
    std::string term = c.str();
    if (e > 0) term = (c == 1 ? "" : c == -1 ? "-" : term + "*") + "q" + (e > 1 ? "^" + std::to_string(e) : "");
    if (!s.empty() && term.front() != '-') s += "+";
    s += term;
  }
  return s;
}

int cmd_homology(const Options& o) {
  const auto d = doc::parse_homology(read_json(o.file));
  const auto c = d.factors.size() == 2 ? floer::graded_tensor(d.factors[0].complex(), d.factors[1].complex())
                                       : d.factors[0].complex();
  const auto h = floer::homology(c);
  std::ostringstream os;
  os << "N: " << c.N << "\n";
  json groups = json::array();
  for (const auto& g : h) {
    os << "H^" << g.degree << ": " << group_text(g) << "\n";
    json tors = json::array();
    for (const auto& t : g.torsion) tors.push_back(t.convert_to<std::int64_t>());
    groups.push_back({{"degree", g.degree}, {"free_rank", g.free_rank}, {"torsion", tors}});
  }
  json out{{"N", c.N}, {"homology", groups}};
  if (c.N % 2 == 0) {
    const auto t = floer::torus_invariant(c);
    os << "torus invariant: " << t.homology << " (chain level " << t.chain << ")\n";
    out["torus_invariant"] = {{"chain", t.chain}, {"homology", t.homology}};
  }
  if (o.q) {
    if (d.factors.size() != 1 || !d.factors[0].entries)
      throw PreconditionError("--q needs a single complex given by trajectory entries");
    const auto& f = d.factors[0];
    const auto gens = floer::normalized(f.generators, f.N);
    const auto m = floer::q_boundary(gens, *f.entries, f.N);
    const bool consistent = floer::at_one(m) == c.boundary;
    os << "q-boundary:\n";
    json entries = json::array();
    for (std::size_t i = 0; i < m.size(); ++i)
      for (std::size_t j = 0; j < m.size(); ++j) {
        if (m[i][j].coeffs.empty()) continue;
        os << "  d(" << gens[j].id << ") contains (" << poly_text(m[i][j]) << ") " << gens[i].id << "\n";
        json coeffs = json::object();
        for (const auto& [e, v] : m[i][j].coeffs) coeffs[std::to_string(e)] = v.convert_to<std::int64_t>();
        entries.push_back({{"source", gens[j].id}, {"target", gens[i].id}, {"coefficients", coeffs}});
      }
    os << "q=1: " << (consistent ? "agrees with the integer boundary" : "DISAGREES with the integer boundary") << "\n";
    out["q_boundary"] = entries;
    out["q_at_one_consistent"] = consistent;
  }
  emit(o, out, os.str());
  return ok;
}

// ---- cohom ----

int cmd_cohom(const Options& o) {
  const auto d = doc::parse_cone(read_json(o.file));
  const auto cc = d.cone();
  const int top = cohom::cone_top(cc) + 1;
  std::ostringstream os;
  json src = json::array(), tgt = json::array(), cone = json::array();
  os << "H^k(M):   ";
  for (int k = 0; k <= top; ++k) {
    os << " " << cohom::cohomology_dim(cc.source(), k);
    src.push_back(cohom::cohomology_dim(cc.source(), k));
  }
  os << "\nH^k(N):   ";
  for (int k = 0; k <= top; ++k) {
    os << " " << cohom::cohomology_dim(cc.target(), k);
    tgt.push_back(cohom::cohomology_dim(cc.target(), k));
  }
  os << "\nH^k(cone):";
  for (int k = -1; k <= top; ++k) {
    os << " " << cohom::cone_cohomology(cc, k);
    cone.push_back(cohom::cone_cohomology(cc, k));
  }
  os << "   (from k = -1)\n";
  const auto les = cohom::les_exactness_check(cc);
  os << "long exact sequence: " << (les.exact ? "exact" : "NOT exact at " + les.failure) << "\n";
  const bool vanishes = cohom::obstruction_vanishes(cc, d.w2_class);
  const auto count = cohom::count_relative_spin(cc, d.w2_class);
  os << "obstruction: " << (vanishes ? "vanishes" : "does not vanish") << "\nrelative structures: " << count << "\n";
  json out{{"source", src},         {"target", tgt},
           {"cone", cone},          {"cone_first_degree", -1},
           {"les_exact", les.exact}, {"obstruction_vanishes", vanishes},
           {"relative_structures", count}};
  if (!les.exact) out["les_failure"] = les.failure;
  emit(o, out, os.str());
  return les.exact ? ok : property;
}

// ---- verify ----

int cmd_verify(const Options& o) {
  std::uint64_t seed = 42;
  if (o.seed) {
    seed = *o.seed;
  } else if (const char* env = std::getenv("QUILTSIGN_SEED")) {
    try {
      std::size_t used = 0;
      seed = std::stoull(env, &used);
      if (used != std::string(env).size()) throw std::invalid_argument(env);
    } catch (const std::logic_error&) {
      throw ParseError(std::string("QUILTSIGN_SEED is not an unsigned integer: '") + env + "'");
    }
  }
  if (o.trials && *o.trials == 0) throw ParseError("--trials must be positive");
  const auto names = verify::suite_names();
  if (o.suite != "all" && std::find(names.begin(), names.end(), o.suite) == names.end())
    throw ParseError("unknown suite '" + o.suite + "'");
  if (o.property) {
    bool found = false;
    for (const auto& n : o.suite == "all" ? names : std::vector<std::string>{o.suite})
      for (const auto& p : verify::properties(n)) found = found || p.name == *o.property;
    if (!found) throw ParseError("unknown property '" + *o.property + "'");
  }
  const auto results = verify::run(o.suite, {seed, o.trials, o.property});
  bool all = true;
  std::ostringstream os;
  json suites = json::array();
  for (const auto& s : results) {
    all = all && s.passed();
    os << "suite " << s.suite << ": " << (s.passed() ? "pass" : "FAIL") << "\n";
    json props = json::array();
    for (const auto& p : s.properties) {
      os << "  " << (p.passed() ? "pass" : "FAIL") << "  " << p.name << "  " << p.trials << " trials";
      if (p.skipped) os << ", " << p.skipped << " skipped";
      if (p.failures) os << ", " << p.failures << " failures";
      os << "\n";
      json pj{{"name", p.name}, {"passed", p.passed()}, {"trials", p.trials}, {"skipped", p.skipped}, {"failures", p.failures}};
      if (p.minimal) {
        os << "    minimal counterexample (size " << p.minimal->size << "): " << p.minimal->text << "\n";
        pj["counterexample"] = {{"size", p.minimal->size}, {"input", p.minimal->text}};
      }
      props.push_back(pj);
    }
    suites.push_back({{"suite", s.suite}, {"stream_seed", s.seed}, {"passed", s.passed()}, {"properties", props}});
  }
  os << (all ? "all properties hold" : "property failures") << " (seed " << seed << ")\n";
  emit(o, {{"seed", seed}, {"passed", all}, {"suites", suites}}, os.str());
  return all ? ok : property;
}

int report_error(const Options& o, int code, const std::string& kind, const std::string& msg) {
  if (o.json)
    std::cout << json{{"error", kind}, {"message", msg}, {"exit_code", code}}.dump(2) << "\n";
  std::cerr << "quiltsign: " << kind << " error: " << msg << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Orientation signs, indices and homology for quilted surfaces"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_flag("--json", o.json, "machine-readable output");

  auto* index_cmd = app.add_subcommand("index", "total index with a per-patch Riemann-Roch breakdown");
  index_cmd->add_option("file", o.file, "quilt document")->required();

  auto* sign_cmd = app.add_subcommand("sign", "orientation sign of one operation");
  sign_cmd->add_option("file", o.file, "quilt document")->required();
  sign_cmd->add_option("--operation", o.operation, "glue-interior, glue-boundary, glue-self, glue-ends, permute, conjugate or disjoint")
      ->required();
  sign_cmd->add_option("--node", o.node, "node id for the gluing operations");
  sign_cmd->add_flag("--segment-last", o.segment_last, "glue-self: the segment does not come first");
  sign_cmd->add_option("--e-plus", o.e_plus, "glue-ends: outgoing end");
  sign_cmd->add_option("--e-minus", o.e_minus, "glue-ends: incoming end");
  sign_cmd->add_option("--permutation", o.permutation, "permute: new order of the boundary nodes, e.g. 1,2,0");

  auto* hom_cmd = app.add_subcommand("homology", "integer homology of a Floer-type complex");
  hom_cmd->add_option("file", o.file, "complex document")->required();
  hom_cmd->add_flag("--q", o.q, "also print the q-graded boundary");

  auto* cohom_cmd = app.add_subcommand("cohom", "GF(2) cone cohomology and relative structure count");
  cohom_cmd->add_option("file", o.file, "cone document")->required();

  auto* verify_cmd = app.add_subcommand("verify", "randomized property suites");
  verify_cmd->add_option("--suite", o.suite, "detline, orient, floer, cohom or all");
  verify_cmd->add_option("--seed", o.seed, "seed (default: QUILTSIGN_SEED or 42)");
  verify_cmd->add_option("--trials", o.trials, "trials per property");
  verify_cmd->add_option("--property", o.property, "run only the named property");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return parse;
  }

  try {
    if (*index_cmd) return cmd_index(o);
    if (*sign_cmd) return cmd_sign(o);
    if (*hom_cmd) return cmd_homology(o);
    if (*cohom_cmd) return cmd_cohom(o);
    if (*verify_cmd) return cmd_verify(o);
  } catch (const ParseError& e) {
    return report_error(o, parse, "parse", e.what());
  } catch (const nlohmann::json::exception& e) {
    return report_error(o, parse, "parse", e.what());
  } catch (const ValidationError& e) {
    return report_error(o, validation, "validation", e.what());
  } catch (const PreconditionError& e) {
    return report_error(o, precondition, "precondition", e.what());
  }
  return parse;
}
