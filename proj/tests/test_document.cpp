#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "quiltsign/document.hpp"
#include "quiltsign/fixtures.hpp"
#include "quiltsign/sampling.hpp"

using namespace quiltsign;
namespace fs = std::filesystem;

namespace {

doc::json load(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return doc::parse_text(ss.str());
}

std::vector<fs::path> corpus(const std::string& sub) {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(fs::path(QUILTSIGN_FIXTURE_DIR) / sub))
    if (e.path().extension() == ".json") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

bool is_complex(const doc::json& j) { return j.contains("generators") || j.contains("tensor"); }

}  // namespace

TEST_CASE("quilt documents round-trip", "[document]") {
  std::size_t n = 0;
  for (const auto* sub : {"quilts", "cli"})
    for (const auto& p : corpus(sub)) {
      const auto j = load(p);
      if (is_complex(j)) continue;
      INFO(p.string());
      const auto d = doc::parse_quilt(j);
      const auto again = doc::parse_quilt(doc::parse_text(doc::to_json(d).dump()));
      CHECK(again == d);
      CHECK(doc::to_json(again) == doc::to_json(d));
      ++n;
    }
  CHECK(n >= 30);
}

TEST_CASE("complex documents round-trip", "[document]") {
  std::size_t n = 0;
  for (const auto& p : corpus("cli")) {
    const auto j = load(p);
    if (!is_complex(j)) continue;
    INFO(p.string());
    const auto d = doc::parse_homology(j);
    CHECK(doc::parse_homology(doc::parse_text(doc::to_json(d).dump())) == d);
    ++n;
  }
  CHECK(n == 4);
  sampling::Rng rng(5);
  for (int t = 0; t < 100; ++t) {
    const auto c = sampling::random_closed_complex(rng, 2 * sampling::uniform(rng, 0, 2));
    const doc::ComplexDocument d{c.N, c.generators, c.boundary, std::nullopt};
    const auto back = doc::parse_complex(doc::to_json(d));
    CHECK(back == d);
    CHECK(back.complex().boundary == c.boundary);
  }
}

TEST_CASE("cone documents round-trip", "[document]") {
  const auto files = corpus("cones");
  CHECK(files.size() == fixtures::cone_fixtures().size());
  for (const auto& p : files) {
    INFO(p.string());
    const auto d = doc::parse_cone(load(p));
    CHECK(doc::parse_cone(doc::parse_text(doc::to_json(d).dump())) == d);
    CHECK_NOTHROW(d.cone());
  }
}

TEST_CASE("fixture files match the built-in fixtures", "[document]") {
  for (const auto& f : fixtures::quilt_fixtures()) {
    INFO(f.name);
    const auto d = doc::parse_quilt(load(fs::path(QUILTSIGN_FIXTURE_DIR) / "quilts" / (f.name + ".json")));
    CHECK(d.quilt == f.quilt);
    REQUIRE(d.labels);
    CHECK(*d.labels == f.labels);
  }
}

TEST_CASE("schema errors", "[document]") {
  CHECK_THROWS_AS(doc::parse_text("{"), ParseError);
  CHECK_THROWS_AS(doc::parse_quilt(doc::parse_text("[]")), ParseError);
  CHECK_THROWS_AS(doc::parse_quilt(doc::parse_text(R"({"version": "other", "patches": []})")), ParseError);
  CHECK_THROWS_AS(doc::parse_quilt(doc::parse_text(R"({"patches": [{"genus": 0}]})")), ParseError);
  CHECK_THROWS_AS(doc::parse_quilt(doc::parse_text(R"({"patches": [{"id": "d", "genus": "one"}]})")), ParseError);
  CHECK_THROWS_AS(doc::parse_quilt(doc::parse_text(
                      R"({"patches": [{"id": "d", "boundary_circles": [{"id": "c", "points": ["p"]}],
                          "ends": [{"point": "p", "direction": "sideways"}]}]})")),
                  ParseError);
  CHECK_THROWS_AS(doc::parse_quilt(doc::parse_text(
                      R"({"patches": [{"id": "d", "boundary_circles": [{"id": "c", "points": ["p"]}],
                          "ends": [{"point": "p", "direction": "incoming", "width": "1/x"}]}]})")),
                  ParseError);
  CHECK_THROWS_AS(doc::parse_complex(doc::parse_text(R"({"generators": [{"id": "x", "degree": 0}], "boundary": [[0, 1]]})")),
                  ParseError);
  CHECK_THROWS_AS(doc::parse_complex(doc::parse_text(
                      R"({"generators": [{"id": "x", "degree": 0}], "entries": [{"source": "x", "target": "x", "sign": 2}]})")),
                  ParseError);
  CHECK_THROWS_AS(doc::parse_cone(doc::parse_text(R"({"source": {"cells": []}, "target": {"cells": []}})")), ParseError);
}

TEST_CASE("referential errors are validation errors", "[document]") {
  // end on a point that is not on any circle
  CHECK_THROWS_AS(doc::parse_quilt(doc::parse_text(
                      R"({"patches": [{"id": "d", "boundary_circles": [{"id": "c", "points": []}],
                          "ends": [{"point": "p", "direction": "incoming"}]}]})")),
                  ValidationError);
  const auto cone = doc::parse_cone(doc::parse_text(
      R"({"source": {"cells": [{"id": "v", "dim": 0}]}, "target": {"cells": [{"id": "w", "dim": 0}]}, "map": {"v": "u"}})"));
  CHECK_THROWS_AS(cone.cone(), ValidationError);
  const auto cx = doc::parse_complex(doc::parse_text(
      R"({"generators": [{"id": "x", "degree": 0}, {"id": "y", "degree": 0}], "entries": [{"source": "x", "target": "y", "sign": 1}]})"));
  CHECK_THROWS_AS(cx.complex(), ValidationError);
}

TEST_CASE("widths and end_indices", "[document]") {
  const auto d = doc::parse_quilt(doc::parse_text(
      R"({"patches": [{"id": "s", "boundary_circles": [{"id": "s.c", "points": ["a", "b"]}],
          "ends": [{"point": "a", "direction": "incoming", "width": "3/2"}, {"point": "b", "direction": "outgoing", "width": 2}]}],
          "end_indices": {"e1": 4}})"));
  CHECK(d.quilt.patches[0].ends[0].width == Rational(3, 2));
  CHECK(d.quilt.patches[0].ends[1].width == Rational(2));
  REQUIRE(d.labels);
  CHECK(d.labels->end_index.at("e1") == 4);
  CHECK(doc::parse_quilt(doc::to_json(d)) == d);
}
