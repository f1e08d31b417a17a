#include <catch2/catch_amalgamated.hpp>

#include "quiltsign/builders.hpp"
#include "quiltsign/surface.hpp"

using namespace quiltsign;
using namespace quiltsign::surface;
namespace b = quiltsign::build;

namespace {

std::string validation_message(const Quilt& q) {
  try {
    validate(q);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

std::size_t chain_length(const Quilt& q, Direction d, std::size_t i) {
  return (d == Direction::incoming ? q.orderings.ends_in : q.orderings.ends_out).at(i).chain.size();
}

}  // namespace

TEST_CASE("euler characteristic of patches") {
  CHECK(euler_char(b::disk("d")) == 1);
  CHECK(euler_char(b::annulus("a")) == 0);
  Patch torus_hole{"t", 1, {Circle{"t.c", {}}}, {}};
  CHECK(euler_char(torus_hole) == -1);
  CHECK(euler_char(b::closed("s", 0)) == 2);
}

TEST_CASE("validate accepts simple quilts") {
  CHECK_NOTHROW(validate(b::quilt({b::disk("d")})));
  auto two = b::strip_stack(2);
  CHECK_NOTHROW(validate(two));
  REQUIRE(two.orderings.ends_in.size() == 1);
  REQUIRE(two.orderings.ends_out.size() == 1);
  CHECK(chain_length(two, Direction::incoming, 0) == 2);
  CHECK(chain_length(two, Direction::outgoing, 0) == 2);
  CHECK(two.orderings.ends_out[0].chain == std::vector<std::string>{"s0.o0", "s1.o0"});
  CHECK(two.orderings.ends_in[0].chain == std::vector<std::string>{"s0.i0", "s1.i0"});
}

TEST_CASE("validate diagnostics") {
  SECTION("direction mismatch") {
    auto q = b::quilt({b::strip("a"), b::strip("b")});
    // a's top runs out → in; b's top runs out → in as well, so in meets out
    q.seams.push_back({"x", {"a.c", "a.o0"}, {"b.c", "b.o0"}});
    CHECK(validation_message(q).find("direction mismatch") != std::string::npos);
  }
  SECTION("dangling seam side") {
    auto q = b::quilt({b::strip("a")});
    q.seams.push_back({"x", {"a.c", "a.o0"}, {"zz.c", "zz.i0"}});
    CHECK(validation_message(q).find("dangling seam side") != std::string::npos);
  }
  SECTION("non-maximal end chain") {
    auto q = b::strip_stack(2);
    q.orderings.ends_in[0].chain.pop_back();
    CHECK(validation_message(q).find("non-maximal end chain") != std::string::npos);
  }
  SECTION("duplicate ordering entries") {
    auto q = b::quilt({b::disk("d")});
    q.orderings.merged.push_back(q.orderings.merged.front());
    CHECK(validation_message(q).find("duplicate ordering entries") != std::string::npos);
  }
  SECTION("missing ordering entry") {
    auto q = b::quilt({b::disk("d")});
    q.orderings.merged.clear();
    CHECK(validation_message(q).find("missing ordering entry") != std::string::npos);
  }
  SECTION("bad widths and genus") {
    auto q = b::quilt({b::strip("a")});
    q.patches[0].ends[0].width = 0;
    CHECK(validation_message(q).find("width") != std::string::npos);
    auto g = b::quilt({b::disk("d")});
    g.patches[0].genus = -1;
    CHECK(validation_message(g).find("genus") != std::string::npos);
  }
  SECTION("node on end point") {
    auto q = b::quilt({b::strip("a"), b::disk("d", 0, 0, 1)}, {}, {{"w", "a.i0", "d.w0"}});
    CHECK(validation_message(q).find("end point") != std::string::npos);
  }
}

TEST_CASE("glue the two ends of a strip") {
  auto q = b::quilt({b::strip("s")});
  auto g = glue_strip_ends(q, "e2", "e1");
  REQUIRE(g.patches.size() == 1);
  CHECK(g.patches[0].circles.size() == 2);
  CHECK(g.patches[0].genus == 0);
  CHECK(g.patches[0].ends.empty());
  CHECK(euler_char(g.patches[0]) == 0);
  CHECK(g.orderings.ends_in.empty());
  CHECK(g.orderings.ends_out.empty());
}

TEST_CASE("cup glued to cap along one end gives a strip") {
  auto q = b::quilt({b::cup("u"), b::cap("n")});
  // ends: e1, e2 outgoing (cup), e3, e4 incoming (cap)
  auto g = glue_strip_ends(q, "e1", "e3");
  REQUIRE(g.patches.size() == 1);
  const auto& p = g.patches[0];
  CHECK(p.id == "u");
  CHECK(p.genus == 0);
  REQUIRE(p.circles.size() == 1);
  CHECK(p.circles[0].points == std::vector<std::string>{"u.o1", "n.i1"});
  CHECK(p.ends.size() == 2);
  CHECK(g.orderings.ends_in.size() == 1);
  CHECK(g.orderings.ends_out.size() == 1);
  CHECK(total_euler_char(g) == 1);
}

TEST_CASE("two once-ended disks glue to a closed disk") {
  auto q = b::quilt({b::disk("a", 0, 1), b::disk("c", 1, 0)});
  CHECK(total_euler_char(q) == 2);
  auto g = glue_strip_ends(q, "e1", "e2");
  REQUIRE(g.patches.size() == 1);
  CHECK(g.patches[0].circles.size() == 1);
  CHECK(g.patches[0].circles[0].points.empty());
  CHECK(euler_char(g.patches[0]) == 1);
  CHECK_NOTHROW(validate(g));
}

TEST_CASE("gluing quilted ends of length two") {
  auto q = b::strip_stack(2);
  auto g = glue_strip_ends(q, "e2", "e1");
  // two annuli joined along a seam running around the core
  REQUIRE(g.patches.size() == 2);
  for (const auto& p : g.patches) CHECK(euler_char(p) == 0);
  REQUIRE(g.seams.size() == 1);
  CHECK(g.seams[0].minus.after.empty());
  CHECK(g.orderings.merged.size() == 2);
}

TEST_CASE("gluing rejects incompatible profiles") {
  auto q = b::quilt({b::strip("a")});
  q.patches.push_back(b::strip("t"));
  q.patches.push_back(b::strip("u"));
  q.seams.push_back({"x", {"t.c", "t.o0"}, {"u.c", "u.i0"}});
  default_orderings(q);
  // a's outgoing end has length 1, the stack's incoming has length 2
  const auto& outs = q.orderings.ends_out;
  const auto& ins = q.orderings.ends_in;
  std::string a_out, stack_in;
  for (const auto& e : outs)
    if (e.chain.size() == 1) a_out = e.id;
  for (const auto& e : ins)
    if (e.chain.size() == 2) stack_in = e.id;
  CHECK_THROWS_AS(glue_strip_ends(q, a_out, stack_in), PreconditionError);
  CHECK_THROWS_AS(glue_strip_ends(q, stack_in, a_out), PreconditionError);
  auto w = b::quilt({b::strip("a"), b::strip("c")});
  w.patches[1].ends[0].width = 2;
  CHECK_THROWS_AS(glue_strip_ends(w, "e3", "e2"), PreconditionError);
}

TEST_CASE("boundary node between two disks") {
  auto q = b::quilt({b::disk("a", 0, 0, 1), b::disk("c", 0, 0, 1)}, {}, {{"w", "a.w0", "c.w0"}});
  CHECK(total_euler_char(q) == 2);
  auto g = deform_boundary_node(q, 0);
  REQUIRE(g.patches.size() == 1);
  CHECK(g.patches[0].circles.size() == 1);
  CHECK(total_euler_char(g) == 1);
  CHECK(g.boundary_nodes.empty());
  CHECK_THROWS_AS(deform_boundary_node(q, 1), PreconditionError);
}

TEST_CASE("disk with a self boundary node becomes an annulus") {
  auto d = b::disk("d", 1, 1, 0);
  // points: i0, w-, o0, w+
  d.circles[0].points = {"d.i0", "d.wm", "d.o0", "d.wp"};
  auto q = b::quilt({d}, {}, {{"w", "d.wm", "d.wp"}});
  auto first = deform_boundary_node_traced(q, 0, true).quilt;
  REQUIRE(first.patches.size() == 1);
  const auto& p = first.patches[0];
  CHECK(p.genus == 0);
  REQUIRE(p.circles.size() == 2);
  CHECK(euler_char(p) == 0);
  // segment from w- to w+ carries o0
  CHECK(p.circles[0].points == std::vector<std::string>{"d.o0"});
  CHECK(p.circles[1].points == std::vector<std::string>{"d.i0"});
  auto second = deform_boundary_node_traced(q, 0, false).quilt;
  CHECK(second.patches[0].circles[0].points == std::vector<std::string>{"d.i0"});
  // merged ordering lists the new circles in place of the old one
  CHECK(first.orderings.merged[0].kind == ItemKind::circle);
  CHECK(first.orderings.merged[1].kind == ItemKind::circle);
}

TEST_CASE("boundary node joining two circles of one patch adds genus") {
  Patch a{"a", 0, {Circle{"a.c0", {"a.w0"}}, Circle{"a.c1", {"a.w1"}}}, {}};
  auto q = b::quilt({a}, {}, {{"w", "a.w0", "a.w1"}});
  auto g = deform_boundary_node(q, 0);
  CHECK(g.patches[0].genus == 1);
  CHECK(g.patches[0].circles.size() == 1);
  CHECK(total_euler_char(g) == total_euler_char(q) - 1);
}

TEST_CASE("interior node deformation") {
  auto q = b::quilt({b::closed("s", 0), b::disk("d")}, {}, {}, {{"z", "s", "d"}});
  CHECK(total_euler_char(q) == 3);
  auto g = deform_interior_node(q, 0);
  REQUIRE(g.patches.size() == 1);
  CHECK(g.patches[0].id == "s");
  CHECK(total_euler_char(g) == 1);
  auto self = b::quilt({b::disk("d")}, {}, {}, {{"z", "d", "d"}});
  auto gs = deform_interior_node(self, 0);
  CHECK(gs.patches[0].genus == 1);
  CHECK(total_euler_char(gs) == -1);
}

TEST_CASE("strip cut along its core arc") {
  auto q = b::quilt({b::strip("s")});
  Cut cut;
  cut.kind = Cut::Kind::arc;
  cut.from_end = "s.i0";
  cut.to_end = "s.o0";
  auto r = insert_diagonal_seam_traced(q, "s", cut);
  const auto& g = r.quilt;
  REQUIRE(g.patches.size() == 2);
  CHECK(g.patches[1].id == "s");
  CHECK(g.patches[0].id == r.trace.new_patch);
  CHECK(g.seams.size() == 1);
  REQUIRE(g.orderings.ends_in.size() == 1);
  REQUIRE(g.orderings.ends_out.size() == 1);
  CHECK(chain_length(g, Direction::incoming, 0) == 2);
  CHECK(chain_length(g, Direction::outgoing, 0) == 2);
  CHECK(g.orderings.ends_in[0].id == q.orderings.ends_in[0].id);
  for (const auto& p : g.patches) {
    CHECK(euler_char(p) == 1);
    for (const auto& e : p.ends) CHECK(e.width == Rational(1, 2));
  }
  // the merged ordering puts C' right before C''
  REQUIRE(g.orderings.merged.size() == 4);
  CHECK(g.orderings.merged[0].id == g.patches[0].circles[0].id);
  CHECK(g.orderings.merged[1].id == "s.c");
}

TEST_CASE("circle cuts") {
  SECTION("closed torus along a separating circle") {
    auto q = b::quilt({b::closed("t", 1)});
    Cut cut;
    cut.genus_first = 1;
    auto g = insert_diagonal_seam(q, "t", cut);
    REQUIRE(g.patches.size() == 2);
    CHECK(g.patches[0].genus == 1);
    CHECK(g.patches[1].genus == 0);
    CHECK(total_euler_char(g) == total_euler_char(q));
    CHECK(g.orderings.merged.empty());
  }
  SECTION("annulus along its core") {
    auto q = b::quilt({b::annulus("a")});
    Cut cut;
    cut.circles_first = {"a.c0"};
    auto g = insert_diagonal_seam(q, "a", cut);
    REQUIRE(g.patches.size() == 2);
    for (const auto& p : g.patches) {
      CHECK(p.circles.size() == 2);
      CHECK(euler_char(p) == 0);
    }
    CHECK(g.patches[0].circles.front().id == "a.c0");
    CHECK(g.patches[1].circles.back().id == "a.c1");
    CHECK(g.seams.size() == 1);
  }
  SECTION("non-separating circle on a torus") {
    auto q = b::quilt({b::closed("t", 1)});
    Cut cut;
    cut.separating = false;
    auto g = insert_diagonal_seam(q, "t", cut);
    CHECK(g.seams.size() == 2);
    CHECK(total_euler_char(g) == 0);
    cut.circles_first = {"x"};
    CHECK_THROWS_AS(insert_diagonal_seam(q, "t", cut), PreconditionError);
    CHECK_THROWS_AS(insert_diagonal_seam(b::quilt({b::disk("d")}), "d", Cut{Cut::Kind::circle, false, "", "", {}, 0}),
                    PreconditionError);
  }
  SECTION("arc between different circles is rejected") {
    Patch a{"a", 0, {Circle{"a.c0", {"a.i"}}, Circle{"a.c1", {"a.o"}}}, {b::in("a.i"), b::out("a.o")}};
    Cut cut{Cut::Kind::arc, true, "a.i", "a.o", {}, 0};
    CHECK_THROWS_AS(insert_diagonal_seam(b::quilt({a}), "a", cut), PreconditionError);
  }
}

TEST_CASE("composing seams through a middle strip") {
  auto q = b::strip_stack(3);
  auto r = compose_seams_traced(q, "s1");
  const auto& g = r.quilt;
  REQUIRE(g.patches.size() == 2);
  REQUIRE(g.seams.size() == 1);
  CHECK(g.seams[0].id == "sigma0");
  CHECK(chain_length(g, Direction::incoming, 0) == 2);
  CHECK(chain_length(g, Direction::outgoing, 0) == 2);
  CHECK(total_euler_char(g) == total_euler_char(q) - 1);
  CHECK(isomorphic(g, b::strip_stack(2)) == false);  // widths grew on s2
  CHECK_THROWS_AS(compose_seams(q, "s0"), PreconditionError);
}

TEST_CASE("insert then compose is the identity") {
  auto q = b::strip_stack(3);
  Cut cut{Cut::Kind::arc, true, "s1.i0", "s1.o0", {}, 0};
  auto ins = insert_diagonal_seam_traced(q, "s1", cut);
  CHECK(ins.quilt.seams.size() == 3);
  auto back = compose_seams(ins.quilt, ins.trace.new_patch);
  CHECK(isomorphic(back, q));
}

TEST_CASE("compose on a cyclic quilt shortens the cycle") {
  // four strips around an annulus-like ring: s3's top seamed back to s0's bottom
  auto q = b::strip_stack(4);
  q.patches.clear();
  for (int k = 0; k < 4; ++k) q.patches.push_back(b::strip("r" + std::to_string(k)));
  q.seams.clear();
  for (int k = 0; k < 4; ++k) {
    const auto a = "r" + std::to_string(k), c = "r" + std::to_string((k + 1) % 4);
    q.seams.push_back({"t" + std::to_string(k), {a + ".c", a + ".o0"}, {c + ".c", c + ".i0"}});
  }
  default_orderings(q);
  REQUIRE(q.orderings.ends_out.size() == 1);
  CHECK(chain_length(q, Direction::outgoing, 0) == 4);
  auto g = compose_seams(q, "r2");
  CHECK(chain_length(g, Direction::outgoing, 0) == 3);
  CHECK(chain_length(g, Direction::incoming, 0) == 3);
  auto h = compose_seams(g, "r1");
  CHECK(chain_length(h, Direction::outgoing, 0) == 2);
  CHECK(h.seams.size() == 2);
}

TEST_CASE("independent surgeries commute") {
  // a cup/cap pair and a pair of node disks, side by side
  auto q = b::quilt({b::cup("u"), b::cap("n"), b::disk("a", 0, 0, 1), b::disk("c", 0, 0, 1)}, {},
                    {{"w", "a.w0", "c.w0"}});
  auto ab = deform_boundary_node(glue_strip_ends(q, "e1", "e3"), 0);
  auto ba = glue_strip_ends(deform_boundary_node(q, 0), "e1", "e3");
  CHECK(isomorphic(ab, ba));
  auto z = b::quilt({b::strip("s"), b::closed("p", 0), b::disk("d")}, {}, {}, {{"z", "p", "d"}});
  auto zg = deform_interior_node(glue_strip_ends(z, "e2", "e1"), 0);
  auto gz = glue_strip_ends(deform_interior_node(z, 0), "e2", "e1");
  CHECK(isomorphic(zg, gz));
}

TEST_CASE("connected components") {
  auto q = b::quilt({b::strip("a"), b::disk("x"), b::strip("c")});
  q.seams.push_back({"k", {"a.c", "a.o0"}, {"c.c", "c.i0"}});
  default_orderings(q);
  auto comps = components(q);
  REQUIRE(comps.size() == 2);
  CHECK(comps[0] == std::vector<std::string>{"a", "c"});
  CHECK(comps[1] == std::vector<std::string>{"x"});
}
