#include <random>

#include "doctest.h"
#include "oracle.hpp"
#include "percplan/instance_io.hpp"

using namespace percplan;

namespace {

const std::string kData = PERCPLAN_DATA_DIR;

std::string instance_text(int n) {
  return read_text_file(kData + "/instances/instance" + std::to_string(n) + ".inst");
}

std::string catalog_text() { return read_text_file(kData + "/catalog/default.catalog"); }

std::size_t error_line(std::string_view text) {
  try {
    parse_instance(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

std::size_t catalog_error_line(std::string_view text) {
  try {
    parse_catalog(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

ObjectId id(const char* name) { return ObjectId{name}; }

}  // namespace

TEST_CASE("the bundled instances load") {
  std::size_t expected_objects[] = {3, 3, 4};
  for (int n = 1; n <= 3; ++n) {
    const LoadedInstance inst =
        load_instance(kData + "/instances/instance" + std::to_string(n) + ".inst",
                      kData + "/catalog/default.catalog");
    CHECK(inst.id == "instance" + std::to_string(n));
    CHECK(inst.scene.objects.size() == expected_objects[n - 1]);
    CHECK(inst.scene.grid == Grid{5, 3});
    CHECK(inst.config.grid == Grid{5, 3});
    CHECK(inst.horizon.maxstep == (n == 3 ? 5 : 3));
  }
  const LoadedInstance one = make_instance("i1", instance_text(1), catalog_text());
  const PerceptView view = bottom_up(one.scene, one.task);
  CHECK(view.objects() == std::vector{id("obj1"), id("sco1"), id("sco2")});
}

TEST_CASE("the uncluttered instance starts with the bolt in the corner") {
  const ParsedInstance p = parse_instance(instance_text(2));
  REQUIRE(p.task.goal.literals.size() == 1);
  CHECK(p.task.goal.literals[0] == FluentLiteral::Below(Cell{2, 1}, id("obj1")));
  const PerceptView view = bottom_up(p.scene, p.task);
  CHECK(view.initial_state().at(id("obj1")) == Entity{Cell{0, 0}});
}

TEST_CASE("orientation aliases normalize") {
  const ParsedInstance p = parse_instance(
      "grid 3 2\nobject a cell 0 0 orient hoy shape s at 0 0\n"
      "object b cell 1 0 orient hox shape s at 1 0\n");
  CHECK(p.scene.objects[0].orient == Orientation::kHorizY);
  CHECK(p.scene.objects[1].orient == Orientation::kHorizX);
  CHECK(p.scene.camera.preset == "depth");
  CHECK(p.horizon.maxstep == kDefaultMaxstep);
}

TEST_CASE("goal syntax") {
  const ParsedInstance p = parse_instance(
      "grid 5 3\n"
      "object a cell 0 0 orient vert shape s at 0 0\n"
      "object b cell 1 0 orient vert shape s at 1 0\n"
      "target obj1 near 0 0\ntarget obj2 near 1 0\n"
      "goal at(obj1)=loc_2x1\n"
      "goal ori( obj1 ) = hoy\n"
      "goal below(obj1, obj2)\n"
      "goal at(obj2)=obj1\n");
  const auto& g = p.task.goal.literals;
  REQUIRE(g.size() == 4);
  CHECK(g[0] == FluentLiteral::At(id("obj1"), Cell{2, 1}));
  CHECK(g[1] == FluentLiteral::Ori(id("obj1"), Orientation::kHorizY));
  CHECK(g[2] == FluentLiteral::Below(id("obj1"), id("obj2")));
  CHECK(g[3] == FluentLiteral::At(id("obj2"), id("obj1")));
}

TEST_CASE("instance errors carry their line") {
  CHECK(error_line("") == 1);
  CHECK(error_line("# only a comment\n\n") == 1);
  CHECK(error_line("\n\ncamera depth\n") == 3);
  CHECK(error_line("grid 5\n") == 1);
  CHECK(error_line("grid 0 3\n") == 1);
  CHECK(error_line("grid 5 3\ngrid 5 3\n") == 2);
  CHECK(error_line("grid 5 3\ncamera fisheye\n") == 2);
  CHECK(error_line("grid 5 3\n\nobject a cell 5 0 orient vert shape s at 0 0\n") == 3);
  CHECK(error_line("grid 5 3\nobject a cell 0 0 orient up shape s at 0 0\n") == 2);
  CHECK(error_line("grid 5 3\nobject a cell 0 0 orient vert shape s at x 0\n") == 2);
  CHECK(error_line("grid 5 3\nobject a cell 0 0 orient vert shape s at 0 0\n"
                   "object a cell 1 0 orient vert shape s at 0 0\n") == 3);
  CHECK(error_line("grid 5 3\nobject a cell 0 0 orient vert shape s at 0 0\n"
                   "target obj2 near 0 0\n") == 3);
  CHECK(error_line("grid 5 3\ntarget obj1 near 0 0\n") == 2);
  CHECK(error_line("grid 5 3\nobject a cell 0 0 orient vert shape s at 0 0\n"
                   "target obj1 near 0 0\ngoal below(loc_9x9,obj1)\n") == 4);
  CHECK(error_line("grid 5 3\nobject a cell 0 0 orient vert shape s at 0 0\n"
                   "target obj1 near 0 0\ngoal below(loc_0x0,obj7)\n") == 4);
  CHECK(error_line("grid 5 3\nobject a cell 0 0 orient vert shape s at 0 0\n"
                   "target obj1 near 0 0\ngoal inside(obj1)\n") == 4);
  CHECK(error_line("grid 5 3\nmaxstep 99\n") == 2);
  CHECK(error_line("grid 5 3\nmaxstep 2\nmaxstep 3\n") == 3);
  CHECK(error_line("grid 5 3\ninfront loc_0x0 loc_0x0\n") == 2);
  CHECK(error_line("grid 5 3\nteleport\n") == 2);
  CHECK_THROWS_AS(make_instance("x",
                                "grid 5 3\nobject a cell 0 0 orient vert shape cube at 0 0\n",
                                catalog_text()),
                  ParseError);
}

TEST_CASE("catalog parsing") {
  const ShapeCatalog c = parse_catalog("shape bolt_m20_100\nblocker bolt_m20_100 vert\n");
  CHECK(c.blocker_rules().size() == 1);
  const ShapeCatalog w = parse_catalog(
      "shape bolt_m20_100\nshape aluprofil_f20_100_gray\n"
      "unstable bolt_m20_100 horiz_x aluprofil_f20_100_gray *\n");
  REQUIRE(w.unstable_rules().size() == 1);
  CHECK_FALSE(w.unstable_rules()[0].bottom_orient.has_value());
  CHECK(w.unstable_rules()[0].top_orient == Orientation::kHorizX);
  CHECK(catalog_error_line("shape a\nblocker b vert\n") == 2);
  CHECK(catalog_error_line("shape a\nunstable * * * *\n") == 2);
  CHECK(catalog_error_line("shape a\n# note\nunstable a up a *\n") == 3);
  CHECK(catalog_error_line("shape\n") == 1);
  CHECK(catalog_error_line("colour a red\n") == 1);
  const ShapeCatalog bundled = parse_catalog(catalog_text());
  CHECK(bundled.shapes() == ShapeCatalog::Default().shapes());
  CHECK(bundled.unstable_rules() == ShapeCatalog::Default().unstable_rules());
  CHECK(bundled.blocker_rules() == ShapeCatalog::Default().blocker_rules());
}

TEST_CASE("plan text") {
  const Plan one{{{id("obj1"), Cell{2, 1}, Orientation::kHorizY}}};
  CHECK(render_plan(one) == "0: move(obj1,loc_2x1,horiz_y).");
  CHECK(render_plan(Plan{}).empty());
  CHECK(parse_plan("").empty());

  const Plan four{{{id("sco1"), Cell{3, 0}, Orientation::kHorizY},
                   {id("obj1"), Cell{0, 0}, Orientation::kHorizY},
                   {id("obj2"), Cell{0, 0}, Orientation::kHorizY},
                   {id("obj3"), Cell{0, 0}, Orientation::kVert}}};
  const std::string text = render_plan(four);
  CHECK(std::count(text.begin(), text.end(), '\n') == 3);
  CHECK(text.starts_with("0: "));
  CHECK(text.find("3: move(obj3,loc_0x0,vert).") != std::string::npos);

  const Plan stacked = parse_plan("0: move(obj3,obj2,vert).");
  CHECK(stacked.steps[0].dest == Entity{id("obj2")});
  CHECK(parse_plan("0: move(a,loc_0x0,hox).\n").steps[0].orient ==
        Orientation::kHorizX);

  CHECK_THROWS_AS(parse_plan("1: move(a,loc_0x0,vert)."), ParseError);
  CHECK_THROWS_AS(parse_plan("0: move(a,loc_0x0,vert)\n"), ParseError);
  CHECK_THROWS_AS(parse_plan("0: push(a,loc_0x0,vert)."), ParseError);
  CHECK_THROWS_AS(parse_plan("0: move(a,loc_0x0)."), ParseError);
  CHECK_THROWS_AS(parse_plan("0: move(a,loc_0x0,vert).\n0: move(a,loc_1x0,vert)."),
                  ParseError);
  try {
    parse_plan("0: move(a,loc_0x0,vert).\n\n2: move(a,loc_1x0,vert).");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("plans round-trip through text") {
  std::mt19937_64 rng(47);
  for (int round = 0; round < 40; ++round) {
    const LoadedInstance inst = oracle::random_instance(rng, 3, 3, 2, 2, false);
    SearchProblem p;
    p.init = bottom_up(inst.scene, inst.task).initial_state();
    p.goal = inst.task.goal;
    p.horizon = inst.horizon;
    p.config = inst.config;
    PlanCursor cursor(p);
    for (int i = 0; i < 20; ++i) {
      const auto plan = cursor.next();
      if (!plan) break;
      const std::string text = render_plan(*plan);
      CHECK(parse_plan(text) == *plan);
      CHECK(render_plan(parse_plan(text)) == text);
    }
  }
}

TEST_CASE("parsers never fail with anything but a located error") {
  std::mt19937_64 rng(53);
  const std::string seeds[] = {instance_text(1), instance_text(3), catalog_text(),
                               "0: move(obj1,loc_2x1,horiz_y).\n1: move(a,b,vert)."};
  const std::string alphabet = " \n#(),.=:_*-0123456789abxylocvertgridhoy";
  for (int round = 0; round < 3000; ++round) {
    std::string text = seeds[round % 4];
    for (int k = std::uniform_int_distribution<int>(1, 6)(rng); k > 0; --k) {
      std::uniform_int_distribution<std::size_t> at(0, text.size());
      const std::size_t pos = at(rng);
      const char c = alphabet[std::uniform_int_distribution<std::size_t>(
          0, alphabet.size() - 1)(rng)];
      switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
        case 0:
          text.insert(pos, 1, c);
          break;
        case 1:
          if (pos < text.size()) text.erase(pos, 1);
          break;
        default:
          if (pos < text.size()) text[pos] = c;
          break;
      }
    }
    try {
      switch (round % 4) {
        case 2:
          parse_catalog(text);
          break;
        case 3:
          parse_plan(text);
          break;
        default:
          make_instance("fuzz", text, catalog_text());
          break;
      }
    } catch (const ParseError& e) {
      CHECK(e.line() >= 1);
    }
  }
}
