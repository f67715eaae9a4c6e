#include <doctest.h>

#include <sstream>

#include "critperc/error.hpp"
#include "critperc/graph.hpp"
#include "critperc/sampler.hpp"
#include "support.hpp"

using namespace critperc;

TEST_SUITE("graph") {
  TEST_CASE("has_edge on small graphs") {
    const RegularGraph k4 = RegularGraph::complete(4);
    CHECK(k4.has_edge(0, 1));
    CHECK_FALSE(k4.has_edge(0, 0));
    const RegularGraph c6 = testing::cycle(6);
    CHECK_FALSE(c6.has_edge(0, 3));
    CHECK(c6.has_edge(5, 0));
    CHECK(c6.neighbor_index(0, 5) == 1);
    CHECK(c6.neighbor_index(0, 3) == -1);
  }

  TEST_CASE("construction rejects invalid edge sets") {
    CHECK_THROWS_AS(RegularGraph(5, 3, std::vector<Edge>{}), ParityError);
    CHECK_THROWS_AS(RegularGraph(3, 2, std::vector<Edge>{{0, 1}, {1, 2}}), PreconditionError);
    CHECK_THROWS_AS(RegularGraph(2, 1, std::vector<Edge>{{0, 0}}), PreconditionError);
    CHECK_THROWS_AS(RegularGraph(4, 2, std::vector<Edge>{{0, 1}, {0, 1}, {2, 3}, {2, 3}}), PreconditionError);
    CHECK_THROWS_AS(RegularGraph(4, 4, std::vector<Edge>{}), PreconditionError);
  }

  TEST_CASE("canonical edge list is sorted with u < v") {
    const RegularGraph g(4, 2, std::vector<Edge>{{3, 0}, {2, 3}, {1, 2}, {0, 1}});
    const std::vector<Edge> expected{{0, 1}, {0, 3}, {1, 2}, {2, 3}};
    CHECK(g.edges() == expected);
  }

  TEST_CASE("switching on C6") {
    const RegularGraph c6 = testing::cycle(6);
    const SwitchingCycle c{0, 1, 3, 4};
    const RegularGraph out = apply_switching(c6, c);
    const RegularGraph expected(6, 2, std::vector<Edge>{{0, 4}, {1, 3}, {1, 2}, {2, 3}, {4, 5}, {0, 5}});
    CHECK(out == expected);
    CHECK(apply_switching(out, c.reversed()) == c6);
  }

  TEST_CASE("switching preconditions are named") {
    const RegularGraph c6 = testing::cycle(6);
    CHECK(switching_violation(c6, {0, 2, 3, 4}) == "x1x2 is not an edge");
    CHECK(switching_violation(c6, {0, 1, 3, 5}) == "x3x4 is not an edge");
    CHECK(switching_violation(c6, {0, 1, 4, 5}) == "x1x4 is already an edge");
    CHECK(switching_violation(c6, {1, 2, 3, 4}) == "x2x3 is already an edge");
    CHECK(switching_violation(c6, {0, 1, 1, 2}) == "cycle vertices are not distinct");
    CHECK_THROWS_WITH_AS(apply_switching(c6, {0, 2, 3, 4}), doctest::Contains("x1x2"), PreconditionError);
  }

  TEST_CASE("random valid switchings keep degrees and symmetry") {
    Rng rng(11);
    RegularGraph g = sample_uniform_rejection(8, 3, rng, 1000);
    std::uniform_int_distribution<int> vertex(0, 7);
    int applied = 0;
    while (applied < 10000) {
      const SwitchingCycle c{vertex(rng), vertex(rng), vertex(rng), vertex(rng)};
      if (!switching_violation(g, c).empty()) continue;
      const RegularGraph next = apply_switching(g, c);
      REQUIRE(apply_switching(next, c.reversed()) == g);
      for (int v = 0; v < 8; ++v) {
        REQUIRE(next.neighbors(v).size() == 3u);
        for (int w : next.neighbors(v)) REQUIRE(next.has_edge(w, v));
      }
      g = next;
      ++applied;
    }
  }

  TEST_CASE("edge list round trip and malformed input") {
    Rng rng(3);
    const RegularGraph g = sample_uniform_rejection(10, 3, rng, 1000);
    std::stringstream s;
    write_edge_list(s, g);
    CHECK(read_edge_list(s) == g);
    std::istringstream bad_header("4 3\n");
    CHECK_THROWS_AS(read_edge_list(bad_header), IoError);
    std::istringstream short_body("4 3 6\n0 1\n0 2\n");
    CHECK_THROWS_AS(read_edge_list(short_body), IoError);
    CHECK_THROWS_AS(load_edge_list("/nonexistent/graph.txt"), IoError);
  }

  TEST_CASE("multigraph degrees count loops twice") {
    const Multigraph mg{2, 2, {{0, 0}, {1, 1}}};
    CHECK(mg.degrees() == std::vector<int>{2, 2});
    CHECK_FALSE(mg.is_simple());
    const Multigraph ok{4, 3, RegularGraph::complete(4).edges()};
    CHECK(ok.is_simple());
    CHECK(ok.to_regular() == RegularGraph::complete(4));
  }
}
