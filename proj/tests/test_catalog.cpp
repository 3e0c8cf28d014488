#include <doctest.h>

#include "oreo/catalog.hpp"
#include "oreo/json_io.hpp"
#include "oreo/scenario.hpp"
#include "test_support.hpp"

using namespace oreo;
using namespace testsup;

TEST_CASE("generated catalog is valid by construction") {
  Catalog c = generate_scenario(ScenarioParams::for_scale("S", 1));
  CHECK(c.services.size() == 8);
  CHECK(c.functions.size() == 8);
  CHECK(validate_catalog(c).empty());
}

TEST_CASE("dangling function reference is reported") {
  Catalog c = catalog({fn("f1", {xapp("f1", 1, 1.0, 0.9)})},
                      {svc("s1", 1, 0.5, 0.8, 1, {cfg("c1", {"f1", "f9"})})});
  auto violations = validate_catalog(c);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].code == "dangling-function-reference");
  CHECK(violations[0].entity == "s1/c1");
}

TEST_CASE("non-monotone complexity is reported") {
  Catalog c = catalog({fn("f1", {xapp("f1", 1, 1.0, 0.9), xapp("f1", 2, 0.8, 0.85)})},
                      {svc("s1", 1, 0.5, 0.8, 1, {cfg("c1", {"f1"})})});
  auto violations = validate_catalog(c);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].code == "non-monotone-complexity");
}

TEST_CASE("other structural violations are caught") {
  SUBCASE("cyclic configuration") {
    Catalog c = catalog({fn("f1", {xapp("f1", 1, 1.0, 0.9)}), fn("f2", {xapp("f2", 1, 1.0, 0.9)})},
                        {svc("s1", 1, 0.5, 0.8, 1,
                             {cfg("c1", {"f1", "f2"}, {{"f1", "f2"}, {"f2", "f1"}})})});
    auto violations = validate_catalog(c);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].code == "cyclic-config");
  }
  SUBCASE("non-positive budget") {
    Catalog c = single_service_catalog();
    c.budget.mem = 0.0;
    auto violations = validate_catalog(c);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].code == "bad-budget");
  }
  SUBCASE("bad quality target") {
    Catalog c = single_service_catalog();
    c.services["s1"].target_quality = 1.5;
    CHECK(validate_catalog(c).size() == 1);
  }
}

TEST_CASE("enumerate_paths") {
  SUBCASE("single node") {
    auto paths = enumerate_paths(cfg("c", {"f3"}));
    CHECK(paths == std::vector<std::vector<std::string>>{{"f3"}});
  }
  SUBCASE("two sources feeding a sink") {
    auto paths = enumerate_paths(cfg("c", {"f1", "f2", "f3"}, {{"f1", "f3"}, {"f2", "f3"}}));
    CHECK(paths == std::vector<std::vector<std::string>>{{"f1", "f3"}, {"f2", "f3"}});
  }
  SUBCASE("chain") {
    auto paths = enumerate_paths(cfg("c", {"f1", "f2", "f3"}, {{"f1", "f2"}, {"f2", "f3"}}));
    CHECK(paths == std::vector<std::vector<std::string>>{{"f1", "f2", "f3"}});
  }
}

TEST_CASE("topological_order") {
  CHECK(topological_order(cfg("c", {"f1", "f2"}, {{"f1", "f2"}})) ==
        std::vector<std::string>{"f1", "f2"});
  CHECK(topological_order(cfg("c", {"f1", "f2", "f3"}, {{"f1", "f3"}, {"f2", "f3"}})) ==
        std::vector<std::string>{"f1", "f2", "f3"});
  CHECK(topological_order(cfg("c", {"f1"})) == std::vector<std::string>{"f1"});
}

TEST_CASE("every path runs source to sink on generated configurations") {
  for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
    Catalog c = generate_scenario(ScenarioParams::for_scale("M", seed));
    for (const auto& [sid, service] : c.services) {
      for (const auto& config : service.configs) {
        std::map<std::string, int> in_deg, out_deg;
        for (const auto& n : config.nodes) in_deg[n] = out_deg[n] = 0;
        for (const auto& [a, b] : config.edges) {
          out_deg[a]++;
          in_deg[b]++;
        }
        auto paths = enumerate_paths(config);
        REQUIRE(!paths.empty());
        for (const auto& p : paths) {
          REQUIRE(!p.empty());
          CHECK(in_deg.at(p.front()) == 0);
          CHECK(out_deg.at(p.back()) == 0);
        }
        CHECK(critical_path_length(config) >= 1);
        CHECK(critical_path_length(config) <= int(config.nodes.size()));
      }
    }
  }
}

TEST_CASE("serialize-parse round trip preserves validation results") {
  Catalog good = generate_scenario(ScenarioParams::for_scale("S", 7));
  Catalog bad = catalog({fn("f1", {xapp("f1", 1, 1.0, 0.9), xapp("f1", 2, 0.8, 0.85)})},
                        {svc("s1", 1, 0.5, 0.8, 1, {cfg("c1", {"f1", "f9"})})});

  for (const Catalog* c : {&good, &bad}) {
    Json j = catalog_to_json(*c);
    Catalog parsed = catalog_from_json(j);
    auto before = validate_catalog(*c);
    auto after = validate_catalog(parsed);
    REQUIRE(before.size() == after.size());
    for (std::size_t i = 0; i < before.size(); ++i) {
      CHECK(before[i].code == after[i].code);
      CHECK(before[i].entity == after[i].entity);
    }
    CHECK(catalog_to_json(parsed) == j);  // byte-stable re-serialization
  }
}
