#include <doctest.h>

#include "adaptive/catalog.hpp"
#include "adaptive/errors.hpp"
#include "../support/fixtures.hpp"

using namespace adaptive;
using fixtures::item;

TEST_SUITE("catalog") {

TEST_CASE("items are stored sorted by id and indexed") {
  auto c = Catalog::build({{"x", {}}},
                          {item("zeta", {{"x", 1.0}}, 0.5), item("alpha", {{"x", 1.0}}, 0.1)});
  REQUIRE(c.items().size() == 2);
  CHECK(c.item(0).id == "alpha");
  CHECK(c.item(1).id == "zeta");
  CHECK(c.index_of("zeta") == 1u);
  CHECK(c.find("missing") == nullptr);
}

TEST_CASE("construction errors name the offending id") {
  auto dup = [] {
    Catalog::build({{"x", {}}}, {item("a", {{"x", 1.0}}, 0.1), item("a", {{"x", 1.0}}, 0.2)});
  };
  CHECK_THROWS_WITH_AS(dup(), doctest::Contains("'a'"), CatalogError);

  auto dangling = [] { Catalog::build({{"x", {}}}, {item("a", {{"nope", 1.0}}, 0.1)}); };
  CHECK_THROWS_AS(dangling(), CatalogError);

  auto range = [] { Catalog::build({{"x", {}}}, {item("a", {{"x", 1.0}}, 1.5)}); };
  CHECK_THROWS_AS(range(), CatalogError);

  auto explicit_cycle = [] { Catalog::build({{"x", {"y"}}, {"y", {"x"}}}, {}); };
  CHECK_THROWS_AS(explicit_cycle(), CatalogError);
}

TEST_CASE("item prerequisites imply skill edges") {
  // y is declared independent, but an item teaching x needs y, and y needs x.
  auto implied_cycle = [] {
    Catalog::build({{"x", {}}, {"y", {"x"}}},
                   {item("a", {{"x", 1.0}}, 0.1, Modality::kText, {{"y", 0.2}})});
  };
  CHECK_THROWS_AS(implied_cycle(), CatalogError);

  auto c = Catalog::build({{"x", {}}, {"y", {}}},
                          {item("a", {{"y", 1.0}}, 0.1, Modality::kText, {{"x", 0.2}})});
  CHECK(c.prerequisites_of("y") == std::vector<SkillId>{"x"});
  CHECK(c.depth_of("y") == 1);
}

TEST_CASE("depth and transitive prerequisites") {
  auto c = fixtures::chain_catalog();
  CHECK(c.depth_of("s1") == 0);
  CHECK(c.depth_of("s2") == 1);
  CHECK(c.depth_of("s3") == 0);
  CHECK(c.transitive_prerequisites("s2") == std::vector<SkillId>{"s1"});
  CHECK(c.transitive_prerequisites("s1").empty());
}

TEST_CASE("json round trip keeps every item") {
  auto c = fixtures::chain_catalog();
  auto back = catalog_from_json(catalog_to_json(c));
  CHECK(back.items() == c.items());
  CHECK(back.skills() == c.skills());
}

TEST_CASE("reference catalog shape") {
  const auto& c = fixtures::reference_catalog();
  CHECK(c.items().size() == 140);
  CHECK(c.skills() == std::vector<SkillId>{"algebra", "arithmetic", "fractions", "geometry"});
  CHECK(c.depth_of("algebra") == 2);
  std::size_t quizzes = 0;
  for (const auto& it : c.items()) quizzes += it.assessable() ? 1 : 0;
  CHECK(quizzes == 56);
}

}
