#include "doctest.h"
#include "pedebate/harness.hpp"
#include "pedebate/serialize.hpp"

using namespace pedebate;

TEST_CASE("config hash is stable and tracks semantic fields only") {
  ExperimentConfig a;
  ExperimentConfig b;
  CHECK(a.hash() == b.hash());
  b.delta = 0.01;
  CHECK(a.hash() != b.hash());
  b = a;
  b.seed = 43;
  CHECK(a.hash() != b.hash());
  b = a;
  b.out_dir = "/elsewhere";  // output path is not semantic
  CHECK(a.hash() == b.hash());

  // round-trip through JSON preserves the hash
  const auto j = a.to_json();
  ExperimentConfig c = ExperimentConfig::from_json(j);
  CHECK(c.hash() == a.hash());
}

TEST_CASE("config validation rejects out-of-range epsilon") {
  nlohmann::json j;
  j["epsilon"] = 0.7;
  CHECK_THROWS_WITH_AS(ExperimentConfig::from_json(j), doctest::Contains("(0, 1/2)"),
                       contract_error);
}

TEST_CASE("suite registry") {
  const auto names = suite_names();
  CHECK(names.size() == 6);
  CHECK_THROWS_WITH_AS(run_suite("nope", 1), doctest::Contains("available"), contract_error);
}

TEST_CASE("stability suite passes end to end") {
  const auto result = run_suite("stability", 42);
  for (const auto& r : result.records) {
    CAPTURE(r.metric);
    if (!r.informational) CHECK(r.pass);
  }
  CHECK(result.pass);
}

TEST_CASE("ogd suite passes end to end") {
  const auto result = run_suite("ogd", 42);
  for (const auto& r : result.records) {
    CAPTURE(r.metric);
    if (!r.informational) CHECK(r.pass);
  }
  CHECK(result.pass);
}

TEST_CASE("records serialize to csv with one row per record") {
  const auto result = run_suite("ogd", 42);
  const auto csv = records_csv(result.records);
  std::size_t rows = 0;
  for (char c : csv)
    if (c == '\n') ++rows;
  CHECK(rows == result.records.size() + 1);
}

TEST_CASE("fixtures are registered and reproducible") {
  for (const auto& name : fixture_names()) {
    auto f = make_fixture(name, 42);
    CHECK(f.world != nullptr);
    CHECK(f.dec != nullptr);
    f.dec->check_consistency(*f.world);
    auto again = make_fixture(name, 42);
    CHECK(world_to_json(*f.world).dump() == world_to_json(*again.world).dump());
  }
  CHECK_THROWS_AS(make_fixture("nope", 1), contract_error);
}
