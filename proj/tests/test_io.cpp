#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "condstein/io.hpp"
#include "condstein/scenarios.hpp"

using namespace condstein;

namespace {

json demo_model_json() {
  return json{
      {"y_values", {0.0, 1.0}},
      {"y_weights", {0.25, 0.75}},
      {"families",
       {{{"tag", "Gaussian"}, {"params", {{"mean", 0.0}, {"variance", 1.0}}}},
        {{"tag", "FiniteDiscrete"},
         {"params", {{"support", {0.0, 1.0}}, {"weights", {0.5, 0.5}}}}}}}};
}

}  // namespace

TEST_CASE("model json round trip") {
  const ConditionalModel model = model_from_json(demo_model_json());
  CHECK(model.size() == 2);
  CHECK(model.family(0).gaussian_params().variance == 1.0);
  CHECK(model.family(1).law().weights()[1] == 0.5);

  const ConditionalModel again = model_from_json(model_to_json(model));
  CHECK(model_digest(again) == model_digest(model));
}

TEST_CASE("spec parse errors name the offending field") {
  json bad = demo_model_json();
  bad["families"][0]["params"]["variance"] = -2.0;
  try {
    model_from_json(bad);
    FAIL("expected SpecParseError");
  } catch (const SpecParseError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("families[0].params") != std::string::npos);
    CHECK(msg.find("variance") != std::string::npos);
  }

  json missing = demo_model_json();
  missing.erase("y_weights");
  CHECK_THROWS_AS(model_from_json(missing), SpecParseError);

  json badtag = demo_model_json();
  badtag["families"][1]["tag"] = "Cauchy";
  CHECK_THROWS_AS(model_from_json(badtag), SpecParseError);

  json badweights = demo_model_json();
  badweights["y_weights"] = {0.5, 0.6};
  CHECK_THROWS_AS(model_from_json(badweights), SpecParseError);
}

TEST_CASE("samples csv round trip is bit exact") {
  Rng rng(3001);
  std::vector<std::pair<double, double>> pairs;
  for (int i = 0; i < 200; ++i) {
    pairs.emplace_back(rng.uniform(-1e6, 1e6) * std::pow(10.0, -double(rng.below(12))),
                       rng.uniform(-5.0, 5.0));
  }
  const SampleSet original(pairs, "unit");
  const SampleSet back = samples_from_csv(samples_to_csv(original), "unit");
  REQUIRE(back.size() == original.size());
  for (std::size_t i = 0; i < original.size(); ++i) {
    CHECK(back.pairs[i].first == original.pairs[i].first);
    CHECK(back.pairs[i].second == original.pairs[i].second);
  }

  CHECK_THROWS_AS(samples_from_csv("a,b\n1,2\n", "unit"), SpecParseError);
  CHECK_THROWS_AS(samples_from_csv("x,y\n1\n", "unit"), SpecParseError);
}

TEST_CASE("joint table json round trip") {
  Rng rng(3101);
  const ConditionalModel model = scenarios::random_model(rng, 3, 2);
  const JointTable joint = joint_table(model);
  const JointTable back = joint_from_json(joint_to_json(joint));
  CHECK(back.x_grid() == joint.x_grid());
  CHECK(back.y_grid() == joint.y_grid());
  CHECK(scenarios::max_entry_gap(back, joint) == 0.0);

  json bad = joint_to_json(joint);
  bad["mass"][0][0] = -0.5;
  CHECK_THROWS_AS(joint_from_json(bad), SpecParseError);
  json shape = joint_to_json(joint);
  shape["mass"].erase(0);
  CHECK_THROWS_AS(joint_from_json(shape), SpecParseError);
}

TEST_CASE("atomic write replaces the target file completely") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "condstein_io_test";
  fs::create_directories(dir);
  const std::string path = (dir / "report.json").string();
  atomic_write_file(path, "first\n");
  atomic_write_file(path, "second\n");
  std::ifstream in(path);
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(content == "second\n");
  CHECK_FALSE(fs::exists(path + ".tmp"));
  fs::remove_all(dir);
}

TEST_CASE("model digest is canonical and sensitive") {
  const ConditionalModel a = model_from_json(demo_model_json());
  const ConditionalModel b = model_from_json(demo_model_json());
  CHECK(model_digest(a) == model_digest(b));
  CHECK(model_digest(a).rfind("fnv1a64:", 0) == 0);

  json changed = demo_model_json();
  changed["families"][0]["params"]["mean"] = 0.125;
  CHECK(model_digest(model_from_json(changed)) != model_digest(a));
}

TEST_CASE("discrepancy report serialization carries the contract fields") {
  DiscrepancyReport rep;
  rep.per_function = {{"alpha", 0.25, std::nullopt}, {"beta", -0.5, 0.01}};
  rep.sup_value = 0.5;
  rep.bound_kind = BoundKind::w;
  rep.exact = false;
  rep.n_samples = 42;
  rep.dictionary_lower_bound = true;
  const json j = discrepancy_to_json(rep);
  CHECK(j["sup"] == 0.5);
  CHECK(j["lower_estimate"] == true);
  CHECK(j["per_function"][0]["exact"] == true);
  CHECK(j["per_function"][1]["std_error"] == 0.01);
}
