#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "condstein/measures.hpp"
#include "condstein/rng.hpp"
#include "condstein/scenarios.hpp"

using namespace condstein;

TEST_CASE("finite law validation") {
  CHECK_THROWS_AS(FiniteLaw({1.0, 0.0}, {0.5, 0.5}), ValidationError);
  CHECK_THROWS_AS(FiniteLaw({0.0, 0.0}, {0.5, 0.5}), ValidationError);
  CHECK_THROWS_AS(FiniteLaw({0.0, 1.0}, {0.7, 0.4}), ValidationError);
  CHECK_THROWS_AS(FiniteLaw({0.0, 1.0}, {-0.1, 1.1}), ValidationError);
  CHECK_THROWS_AS(FiniteLaw({0.0}, {0.5, 0.5}), ValidationError);
  CHECK_THROWS_AS(FiniteLaw({}, {}), ValidationError);
  // 1e-12 gate rejects, never renormalizes
  CHECK_THROWS_AS(FiniteLaw({0.0, 1.0}, {0.5, 0.5 + 1e-10}), ValidationError);

  const FiniteLaw law({-1.0, 2.0, 3.5}, {0.25, 0.5, 0.25});
  CHECK(law.mass_at(2.0) == 0.5);
  CHECK(law.mass_at(1.0) == 0.0);
  CHECK(law.index_of(3.5).value() == 2);
  CHECK(law.mean() == doctest::Approx(1.625).epsilon(1e-14));
}

TEST_CASE("target family validation and zero stripping") {
  CHECK_THROWS_AS(TargetFamily::gaussian(0.0, 0.0), ValidationError);
  CHECK_THROWS_AS(TargetFamily::gaussian(0.0, -1.0), ValidationError);
  CHECK_THROWS_AS(TargetFamily::poisson(0.0), ValidationError);
  CHECK_THROWS_AS(TargetFamily::gamma(-1.0, 1.0), ValidationError);
  CHECK_THROWS_AS(TargetFamily::gamma(1.0, 0.0), ValidationError);

  const auto fam = TargetFamily::finite_discrete(FiniteLaw({0.0, 1.0, 2.0}, {0.5, 0.0, 0.5}));
  CHECK(fam.law().size() == 2);
  CHECK(fam.law().support() == std::vector<double>{0.0, 2.0});
  CHECK_THROWS_AS(fam.gaussian_params(), FamilyError);
}

TEST_CASE("conditional model invariants") {
  const FiniteLaw base({0.0, 1.0}, {0.5, 0.5});
  const auto fd = TargetFamily::finite_discrete(base);
  CHECK_THROWS_AS(ConditionalModel(FiniteLaw({0.0, 1.0}, {1.0, 0.0}), {fd, fd}),
                  ValidationError);
  CHECK_THROWS_AS(ConditionalModel(base, {fd}), ValidationError);

  const ConditionalModel model(base, {fd, fd});
  CHECK(model.index_of_y(1.0) == 1);
  CHECK_THROWS_AS(model.index_of_y(0.5), EssentialRangeError);
}

TEST_CASE("joint table validation and marginals") {
  CHECK_THROWS_AS(JointTable({0.0, 1.0}, {0.0}, {0.5, 0.6}), ValidationError);
  CHECK_THROWS_AS(JointTable({0.0, 1.0}, {0.0}, {-0.1, 1.1}), ValidationError);
  const JointTable t({0.0, 1.0}, {0.0, 1.0}, {0.1, 0.2, 0.3, 0.4});
  CHECK(t.mass(1, 0) == 0.3);
  CHECK(t.x_marginal()[0] == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(t.y_marginal()[1] == doctest::Approx(0.6).epsilon(1e-14));
}

namespace {

ConditionalModel delta_model() {
  return ConditionalModel(
      FiniteLaw({0.0, 1.0}, {0.5, 0.5}),
      {TargetFamily::finite_discrete(FiniteLaw({0.0, 1.0}, {1.0, 0.0})),
       TargetFamily::finite_discrete(FiniteLaw({0.0, 1.0}, {0.0, 1.0}))});
}

ConditionalModel quarter_model() {
  return ConditionalModel(
      FiniteLaw({0.0, 1.0}, {0.25, 0.75}),
      {TargetFamily::finite_discrete(FiniteLaw({0.0, 1.0}, {0.5, 0.5})),
       TargetFamily::finite_discrete(FiniteLaw({1.0, 2.0}, {0.5, 0.5}))});
}

}  // namespace

TEST_CASE("mixture marginal") {
  const FiniteLaw two_point = mixture_marginal(delta_model());
  CHECK(two_point.support() == std::vector<double>{0.0, 1.0});
  CHECK(two_point.weights()[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(two_point.weights()[1] == doctest::Approx(0.5).epsilon(1e-14));

  const FiniteLaw single = FiniteLaw({0.0, 1.0}, {0.3, 0.7});
  const ConditionalModel one_component(FiniteLaw({2.0}, {1.0}),
                                       {TargetFamily::finite_discrete(single)});
  const FiniteLaw same = mixture_marginal(one_component);
  CHECK(same.support() == single.support());
  CHECK(same.weights()[0] == doctest::Approx(0.3).epsilon(1e-14));

  // Hand sum over components, cross-checked by enumerating all (x, y) mass.
  const ConditionalModel qm = quarter_model();
  const FiniteLaw mm = mixture_marginal(qm);
  CHECK(mm.mass_at(1.0) == doctest::Approx(0.5).epsilon(1e-13));
  const JointTable jt = joint_table(qm);
  const std::size_t xi = *index_of_exact(jt.x_grid(), 1.0);
  double enumerated = 0.0;
  for (std::size_t j = 0; j < jt.ny(); ++j) enumerated += jt.mass(xi, j);
  CHECK(enumerated == doctest::Approx(0.5).epsilon(1e-13));

  const ConditionalModel continuous(FiniteLaw({0.0}, {1.0}), {TargetFamily::gaussian(0.0, 1.0)});
  CHECK_THROWS_AS(mixture_marginal(continuous), MixedModeError);
}

TEST_CASE("joint table construction") {
  const JointTable dm = joint_table(delta_model());
  CHECK(dm.mass(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(dm.mass(0, 1) == 0.0);
  CHECK(dm.mass(1, 0) == 0.0);
  CHECK(dm.mass(1, 1) == doctest::Approx(0.5).epsilon(1e-14));

  // Independent model: product law.
  Rng rng(11);
  const FiniteLaw lx = scenarios::random_law(rng, {0.0, 1.0, 2.0});
  const FiniteLaw ly = scenarios::random_law(rng, {-1.0, 1.0});
  const ConditionalModel indep(ly, {TargetFamily::finite_discrete(lx),
                                    TargetFamily::finite_discrete(lx)});
  const JointTable it = joint_table(indep);
  for (std::size_t i = 0; i < it.nx(); ++i) {
    for (std::size_t j = 0; j < it.ny(); ++j) {
      CHECK(it.mass(i, j) ==
            doctest::Approx(lx.weights()[i] * ly.weights()[j]).epsilon(1e-13));
    }
  }

  const JointTable qt = joint_table(quarter_model());
  CHECK(qt.mass(*index_of_exact(qt.x_grid(), 1.0), 1) == doctest::Approx(0.375).epsilon(1e-14));
}

TEST_CASE("disintegration") {
  // Product table: every family equals the x-marginal law.
  Rng rng(23);
  const FiniteLaw lx = scenarios::random_law(rng, {0.0, 0.5, 2.0});
  const FiniteLaw ly = scenarios::random_law(rng, {0.0, 1.0});
  const ConditionalModel indep(ly, {TargetFamily::finite_discrete(lx),
                                    TargetFamily::finite_discrete(lx)});
  const ConditionalModel back = disintegrate(joint_table(indep));
  for (std::size_t j = 0; j < back.size(); ++j) {
    for (std::size_t i = 0; i < lx.size(); ++i) {
      CHECK(back.family(j).law().weights()[i] ==
            doctest::Approx(lx.weights()[i]).epsilon(1e-12));
    }
  }

  const ConditionalModel dm = disintegrate(JointTable({0.0, 1.0}, {0.0, 1.0},
                                                      {0.5, 0.0, 0.0, 0.5}));
  CHECK(dm.family(0).law().support() == std::vector<double>{0.0});
  CHECK(dm.family(1).law().support() == std::vector<double>{1.0});
  CHECK(dm.y_weights().weights()[0] == doctest::Approx(0.5).epsilon(1e-14));

  // Zero-mass y columns are dropped and counted.
  std::size_t dropped = 0;
  const ConditionalModel partial = disintegrate(
      JointTable({0.0, 1.0}, {0.0, 1.0, 2.0}, {0.5, 0.0, 0.0, 0.5, 0.0, 0.0}), &dropped);
  CHECK(dropped == 2);
  CHECK(partial.size() == 1);
  for (double w : partial.y_weights().weights()) CHECK(w > 0.0);
}

TEST_CASE("round trip: joint_table after disintegrate reproduces the table") {
  Rng rng(37);
  for (int rep = 0; rep < 40; ++rep) {
    std::vector<double> xs = scenarios::jittered_grid(rng, 4, -1.0, 2.0);
    std::vector<double> ys = scenarios::jittered_grid(rng, 3, 0.0, 1.0);
    std::vector<double> mass(12);
    double total = 0.0;
    for (double& m : mass) {
      m = rng.uniform01();
      total += m;
    }
    for (double& m : mass) m /= total;
    double partial = 0.0;
    for (std::size_t i = 0; i + 1 < mass.size(); ++i) partial += mass[i];
    mass.back() = 1.0 - partial;
    const JointTable joint(xs, ys, mass);
    const JointTable rebuilt = joint_table(disintegrate(joint));
    CHECK(scenarios::max_entry_gap(joint, rebuilt) <= 1e-12);
  }
}

TEST_CASE("mixture consistency: marginal of the joint equals the mixture") {
  Rng rng(53);
  for (int rep = 0; rep < 10; ++rep) {
    const ConditionalModel model = scenarios::random_model(rng, 5, 3);
    const FiniteLaw mm = mixture_marginal(model);
    const std::vector<double> xm = joint_table(model).x_marginal();
    for (std::size_t i = 0; i < mm.size(); ++i) {
      CHECK(std::fabs(mm.weights()[i] - xm[i]) <= 1e-12);
    }
  }
}

TEST_CASE("bin samples") {
  const SampleSet s({{1.0, 0.1}, {2.0, 0.9}}, "unit");
  const BinResult r = bin_samples(s, std::vector<double>{0.0, 0.5, 1.0});
  CHECK(r.samples.pairs[0].second == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(r.samples.pairs[1].second == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(r.samples.pairs[0].first == 1.0);
  CHECK(r.dropped == 0);
  CHECK(r.empty_bins.empty());

  // Already-discrete y on the midpoints: identity map.
  const SampleSet mid({{0.0, 0.25}, {0.0, 0.75}}, "unit");
  const BinResult rm = bin_samples(mid, std::vector<double>{0.0, 0.5, 1.0});
  CHECK(rm.samples.pairs[0].second == 0.25);
  CHECK(rm.samples.pairs[1].second == 0.75);

  // Out-of-range pairs are dropped and counted; empty bins are reported.
  const SampleSet wide({{0.0, -1.0}, {0.0, 0.1}, {0.0, 2.0}}, "unit");
  const BinResult rw = bin_samples(wide, std::vector<double>{0.0, 0.5, 1.0});
  CHECK(rw.dropped == 2);
  CHECK(rw.samples.size() == 1);
  CHECK(rw.empty_bins == std::vector<std::size_t>{1});

  CHECK_THROWS_AS(bin_samples(s, std::vector<double>{1.0, 0.0}), ValidationError);
}

TEST_CASE("bin occupancy concentrates at the binomial rate") {
  Rng rng(71);
  std::vector<std::pair<double, double>> pairs(10000);
  for (auto& [x, y] : pairs) {
    x = 0.0;
    y = rng.uniform01();
  }
  const BinResult r = bin_samples(SampleSet(pairs, "uniform"),
                                  linspace(0.0, 1.0, 11));
  const double band = 5.0 * std::sqrt(10000.0 * 0.1 * 0.9);
  for (std::size_t b = 0; b < 10; ++b) {
    CHECK(std::fabs(static_cast<double>(r.occupancy[b]) - 1000.0) <= band);
  }
}

TEST_CASE("align tables zero-fills union grids") {
  const JointTable a({0.0}, {0.0}, {1.0});
  const JointTable b({1.0}, {0.0}, {1.0});
  const auto [aa, bb] = align_tables(a, b);
  CHECK(aa.nx() == 2);
  CHECK(aa.mass(0, 0) == 1.0);
  CHECK(aa.mass(1, 0) == 0.0);
  CHECK(bb.mass(1, 0) == 1.0);
}

TEST_CASE("discretize model snaps continuous families onto a grid") {
  const ConditionalModel model(FiniteLaw({0.0}, {1.0}), {TargetFamily::gaussian(0.0, 1.0)});
  const std::vector<double> grid = linspace(-6.0, 6.0, 61);
  const ConditionalModel snapped = discretize_model(model, grid);
  CHECK(snapped.all_finite_discrete());
  const FiniteLaw& law = snapped.family(0).law();
  double mean = law.mean();
  CHECK(std::fabs(mean) < 1e-10);

  // The grid overloads route through the same truncation.
  const FiniteLaw mm = mixture_marginal(model, grid);
  CHECK(mm.mean() == doctest::Approx(mean).epsilon(1e-14));
  const JointTable jt = joint_table(model, grid);
  CHECK(jt.ny() == 1);
  CHECK(jt.x_marginal()[30] == doctest::Approx(law.weights()[30]).epsilon(1e-14));
}
