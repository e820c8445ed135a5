#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "exchangelab/measures.hpp"
#include "oracles.hpp"

using namespace exchangelab;

namespace {

MarkovMeasure golden_chain() {
  return MarkovMeasure({{Rational(1, 2), Rational(1, 2)}, {1, 0}});
}

MixtureMeasure half_half_mixture() {
  return MixtureMeasure({{Rational(1, 2), {Rational(4, 5), Rational(1, 5)}},
                         {Rational(1, 2), {Rational(1, 5), Rational(4, 5)}}});
}

}  // namespace

TEST_CASE("product law multiplies marginals") {
  const BernoulliMeasure mu({Rational(1, 3), Rational(2, 3)});
  const Prob p = cylinder_prob(ProcessMeasure(mu), parse_cylinder("0:011"));
  CHECK(p.exact);
  CHECK(p.value_exact == Rational(4, 27));
  CHECK(!p.structural_zero);

  // A zero marginal forces a structural zero.
  const BernoulliMeasure degenerate({1, 0});
  const Prob z =
      cylinder_prob(ProcessMeasure(degenerate), parse_cylinder("0:01"));
  CHECK(z.structural_zero);
  CHECK(z.value_exact == 0);

  CHECK_THROWS_AS(BernoulliMeasure({Rational(1, 2), Rational(1, 3)}),
                  std::invalid_argument);
}

TEST_CASE("chain fixture hits its closed-form cylinder values") {
  const ProcessMeasure mu = golden_chain();
  const auto& chain = std::get<MarkovMeasure>(mu);
  CHECK(chain.p == std::vector<Rational>{Rational(2, 3), Rational(1, 3)});

  CHECK(cylinder_prob(mu, parse_cylinder("0:011")).structural_zero);
  CHECK(cylinder_prob(mu, parse_cylinder("0:101")).value_exact ==
        Rational(1, 6));
  CHECK(cylinder_prob(mu, parse_cylinder("0:010")).value_exact ==
        Rational(1, 3));
  CHECK(cylinder_prob(mu, parse_cylinder("0:0011")).structural_zero);
  CHECK(cylinder_prob(mu, parse_cylinder("0:1010")).value_exact ==
        Rational(1, 6));

  // Stationarity was solved for, so shifting changes nothing.
  for (const char* w : {"0:011", "0:101", "0:0100"}) {
    const Cylinder c = parse_cylinder(w);
    CHECK(cylinder_prob(mu, c).value_exact ==
          cylinder_prob(mu, shift_cylinder(c, -7)).value_exact);
  }
}

TEST_CASE("scattered constraints marginalize the gap coordinates") {
  const ProcessMeasure mu = golden_chain();
  const auto& chain = std::get<MarkovMeasure>(mu);
  auto word_prob = [&](const std::vector<int>& w) {
    return oracle::markov_word_prob(chain.p, chain.Pi, w);
  };

  const Constraints gaps{{0, 1}, {3, 1}, {7, 0}};
  const Prob fast = constraint_prob(mu, gaps);
  CHECK(fast.exact);
  CHECK(fast.value_exact ==
        oracle::scattered_by_enumeration(2, gaps, word_prob));

  // A single far pin reduces to the invariant marginal.
  CHECK(constraint_prob(mu, {{41, 1}}).value_exact == Rational(1, 3));

  // Conflicting pins give an exact structural zero; empty pins give mass 1.
  const Prob conflict = constraint_prob(mu, {{2, 0}, {2, 1}});
  CHECK(conflict.structural_zero);
  CHECK(constraint_prob(mu, {}).value_exact == 1);
}

TEST_CASE("mixture law averages its components") {
  const ProcessMeasure mu = half_half_mixture();
  // P(x0=1, x1=1) = (1/2)(1/25) + (1/2)(16/25).
  CHECK(cylinder_prob(mu, parse_cylinder("0:11")).value_exact ==
        Rational(17, 50));

  // One component collapses to the plain product law.
  const ProcessMeasure single =
      MixtureMeasure({{1, {Rational(1, 3), Rational(2, 3)}}});
  const ProcessMeasure plain =
      BernoulliMeasure({Rational(1, 3), Rational(2, 3)});
  std::vector<int> w(3, 0);
  do {
    const Cylinder c(0, w);
    CHECK(cylinder_prob(single, c).value_exact ==
          cylinder_prob(plain, c).value_exact);
  } while (next_word(w, 2));

  CHECK_THROWS_AS(
      MixtureMeasure({{Rational(1, 2), {Rational(1, 2), Rational(1, 2)}}}),
      std::invalid_argument);
}

TEST_CASE("stationary vector is solved exactly") {
  // Two-state chain with known invariant vector (3/7, 4/7).
  const std::vector<std::vector<Rational>> Pi{
      {Rational(1, 5), Rational(4, 5)}, {Rational(3, 5), Rational(2, 5)}};
  CHECK(stationary_vector(Pi) ==
        std::vector<Rational>{Rational(3, 7), Rational(4, 7)});

  const MarkovMeasure solved(Pi);
  CHECK(solved.p == std::vector<Rational>{Rational(3, 7), Rational(4, 7)});

  // A reducible chain with two invariant vectors is rejected.
  const std::vector<std::vector<Rational>> id{{1, 0}, {0, 1}};
  CHECK_THROWS_AS(stationary_vector(id), std::invalid_argument);

  // A supplied non-invariant vector is rejected.
  CHECK_THROWS_AS(
      MarkovMeasure(Pi, std::vector<Rational>{Rational(1, 2), Rational(1, 2)}),
      std::invalid_argument);
}

TEST_CASE("primitivity detection") {
  using R = Rational;
  CHECK(is_primitive({{R(1, 2), R(1, 2)}, {1, 0}}));
  // Period-two chain: irreducible but not aperiodic.
  CHECK(!is_primitive({{0, 1}, {1, 0}}));
  // Reducible chain.
  CHECK(!is_primitive({{1, 0}, {R(1, 2), R(1, 2)}}));
  CHECK(is_primitive({{R(1, 3), R(1, 3), R(1, 3)},
                      {R(1, 2), R(1, 2), 0},
                      {1, 0, 0}}));
}

TEST_CASE("translation-invariant kernel closed forms at a = 0") {
  CHECK(sine_s1(0, 0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(sine_s1(1, 0.0) ==
        doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-15));
  CHECK(sine_s1(2, 0.0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(sine_s1(-1, 0.0) ==
        doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-15));
  CHECK(kernel_value(KernelSpec(SineKernel(0.0)), 5, 4) ==
        doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-15));

  CHECK_THROWS_AS(SineKernel(2.5), std::invalid_argument);
  CHECK_THROWS_AS(SineKernel(-2.001), std::invalid_argument);
}

TEST_CASE("inclusion and configuration probabilities at a = 0") {
  const KernelSpec k{SineKernel(0.0)};
  const double pi2 = std::numbers::pi * std::numbers::pi;

  CHECK(dpp_inclusion_prob(k, {0}) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(dpp_inclusion_prob(k, {0, 1}) ==
        doctest::Approx(0.25 - 1.0 / pi2).epsilon(1e-12));
  CHECK(dpp_inclusion_prob(k, {0, 1, 2}) ==
        doctest::Approx(0.125 - 1.0 / pi2).epsilon(1e-12));

  CHECK(dpp_window_config_prob(k, Window(0, 0), {}) ==
        doctest::Approx(0.5).epsilon(1e-14));
  CHECK(dpp_window_config_prob(k, Window(0, 1), {0}) ==
        doctest::Approx(0.25 + 1.0 / pi2).epsilon(1e-12));
  CHECK(dpp_window_config_prob(k, Window(0, 2), {0, 1}) ==
        doctest::Approx(0.125).epsilon(1e-12));
  CHECK(dpp_window_config_prob(k, Window(0, 2), {0, 2}) ==
        doctest::Approx(0.125 + 1.0 / pi2).epsilon(1e-12));
}

TEST_CASE("configuration probabilities match inclusion-exclusion") {
  for (double a : {-1.0, 0.0, 0.7, 1.0}) {
    const KernelSpec k{SineKernel(a)};
    // Interval window.
    for (int subset_mask = 0; subset_mask < 16; ++subset_mask) {
      std::vector<int> A;
      for (int i = 0; i < 4; ++i)
        if (subset_mask >> i & 1) A.push_back(i);
      const double got = dpp_window_config_prob(k, Window(0, 3), A);
      const double want =
          oracle::dpp_config_by_inclusion_exclusion(k, {0, 1, 2, 3}, A);
      CHECK(got == doctest::Approx(want).epsilon(1e-10));
    }
    // Scattered site set.
    const std::vector<int> sites{-3, 0, 2, 7};
    for (int subset_mask = 0; subset_mask < 16; ++subset_mask) {
      std::vector<int> A;
      for (int i = 0; i < 4; ++i)
        if (subset_mask >> i & 1) A.push_back(sites[static_cast<std::size_t>(i)]);
      const double got = dpp_window_config_prob(k, sites, A);
      const double want =
          oracle::dpp_config_by_inclusion_exclusion(k, sites, A);
      CHECK(got == doctest::Approx(want).epsilon(1e-10));
    }
  }
}

TEST_CASE("point-process cylinders are translation invariant") {
  const ProcessMeasure mu = DeterminantalMeasure(SineKernel(0.4));
  for (const char* w : {"0:1", "0:10", "0:011", "0:0101"}) {
    const Cylinder c = parse_cylinder(w);
    const double base = cylinder_prob(mu, c).value;
    CHECK(cylinder_prob(mu, shift_cylinder(c, 9)).value ==
          doctest::Approx(base).epsilon(1e-12));
    CHECK(cylinder_prob(mu, shift_cylinder(c, -4)).value ==
          doctest::Approx(base).epsilon(1e-12));
  }

  // Point-process zeros are numeric, never structural.
  const ProcessMeasure full = DeterminantalMeasure(SineKernel(-2.0));
  const Prob p = cylinder_prob(full, parse_cylinder("0:0"));
  CHECK(p.value == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(!p.structural_zero);
  CHECK(!p.exact);
}

TEST_CASE("explicit kernels evaluate by lag and cap the table") {
  const KernelSpec k{ExplicitToeplitz({0.5, 0.2})};
  CHECK(kernel_value(k, 3, 3) == 0.5);
  CHECK(kernel_value(k, 3, 4) == 0.2);
  CHECK(kernel_value(k, 4, 3) == 0.2);
  CHECK(kernel_value(k, 0, 2) == 0.0);
  CHECK_THROWS_AS(ExplicitToeplitz({}), std::invalid_argument);

  // The determinant cap rejects oversized windows instead of stalling.
  CHECK_THROWS_AS(dpp_inclusion_prob(k, {0, 1, 2, 3, 4}, 4),
                  std::invalid_argument);
}

TEST_CASE("kernel determinants outside the probability band throw") {
  // c0 = 1.5 puts every diagonal minor above 1.
  const KernelSpec bad{ExplicitToeplitz({1.5})};
  CHECK_THROWS_AS(dpp_inclusion_prob(bad, {0}), KernelValidityError);
}

TEST_CASE("validation passes the stock families and diagnoses bad kernels") {
  for (const ProcessMeasure& mu :
       {ProcessMeasure(BernoulliMeasure({Rational(1, 3), Rational(2, 3)})),
        ProcessMeasure(half_half_mixture()), ProcessMeasure(golden_chain()),
        ProcessMeasure(DeterminantalMeasure(SineKernel(0.0)))}) {
    const ValidationReport rep = validate_measure(mu, 3);
    CHECK(rep.all_passed());
  }

  const ValidationReport bad = validate_measure(
      ProcessMeasure(DeterminantalMeasure(ExplicitToeplitz({1.5}))), 3);
  CHECK(!bad.all_passed());
  const auto spectrum =
      std::find_if(bad.checks.begin(), bad.checks.end(),
                   [](const ValidationCheck& c) { return c.name == "spectrum"; });
  REQUIRE(spectrum != bad.checks.end());
  CHECK(!spectrum->passed);
}

TEST_CASE("sampling matches the exact law and is reproducible") {
  const Window w(1, 12);

  SUBCASE("chain paths avoid the forbidden transition") {
    const ProcessMeasure mu = golden_chain();
    const auto rows = sample_path(mu, w, 42, 400);
    REQUIRE(rows.size() == 400);
    int ones = 0;
    for (const auto& row : rows) {
      REQUIRE(static_cast<int>(row.size()) == w.length());
      for (std::size_t i = 0; i + 1 < row.size(); ++i)
        CHECK(!(row[i] == 1 && row[i + 1] == 1));
      for (int s : row) ones += s;
    }
    // Mean symbol frequency near the invariant 1/3; 4800 draws.
    CHECK(static_cast<double>(ones) / (400.0 * 12.0) ==
          doctest::Approx(1.0 / 3.0).epsilon(0.08));
  }

  SUBCASE("byte-identical reruns, any path count") {
    const ProcessMeasure mu = DeterminantalMeasure(SineKernel(0.0));
    const auto a = sample_path(mu, w, 7, 5);
    const auto b = sample_path(mu, w, 7, 5);
    CHECK(a == b);
    // Path j depends on (seed, j) alone, not on how many paths are drawn.
    const auto wide = sample_path(mu, w, 7, 9);
    for (std::size_t j = 0; j < a.size(); ++j) CHECK(wide[j] == a[j]);
    const auto other = sample_path(mu, w, 8, 5);
    CHECK(a != other);
  }

  SUBCASE("point-process one-site frequency tracks the kernel diagonal") {
    const ProcessMeasure mu = DeterminantalMeasure(SineKernel(0.0));
    const auto rows = sample_path(mu, Window(0, 0), 9, 4000);
    int ones = 0;
    for (const auto& row : rows) ones += row[0];
    CHECK(static_cast<double>(ones) / 4000.0 ==
          doctest::Approx(0.5).epsilon(0.05));
  }

  SUBCASE("mixture sampling renormalizes on the observed prefix") {
    // Components concentrated near 0 and near 1: paths should be coherent,
    // mostly matching their component's lean symbol-by-symbol.
    const ProcessMeasure mu = half_half_mixture();
    const auto rows = sample_path(mu, Window(0, 19), 300, 200);
    int mixed = 0;
    for (const auto& row : rows) {
      int ones = 0;
      for (int s : row) ones += s;
      if (ones >= 7 && ones <= 13) ++mixed;
    }
    // Binomial(20, .2)/(20, .8) rarely land in [7, 13]; a fused sampler that
    // ignored the posterior would sit at p = 1/2 and land there almost always.
    CHECK(mixed < 60);
  }
}
