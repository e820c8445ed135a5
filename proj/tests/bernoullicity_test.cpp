#include <doctest.h>

#include <cmath>

#include "exchangelab/bernoullicity.hpp"
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

TEST_CASE("product laws are exactly independent at every gap") {
  const ProcessMeasure mu = BernoulliMeasure({Rational(1, 3), Rational(2, 3)});
  for (int g : {0, 1, 5}) {
    const IndependenceGapReport rep = independence_gap(mu, 2, 2, g);
    CHECK(rep.exact);
    CHECK(rep.tv_exact == 0);
    CHECK(rep.tv == 0.0);
    CHECK(rep.cells == 16);
  }
}

TEST_CASE("the chain fixture halves its gap per step of separation") {
  const ProcessMeasure mu = golden_chain();
  const IndependenceGapReport g0 = independence_gap(mu, 1, 1, 0);
  CHECK(g0.exact);
  CHECK(g0.tv_exact == Rational(2, 9));

  const IndependenceGapReport g1 = independence_gap(mu, 1, 1, 1);
  CHECK(g1.tv_exact == Rational(1, 9));

  // Ratio exactly 1/2 down the sweep: the second eigenvalue is -1/2.
  Rational prev = g0.tv_exact;
  for (int g = 1; g <= 8; ++g) {
    const IndependenceGapReport rep = independence_gap(mu, 1, 1, g);
    CHECK(rep.tv_exact == prev / 2);
    prev = rep.tv_exact;
  }
}

TEST_CASE("longer blocks keep the decay rate") {
  const ProcessMeasure mu = golden_chain();
  Rational prev;
  for (int g = 0; g <= 4; ++g) {
    const IndependenceGapReport rep = independence_gap(mu, 2, 2, g);
    CHECK(rep.cells == 16);
    if (g > 0) {
      CHECK(rep.tv_exact > 0);
      CHECK(rep.tv_exact < prev);
    }
    prev = rep.tv_exact;
  }
}

TEST_CASE("a genuine mixture never decorrelates") {
  const ProcessMeasure mu = half_half_mixture();
  for (int g : {0, 3, 10}) {
    const IndependenceGapReport rep = independence_gap(mu, 1, 1, g);
    CHECK(rep.exact);
    CHECK(rep.tv_exact == Rational(9, 50));
  }
}

TEST_CASE("the joint table matches brute-force marginalization") {
  const ProcessMeasure mu = golden_chain();
  const auto& chain = std::get<MarkovMeasure>(mu);
  auto word_prob = [&](const std::vector<int>& w) {
    return oracle::markov_word_prob(chain.p, chain.Pi, w);
  };

  // Recompute tv at (past 2, future 1, gap 2) from scratch.
  const int g = 2;
  Rational tv = 0;
  for (int a0 = 0; a0 < 2; ++a0)
    for (int a1 = 0; a1 < 2; ++a1)
      for (int b0 = 0; b0 < 2; ++b0) {
        const Constraints joint{{-1, a0}, {0, a1}, {g + 1, b0}};
        const Constraints past{{-1, a0}, {0, a1}};
        const Constraints future{{g + 1, b0}};
        const Rational j =
            oracle::scattered_by_enumeration(2, joint, word_prob);
        const Rational p = oracle::scattered_by_enumeration(2, past, word_prob);
        const Rational f =
            oracle::scattered_by_enumeration(2, future, word_prob);
        const Rational d = j - p * f;
        tv += d >= 0 ? d : -d;
      }
  tv /= 2;

  const IndependenceGapReport rep = independence_gap(mu, 2, 1, g);
  CHECK(rep.exact);
  CHECK(rep.tv_exact == tv);
}

TEST_CASE("kernel laws decorrelate numerically") {
  const ProcessMeasure mu = DeterminantalMeasure(SineKernel(0.0));
  const IndependenceGapReport near = independence_gap(mu, 1, 1, 0);
  CHECK(!near.exact);
  // |cov| at adjacent sites is 1/pi^2; tv for two binary cells is 2|cov|.
  CHECK(near.tv == doctest::Approx(2.0 / (std::numbers::pi * std::numbers::pi))
                       .epsilon(1e-9));
  const IndependenceGapReport far = independence_gap(mu, 1, 1, 7);
  CHECK(far.tv < near.tv);
  CHECK(far.tv < 0.02);
}

TEST_CASE("independence gap is symmetric in time for reversible input") {
  // The two-state chain fixture is reversible, so swapping the block sizes
  // mirrors the table and preserves the distance.
  const ProcessMeasure mu = golden_chain();
  for (int g : {0, 1, 2}) {
    const IndependenceGapReport a = independence_gap(mu, 2, 1, g);
    const IndependenceGapReport b = independence_gap(mu, 1, 2, g);
    CHECK(a.tv_exact == b.tv_exact);
  }
}

TEST_CASE("occupation averages settle at the target for ergodic laws") {
  const ProcessMeasure mu = golden_chain();
  const Cylinder f = parse_cylinder("1:1");
  const ErgodicAverageReport rep = ergodic_average(mu, f, 600, 2, 1, 120, 5);
  CHECK(rep.target == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(rep.estimate == doctest::Approx(rep.target).epsilon(0.05));
  // Fluctuations at horizon Q decay like 1/sqrt(Q) plus the O((R+k)/Q) bias.
  CHECK(rep.deviation < 0.06);
  REQUIRE(rep.per_path.size() == 120);

  const ErgodicAverageReport longer =
      ergodic_average(mu, f, 6000, 2, 1, 120, 5);
  CHECK(longer.deviation < rep.deviation);
}

TEST_CASE("occupation averages split across mixture components") {
  const ProcessMeasure mu = half_half_mixture();
  const Cylinder f = parse_cylinder("1:1");
  const ErgodicAverageReport rep = ergodic_average(mu, f, 800, 0, 0, 200, 9);
  CHECK(rep.target == doctest::Approx(0.5).epsilon(1e-12));
  // Each path hugs its component frequency 1/5 or 4/5, so the deviation
  // stays pinned near 3/10 no matter the horizon.
  CHECK(rep.deviation == doctest::Approx(0.3).epsilon(0.12));
  int low = 0, high = 0;
  for (double v : rep.per_path) {
    if (v < 0.35) ++low;
    if (v > 0.65) ++high;
  }
  CHECK(low + high == 200);
  CHECK(low > 60);
  CHECK(high > 60);
}

TEST_CASE("ergodic average reruns byte-identically and validates inputs") {
  const ProcessMeasure mu = golden_chain();
  const Cylinder f = parse_cylinder("1:1");
  const ErgodicAverageReport a = ergodic_average(mu, f, 300, 1, 1, 40, 77);
  const ErgodicAverageReport b = ergodic_average(mu, f, 300, 1, 1, 40, 77);
  CHECK(a.per_path == b.per_path);
  CHECK(a.estimate == b.estimate);

  CHECK_THROWS_AS(ergodic_average(mu, f, 2, 1, 1, 10, 1),
                  std::invalid_argument);
}

namespace {

// Independent route to the weighted path average: the block swap is built as
// a permutation and pushed through the cylinder action, and the swapped
// event is evaluated as a scattered constraint set, sharing nothing with the
// word-level swap inside the implementation. Needs f.offset == 1 so the
// home block matches the anchored swap. Returns the exact rational xi / q.
Rational weighted_avg_by_perm_action(const ProcessMeasure& mu,
                                     const std::vector<int>& path,
                                     const Cylinder& f, long q, int r, int k) {
  const Prob pc = cylinder_prob(mu, Cylinder(1, path));
  REQUIRE(pc.value_exact > 0);
  Rational xi = 0;
  for (long p = r + k + 1; p <= q; ++p) {
    bool match = true;
    for (int i = 0; i < f.length(); ++i)
      if (path[p + i] != f.word[i]) {
        match = false;
        break;
      }
    if (!match) continue;
    const auto sigma = perm_block_swap(static_cast<int>(p), f.length());
    const auto moved = perm_apply_to_cylinder(sigma, Cylinder(1, path));
    xi += constraint_prob(mu, moved).value_exact / pc.value_exact;
  }
  return Rational(xi / q);
}

}  // namespace

TEST_CASE("ratio weights reproduce the block-swapped cylinder ratios") {
  const Cylinder f = parse_cylinder("1:1");

  SUBCASE("exchangeable laws weight every occurrence by exactly one") {
    const std::vector<ProcessMeasure> laws = {
        BernoulliMeasure({Rational(1, 2), Rational(1, 2)}),
        half_half_mixture()};
    for (const auto& mu : laws) {
      const long q = 60;
      const auto rep = weighted_ergodic_average(mu, f, q, 0, 1, 8, 99);
      CHECK(rep.ratio_weighted);
      const auto paths = sample_path(mu, Window(1, 61), 99, 8);
      for (int j = 0; j < 8; ++j) {
        const Rational exact =
            weighted_avg_by_perm_action(mu, paths[j], f, q, 0, 1);
        CHECK(rep.per_path[j] == to_double(exact));
        long hits = 0;
        for (long p = 2; p <= q; ++p)
          if (paths[j][p] == f.word[0]) ++hits;
        CHECK(exact == Rational(hits) / q);
      }
    }
  }

  SUBCASE("the chain fixture sheds mass through the swapped ratios") {
    const ProcessMeasure mu = golden_chain();
    const long q = 40;
    const auto rep = weighted_ergodic_average(mu, f, q, 1, 1, 6, 7);
    const auto again = weighted_ergodic_average(mu, f, q, 1, 1, 6, 7);
    CHECK(rep.per_path == again.per_path);

    const auto paths = sample_path(mu, Window(1, 41), 7, 6);
    bool any_weight_bit = false;
    for (int j = 0; j < 6; ++j) {
      const Rational exact =
          weighted_avg_by_perm_action(mu, paths[j], f, q, 1, 1);
      CHECK(rep.per_path[j] == to_double(exact));
      long hits = 0;
      for (long p = 3; p <= q; ++p)
        if (paths[j][p] == f.word[0]) ++hits;
      if (exact != Rational(hits) / q) any_weight_bit = true;
      CHECK(rep.per_path[j] >= 0.0);
    }
    CHECK(any_weight_bit);
  }

  SUBCASE("kernel laws and overlapping blocks are rejected") {
    const ProcessMeasure dpp = DeterminantalMeasure(SineKernel(0.0));
    CHECK_THROWS_AS(weighted_ergodic_average(dpp, f, 40, 1, 1, 2, 1),
                    std::invalid_argument);
    const ProcessMeasure mu = golden_chain();
    CHECK_THROWS_AS(weighted_ergodic_average(mu, f, 40, 0, 0, 2, 1),
                    std::invalid_argument);
  }
}
