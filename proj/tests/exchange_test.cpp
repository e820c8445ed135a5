#include <doctest.h>

#include <numbers>
#include <set>

#include "exchangelab/exchange.hpp"
#include "exchangelab/rng.hpp"
#include "oracles.hpp"

using namespace exchangelab;

namespace {

MarkovMeasure golden_chain() {
  return MarkovMeasure({{Rational(1, 2), Rational(1, 2)}, {1, 0}});
}

// Random primitive row-stochastic matrix on {2..5} states carrying at least
// one zero entry. With 3+ states any single zero leaves the chain primitive
// (complete positivity pattern minus one edge); 2 states need the zero on
// the diagonal, or the other state becomes absorbing.
MarkovMeasure random_chain_with_zero(const CounterRng& rng,
                                     std::uint64_t stream) {
  const int k = 2 + static_cast<int>(rng.below(stream, 0, 4));
  int zi = 1, zj = 1;
  if (k > 2) {
    zi = static_cast<int>(rng.below(stream, 1, static_cast<std::uint64_t>(k)));
    zj = static_cast<int>(rng.below(stream, 2, static_cast<std::uint64_t>(k)));
  }
  std::vector<std::vector<Rational>> Pi(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    Rational row_sum = 0;
    std::vector<Rational> row(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) {
      if (i == zi && j == zj) continue;
      row[static_cast<std::size_t>(j)] =
          Rational(1 + static_cast<long>(rng.below(
                           stream, 10 + static_cast<std::uint64_t>(i * k + j),
                           9)));
      row_sum += row[static_cast<std::size_t>(j)];
    }
    for (auto& q : row) q /= row_sum;
    Pi[static_cast<std::size_t>(i)] = std::move(row);
  }
  return MarkovMeasure(std::move(Pi));
}

}  // namespace

TEST_CASE("product laws have zero deviation, exactly") {
  const ProcessMeasure mu = BernoulliMeasure({Rational(1, 3), Rational(2, 3)});
  for (int n : {2, 3, 4}) {
    const ExchangeReport rep = check_exchangeable(mu, n, 1e-12);
    CHECK(rep.exchangeable);
    CHECK(rep.exhaustive);
    CHECK(rep.exact);
    CHECK(rep.max_deviation_exact == 0);
    CHECK(rep.max_deviation == 0.0);
  }

  const ProcessMeasure mix =
      MixtureMeasure({{Rational(1, 2), {Rational(4, 5), Rational(1, 5)}},
                      {Rational(1, 2), {Rational(1, 5), Rational(4, 5)}}});
  const ExchangeReport rep = check_exchangeable(mix, 4, 1e-12);
  CHECK(rep.exchangeable);
  CHECK(rep.max_deviation_exact == 0);
}

TEST_CASE("the chain fixture breaks at deviation 1/6") {
  const ExchangeReport rep =
      check_exchangeable(ProcessMeasure(golden_chain()), 3, 1e-12);
  CHECK(!rep.exchangeable);
  CHECK(rep.exact);
  CHECK(rep.max_deviation_exact == Rational(1, 6));
  // First maximizer in scan order: 001 against its (1 2)-image 010.
  CHECK(rep.worst_cylinder == parse_cylinder("0:001"));
  CHECK(rep.worst_perm == perm_transposition(1, 2));
  CHECK(rep.perms_checked == 6);
}

TEST_CASE("kernel laws pass the exchangeability scan only when degenerate") {
  // Zero interaction across sites: the process is i.i.d. coin flips.
  const ProcessMeasure iid = DeterminantalMeasure(ExplicitToeplitz({0.5}));
  const ExchangeReport flat = check_exchangeable(iid, 3, 1e-9);
  CHECK(flat.exchangeable);
  CHECK(!flat.exact);

  // The repulsive kernel is stationary but not exchangeable.
  const ProcessMeasure sine = DeterminantalMeasure(SineKernel(0.0));
  const ExchangeReport rep = check_exchangeable(sine, 3, 1e-9);
  CHECK(!rep.exchangeable);
  CHECK(rep.max_deviation ==
        doctest::Approx(1.0 / (std::numbers::pi * std::numbers::pi))
            .epsilon(1e-9));
}

TEST_CASE("sampled scan engages beyond the enumeration budget") {
  ExchangeOptions opt;
  opt.enum_cap = 40;  // below the 2^3 * 3! = 48 pairs the full scan needs
  opt.sampled_perms = 50;
  const ExchangeReport rep = check_exchangeable(
      ProcessMeasure(golden_chain()), 3, 1e-12, opt);
  CHECK(!rep.exhaustive);
  CHECK(rep.perms_checked == 50);
  // Sampling still finds the violation: with 50 draws of S_3 the chance of
  // missing every deviating permutation is astronomically small.
  CHECK(!rep.exchangeable);
}

TEST_CASE("density table flags the certifying rows") {
  const RnRatioTable table = rn_ratio_table(
      ProcessMeasure(golden_chain()), perm_transposition(0, 1), Window(0, 2));
  REQUIRE(table.rows.size() == 8);
  CHECK(table.has_violation());

  std::set<std::string> violations;
  std::set<std::string> zero_zero;
  for (const auto& row : table.rows) {
    if (row.flag == RnFlag::Violation) violations.insert(to_string(row.c));
    if (row.flag == RnFlag::ZeroZero) zero_zero.insert(to_string(row.c));
    if (row.flag == RnFlag::Finite) {
      CHECK(row.exact_ratio);
      CHECK(row.ratio_exact ==
            row.image_prob.value_exact / row.base_prob.value_exact);
    }
  }
  CHECK(violations == std::set<std::string>{"0:011", "0:101"});
  CHECK(zero_zero == std::set<std::string>{"0:110", "0:111"});

  // 011 certifies: image mass 1/6 sits on a null base event.
  const auto& row = table.rows[3];
  CHECK(row.c == parse_cylinder("0:011"));
  CHECK(row.image_prob.value_exact == Rational(1, 6));
  CHECK(row.base_prob.structural_zero);

  // Exchangeable laws have constant ratio 1.
  const RnRatioTable flat = rn_ratio_table(
      ProcessMeasure(BernoulliMeasure({Rational(1, 4), Rational(3, 4)})),
      perm_transposition(0, 2), Window(0, 2));
  CHECK(!flat.has_violation());
  for (const auto& row2 : flat.rows)
    if (row2.flag == RnFlag::Finite) CHECK(row2.ratio_exact == 1);

  // The permutation must act inside the table window.
  CHECK_THROWS_AS(rn_ratio_table(ProcessMeasure(golden_chain()),
                                 perm_transposition(0, 5), Window(0, 2)),
                  std::invalid_argument);
}

TEST_CASE("witness construction on the chain fixture") {
  const auto w = quasi_witness_markov(golden_chain());
  REQUIRE(w.has_value());
  CHECK(w->c == parse_cylinder("0:0011"));
  CHECK(w->d == parse_cylinder("0:1010"));
  CHECK(w->sigma == perm_transposition(0, 3));
  CHECK(w->mu_c.structural_zero);
  CHECK(w->mu_d.value_exact == Rational(1, 6));

  // The stated relation holds: D is the sigma-preimage of C.
  const Constraints image = perm_apply_to_cylinder(w->sigma, w->c);
  CHECK(as_cylinder(image) == w->d);
}

TEST_CASE("witness requirements and absence") {
  // All-positive chain: no witness exists.
  const MarkovMeasure positive(
      {{Rational(1, 2), Rational(1, 2)}, {Rational(1, 4), Rational(3, 4)}});
  CHECK(!quasi_witness_markov(positive).has_value());

  // Periodic pattern: the construction's premise fails.
  const MarkovMeasure periodic({{0, 1}, {1, 0}},
                               std::vector<Rational>{Rational(1, 2),
                                                     Rational(1, 2)});
  CHECK_THROWS_AS(quasi_witness_markov(periodic), std::invalid_argument);
}

TEST_CASE("witness postconditions hold over random primitive chains") {
  const CounterRng rng{2024};
  int found = 0;
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    const MarkovMeasure chain = random_chain_with_zero(rng, trial);
    const auto w = quasi_witness_markov(chain);
    REQUIRE(w.has_value());
    ++found;
    const ProcessMeasure mu = chain;

    // Certifying pair: mu(C) = 0 structurally, mu(D) > 0, D = preimage of C.
    const Prob pc = cylinder_prob(mu, w->c);
    const Prob pd = cylinder_prob(mu, w->d);
    CHECK(pc.structural_zero);
    CHECK(pd.value_exact > 0);
    CHECK(w->mu_c.value_exact == pc.value_exact);
    CHECK(w->mu_d.value_exact == pd.value_exact);
    CHECK(as_cylinder(perm_apply_to_cylinder(w->sigma, w->c)) == w->d);

    // And the direct product evaluation agrees.
    CHECK(oracle::markov_word_prob(chain.p, chain.Pi, w->c.word) == 0);
    CHECK(oracle::markov_word_prob(chain.p, chain.Pi, w->d.word) ==
          pd.value_exact);
  }
  CHECK(found == 20);
}

TEST_CASE("group averaging yields an invariant table") {
  const ProcessMeasure mu = golden_chain();
  const SymmetrizeTable table = symmetrize(mu, 1, Window(-1, 1));
  CHECK(table.exhaustive);
  CHECK(table.perms_used == 6);
  REQUIRE(table.rows.size() == 8);

  // Row values: stationary chain probabilities averaged over S_{[-1,1]}.
  auto value = [&](const char* c) {
    for (const auto& row : table.rows)
      if (row.c == parse_cylinder(c)) return row.nu.value_exact;
    FAIL("row not found");
    return Rational(0);
  };
  CHECK(value("-1:000") == Rational(1, 6));
  CHECK(value("-1:001") == Rational(2, 9));
  CHECK(value("-1:010") == Rational(2, 9));
  CHECK(value("-1:100") == Rational(2, 9));
  CHECK(value("-1:011") == Rational(1, 18));
  CHECK(value("-1:101") == Rational(1, 18));
  CHECK(value("-1:110") == Rational(1, 18));
  CHECK(value("-1:111") == 0);

  // Total mass 1 and exact invariance under the whole group.
  Rational mass = 0;
  for (const auto& row : table.rows) mass += row.nu.value_exact;
  CHECK(mass == 1);
  const TableDeviation dev = table_exchange_deviation(table);
  CHECK(dev.exact);
  CHECK(dev.value_exact == 0);
}

TEST_CASE("group averaging fixes laws that were already invariant") {
  const ProcessMeasure mu = BernoulliMeasure({Rational(2, 5), Rational(3, 5)});
  const SymmetrizeTable table = symmetrize(mu, 1, Window(-1, 1));
  for (const auto& row : table.rows)
    CHECK(row.nu.value_exact == cylinder_prob(mu, row.c).value_exact);
}

TEST_CASE("monte carlo averaging approximates the exact table") {
  const ProcessMeasure mu = golden_chain();
  SymmetrizeOptions opt;
  opt.force_mc = true;
  opt.mc_perms = 20000;
  const SymmetrizeTable table = symmetrize(mu, 1, Window(-1, 1), opt);
  CHECK(!table.exhaustive);
  const SymmetrizeTable exact = symmetrize(mu, 1, Window(-1, 1));
  for (std::size_t i = 0; i < table.rows.size(); ++i)
    CHECK(table.rows[i].nu.value ==
          doctest::Approx(exact.rows[i].nu.value).epsilon(0.02));

  // Identical seeds reproduce the table; the window must cover [-N, N].
  const SymmetrizeTable again = symmetrize(mu, 1, Window(-1, 1), opt);
  for (std::size_t i = 0; i < table.rows.size(); ++i)
    CHECK(table.rows[i].nu.value == again.rows[i].nu.value);
  CHECK_THROWS_AS(symmetrize(mu, 2, Window(-1, 1)), std::invalid_argument);
}
