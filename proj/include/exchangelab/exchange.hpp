#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "exchangelab/core.hpp"
#include "exchangelab/measures.hpp"

namespace exchangelab {

struct ExchangeOptions {
  // Exhaustive scan runs when |K|^n * n! fits the cap and n stays small;
  // otherwise a seeded sample of permutations gives a lower bound on the
  // true deviation (the max over a subset never exceeds the full max).
  std::int64_t enum_cap = 10'000'000;
  int exhaustive_max_n = 8;
  int sampled_perms = 20'000;
  std::uint64_t seed = 12345;
};

struct ExchangeReport {
  int window_len = 0;
  double max_deviation = 0.0;
  bool exact = false;
  Rational max_deviation_exact;
  Cylinder worst_cylinder;
  FinitePermutation worst_perm;
  bool exchangeable = false;
  double tol = 0.0;
  bool exhaustive = true;
  std::int64_t perms_checked = 0;
};

// Max over cylinders C on [0, n-1] and permutations of that window of
// |mu(C) - mu(sigma^{-1}-image of C)|. The reported worst pair is the first
// maximizer in (cylinder-lex, permutation-lex one-line) order.
ExchangeReport check_exchangeable(const ProcessMeasure& mu, int n, double tol,
                                  const ExchangeOptions& opt = {});

enum class RnFlag { Finite, ZeroZero, Violation };

struct RnRow {
  Cylinder c;
  Prob image_prob;  // mu of the sigma-preimage of c
  Prob base_prob;   // mu(c)
  RnFlag flag = RnFlag::Finite;
  double ratio = 0.0;
  bool exact_ratio = false;
  Rational ratio_exact;
};

struct RnRatioTable {
  FinitePermutation sigma;
  Window window;
  std::vector<RnRow> rows;

  bool has_violation() const;
};

// One row per cylinder on W: the density of mu After sigma against mu,
// restricted to cylinders. A row where exactly one side is zero certifies
// that the two laws are not equivalent. Requires support(sigma) inside W.
RnRatioTable rn_ratio_table(const ProcessMeasure& mu,
                            const FinitePermutation& sigma, const Window& W,
                            long cell_cap = 1 << 20);

struct QuasiWitness {
  Cylinder c;
  Cylinder d;  // the sigma-preimage of c
  FinitePermutation sigma;
  Prob mu_c;   // structurally zero
  Prob mu_d;   // positive
};

// Constructive non-quasi-exchangeability witness for a primitive chain with
// a forbidden transition: scan row-major for the first zero entry (i0, j0),
// take the smallest a with positive (j0 -> a) and j with positive (i0 -> j),
// bridge a to i0 by the breadth-first shortest positive path, and swap the
// first and last coordinates of [[j, a, ..., i0, j0]]. Returns nothing when
// every transition is positive. Throws std::invalid_argument when no power
// of the transition pattern is entrywise positive.
std::optional<QuasiWitness> quasi_witness_markov(const MarkovMeasure& chain);

struct SymmetrizeOptions {
  int exact_max_n = 4;  // largest N enumerated exhaustively ((2N+1)!)
  int mc_perms = 20'000;
  std::uint64_t seed = 12345;
  bool force_mc = false;
};

struct SymmetrizeRow {
  Cylinder c;
  Prob nu;
};

struct SymmetrizeTable {
  int N = 0;
  Window window;
  int alphabet_size = 2;
  bool exhaustive = true;
  std::int64_t perms_used = 0;
  std::vector<SymmetrizeRow> rows;  // every cylinder on the window, lex order
};

// Group average over the permutations supported in [-N, N]: the returned
// table is the restriction to W of a law invariant under that group. Exact
// rational when the family is exact and the mode exhaustive; Monte Carlo
// rows are doubles. Requires W to contain [-N, N].
SymmetrizeTable symmetrize(const ProcessMeasure& mu, int N, const Window& W,
                           const SymmetrizeOptions& opt = {});

struct TableDeviation {
  double value = 0.0;
  bool exact = false;
  Rational value_exact;
};

// Max |nu(C) - nu(image of C)| over the table's cylinders and every
// permutation supported in [-N, N]; zero certifies invariance on the window.
TableDeviation table_exchange_deviation(const SymmetrizeTable& table);

}  // namespace exchangelab
