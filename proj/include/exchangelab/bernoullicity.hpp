#pragma once

#include <cstdint>
#include <vector>

#include "exchangelab/core.hpp"
#include "exchangelab/measures.hpp"

namespace exchangelab {

struct IndependenceGapReport {
  int past_len = 0;
  int future_len = 0;
  int gap = 0;
  long cells = 0;
  double tv = 0.0;
  bool exact = false;
  Rational tv_exact;
};

// Total variation distance between the joint law of (past, future) blocks
// separated by g free coordinates and the product of their marginals:
// tv = 1/2 sum over cell pairs of |joint - product|. The past block sits on
// [-past_len+1, 0], the future block on [g+1, g+future_len]. Zero for every
// product law; bounded away from zero for genuine mixtures; decaying in g
// at the second-eigenvalue rate for primitive chains.
IndependenceGapReport independence_gap(const ProcessMeasure& mu, int past_len,
                                       int future_len, int g,
                                       long cell_cap = 1 << 20);

struct ErgodicAverageReport {
  Cylinder f;
  long q = 0;
  int r = 0;
  int k = 0;
  int n_paths = 0;
  std::uint64_t seed = 0;
  bool ratio_weighted = false;
  double estimate = 0.0;   // mean over paths of the path average
  double target = 0.0;     // mu(F)
  double deviation = 0.0;  // mean over paths of |path average - target|
  std::vector<double> per_path;
};

// Monte Carlo fluctuation of the windowed occupation average
// (1/Q) sum_{P=R+k+1}^{Q} 1{F occurs at shift P} around mu(F). The divisor
// is Q, not the term count, matching the averaged family exactly, so the
// estimate carries an O((R+k)/Q) downward bias that vanishes as Q grows.
// Ergodic laws drive the deviation to zero; mixtures leave it pinned at the
// mean atom spread.
ErgodicAverageReport ergodic_average(const ProcessMeasure& mu,
                                     const Cylinder& f, long q, int r, int k,
                                     int n_paths, std::uint64_t seed);

// Ratio-weighted variant: the occurrence indicator at shift P is multiplied
// by mu(D_P) / mu(C), where C is the sampled path's cylinder on the whole
// window and D_P exchanges the block at F's home position with the block at
// shift P. Exchangeable laws weight every term by exactly 1 and reproduce
// ergodic_average; laws whose permuted image loses equivalence shed or gain
// mass through the ratios. Needs exact cylinder probabilities, so the
// determinantal family is rejected, and R + k must reach past the block
// length so the swapped blocks never overlap. Cost grows with Q: every
// matching shift evaluates two window-length products.
ErgodicAverageReport weighted_ergodic_average(const ProcessMeasure& mu,
                                              const Cylinder& f, long q, int r,
                                              int k, int n_paths,
                                              std::uint64_t seed);

}  // namespace exchangelab
