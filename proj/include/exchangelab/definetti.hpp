#pragma once

#include <stdexcept>
#include <vector>

#include "exchangelab/core.hpp"
#include "exchangelab/measures.hpp"

namespace exchangelab {

// Moments m_k = P(coordinates 1..k all carry symbol 1), k = 1..r, with
// m_0 = 1 implicit. For a law that is a mixture of product measures these
// are the power moments of the mixing distribution on [0, 1].
struct MomentSequence {
  std::vector<double> m;
  bool exact = false;
  std::vector<Rational> m_exact;  // parallel to m when exact
};

MomentSequence moments(const ProcessMeasure& mu, int r);

struct HankelReport {
  int n0 = 0;
  int n1 = 0;
  double min_eig_h0 = 0.0;
  double min_eig_h1 = 0.0;
  double det_h0 = 0.0;
  bool monotone = false;    // 1 >= m_1 >= ... >= m_r >= 0
  bool consistent = false;  // both Hankel forms PSD within 1e-9
};

// Hausdorff-moment certificate: H0 = (m_{i+j}) and H1 = (m_{i+j+1} -
// m_{i+j+2}) must both be PSD for m to be the moment sequence of a measure
// on [0, 1]. A negative eigenvalue certifies that no mixture of product
// laws has these moments. Needs at least two moments.
HankelReport hankel_psd_check(const MomentSequence& m);

struct Atom {
  double p = 0.0;
  double w = 0.0;
};

struct AtomicMixingMeasure {
  std::vector<Atom> atoms;  // sorted by location ascending
  double residual = 0.0;    // max moment mismatch over k = 0..r
};

struct AtomRecoveryError : std::runtime_error {
  double residual;
  AtomRecoveryError(const std::string& msg, double res)
      : std::runtime_error(msg), residual(res) {}
};

// Prony-type inversion of the moment map: rank of the Hankel matrix fixes
// the atom count (singular values below 1e-8 of the largest count as zero),
// atom locations are the generalized eigenvalues of the shifted Hankel
// pencil, weights solve the Vandermonde system in least squares. Input is
// presumed consistent (hankel_psd_check) and atomic with at most r_max
// atoms; a residual above tol raises AtomRecoveryError carrying it.
AtomicMixingMeasure recover_atoms(const MomentSequence& m, int r_max,
                                  double tol);

// Collapses a product-type law over a general alphabet to the binary law of
// the indicator of ones_symbols. Only the product and mixture families keep
// their type under lumping; other families are rejected.
ProcessMeasure lump_to_binary(const ProcessMeasure& mu,
                              const std::vector<int>& ones_symbols);

}  // namespace exchangelab
