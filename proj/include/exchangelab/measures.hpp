#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "exchangelab/core.hpp"
#include "exchangelab/rational.hpp"

namespace exchangelab {

// Probability of a finite-coordinate event. The product, mixture and Markov
// families carry an exact rational alongside the double; the determinantal
// family is double only. structural_zero marks an exact zero forced by a
// zero input factor, decided in rational arithmetic, never by magnitude.
struct Prob {
  bool exact = false;
  Rational value_exact;
  double value = 0.0;
  bool structural_zero = false;
};

Prob exact_prob(Rational q);
Prob float_prob(double v);

// i.i.d. product law with marginal pi.
struct BernoulliMeasure {
  Alphabet alphabet;
  std::vector<Rational> pi;

  explicit BernoulliMeasure(std::vector<Rational> pi);
};

struct MixtureComponent {
  Rational w;
  std::vector<Rational> pi;
};

// Convex combination of product laws; exchangeable but not ergodic when two
// components differ.
struct MixtureMeasure {
  Alphabet alphabet;
  std::vector<MixtureComponent> components;

  explicit MixtureMeasure(std::vector<MixtureComponent> components);
};

// Stationary Markov chain: row-stochastic Pi and invariant row vector p.
// When p is omitted it is solved for exactly; the chain must then determine
// it uniquely.
struct MarkovMeasure {
  Alphabet alphabet;
  std::vector<std::vector<Rational>> Pi;
  std::vector<Rational> p;

  explicit MarkovMeasure(std::vector<std::vector<Rational>> Pi,
                         std::optional<std::vector<Rational>> p = std::nullopt);
};

// Translation-invariant kernel S(x,y) = S_1(x-y, a) on the lattice,
// S_1(x,a) = sin(x arccos(a/2)) / (pi x), S_1(0,a) = arccos(a/2) / pi.
// Requires -2 <= a <= 2; the endpoints give the empty and the full process.
struct SineKernel {
  double a;
  explicit SineKernel(double a);
};

// k(x,y) = c[|x-y|], zero beyond the stored lags. |c_0| <= 1 is required of
// a valid kernel but deliberately not enforced here: validation reports the
// spectrum failure instead, so invalid kernels can be constructed, fed to
// validate_measure, and rejected with a diagnosis.
struct ExplicitToeplitz {
  std::vector<double> c;
  explicit ExplicitToeplitz(std::vector<double> c);
};

using KernelSpec = std::variant<SineKernel, ExplicitToeplitz>;

// Determinantal point process on the integers, seen as a binary process:
// symbol 1 at x means x is in the random configuration.
struct DeterminantalMeasure {
  Alphabet alphabet{2};
  KernelSpec kernel;
  int det_cap = 64;

  explicit DeterminantalMeasure(KernelSpec k, int cap = 64)
      : kernel(std::move(k)), det_cap(cap) {}
};

using ProcessMeasure = std::variant<BernoulliMeasure, MixtureMeasure,
                                    MarkovMeasure, DeterminantalMeasure>;

Alphabet alphabet_of(const ProcessMeasure& mu);

// Raised when a kernel determinant lands outside [-1e-9, 1+1e-9]: the matrix
// is not the restriction of a valid point-process kernel.
struct KernelValidityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double sine_s1(int x, double a);
double sine_kernel_value(int x, int y, double a);
double kernel_value(const KernelSpec& kernel, int x, int y);

// P(A subset of the configuration) = det of the kernel matrix on A.
// Values within 1e-9 of [0,1] are clamped onto it; farther out raises
// KernelValidityError.
double dpp_inclusion_prob(const KernelSpec& kernel, const std::vector<int>& A,
                          int cap = 64);

// P(configuration restricted to S equals exactly A), A subset of S, via the
// complementation determinant (-1)^{|S \ A|} det(K_S - I_{S \ A}). S may be
// any finite set of sites, not only an interval.
double dpp_window_config_prob(const KernelSpec& kernel,
                              const std::vector<int>& S,
                              const std::vector<int>& A, int cap = 64);
double dpp_window_config_prob(const KernelSpec& kernel, const Window& W,
                              const std::vector<int>& A, int cap = 64);

// Probability of the cylinder event.
Prob cylinder_prob(const ProcessMeasure& mu, const Cylinder& c);

// Probability of a scattered pinned-coordinate event; coordinates not named
// are marginalized over. Conflicting constraints give probability zero.
// Empty constraints give 1.
Prob constraint_prob(const ProcessMeasure& mu, const Constraints& cs);

struct ValidationCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool all_passed() const;
};

// Checks, over the window [0, window_len-1]: total cylinder mass 1 within
// 1e-10, one-coordinate marginal consistency within 1e-12, and for the
// determinantal family the kernel spectrum within [-1e-8, 1+1e-8].
// Failures are reported, not thrown.
ValidationReport validate_measure(const ProcessMeasure& mu, int window_len);

// n_paths independent draws of the coordinates in W, each row one path.
// Coordinate i of path j depends only on (seed, j, i), so any evaluation
// order gives identical output. Sampling is sequential left to right from
// exact conditionals.
std::vector<std::vector<int>> sample_path(const ProcessMeasure& mu,
                                          const Window& W, std::uint64_t seed,
                                          int n_paths);

// Exact stationary row vector of a stochastic matrix; throws
// std::invalid_argument when the matrix does not determine it uniquely.
std::vector<Rational> stationary_vector(
    const std::vector<std::vector<Rational>>& Pi);

// Some power of the positivity pattern is entrywise positive (power at most
// size^2): equivalent to irreducible plus aperiodic.
bool is_primitive(const std::vector<std::vector<Rational>>& Pi);

}  // namespace exchangelab
