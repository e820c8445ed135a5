#include "exchangelab/measures.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "exchangelab/parallel.hpp"
#include "exchangelab/rng.hpp"

namespace exchangelab {

namespace {

using RMat = std::vector<std::vector<Rational>>;

const Rational kSumTol("1/1000000000000");          // 1e-12
const Rational kStationaryTol("1/10000000000");     // 1e-10
constexpr double kDetBand = 1e-9;
constexpr long kCellCap = 1 << 20;

Rational rat_abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

void check_probability_vector(const std::vector<Rational>& pi,
                              const std::string& what) {
  if (pi.size() < 2)
    throw std::invalid_argument(what + " needs at least 2 entries");
  Rational sum = 0;
  for (const auto& x : pi) {
    if (x < 0) throw std::invalid_argument(what + " has a negative entry");
    sum += x;
  }
  if (rat_abs(sum - 1) > kSumTol)
    throw std::invalid_argument(what + " does not sum to 1 (got " +
                                to_string(sum) + ")");
}

RMat mat_mul(const RMat& A, const RMat& B) {
  const int n = static_cast<int>(A.size());
  RMat C(n, std::vector<Rational>(n, Rational(0)));
  for (int i = 0; i < n; ++i)
    for (int l = 0; l < n; ++l) {
      if (A[i][l] == 0) continue;
      for (int j = 0; j < n; ++j) C[i][j] += A[i][l] * B[l][j];
    }
  return C;
}

RMat mat_pow(const RMat& A, long e) {
  const int n = static_cast<int>(A.size());
  RMat result(n, std::vector<Rational>(n, Rational(0)));
  for (int i = 0; i < n; ++i) result[i][i] = 1;
  RMat base = A;
  while (e > 0) {
    if (e & 1) result = mat_mul(result, base);
    e >>= 1;
    if (e) base = mat_mul(base, base);
  }
  return result;
}

long checked_cell_count(int k, int len, long cap) {
  long cells = 1;
  for (int i = 0; i < len; ++i) {
    if (cells > cap / k)
      throw std::invalid_argument("window cell count exceeds the cap");
    cells *= k;
  }
  return cells;
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

Prob exact_prob(Rational q) {
  q.canonicalize();
  Prob p;
  p.exact = true;
  p.value = to_double(q);
  p.structural_zero = (q == 0);
  p.value_exact = std::move(q);
  return p;
}

Prob float_prob(double v) {
  Prob p;
  p.exact = false;
  p.value = v;
  return p;
}

BernoulliMeasure::BernoulliMeasure(std::vector<Rational> pi_in)
    : alphabet(static_cast<int>(pi_in.size())), pi(std::move(pi_in)) {
  check_probability_vector(pi, "marginal pi");
}

MixtureMeasure::MixtureMeasure(std::vector<MixtureComponent> components_in)
    : alphabet(components_in.empty() || components_in[0].pi.size() < 2
                   ? 2
                   : static_cast<int>(components_in[0].pi.size())),
      components(std::move(components_in)) {
  if (components.empty())
    throw std::invalid_argument("mixture needs at least one component");
  Rational wsum = 0;
  for (const auto& comp : components) {
    if (comp.w < 0)
      throw std::invalid_argument("mixture weight is negative");
    wsum += comp.w;
    if (static_cast<int>(comp.pi.size()) != alphabet.size)
      throw std::invalid_argument("mixture components disagree on alphabet");
    check_probability_vector(comp.pi, "component pi");
  }
  if (rat_abs(wsum - 1) > kSumTol)
    throw std::invalid_argument("mixture weights do not sum to 1");
}

MarkovMeasure::MarkovMeasure(std::vector<std::vector<Rational>> Pi_in,
                             std::optional<std::vector<Rational>> p_in)
    : alphabet(static_cast<int>(Pi_in.size())), Pi(std::move(Pi_in)) {
  const int k = alphabet.size;
  for (const auto& row : Pi) {
    if (static_cast<int>(row.size()) != k)
      throw std::invalid_argument("transition matrix is not square");
    check_probability_vector(row, "transition row");
  }
  if (p_in) {
    p = std::move(*p_in);
    if (static_cast<int>(p.size()) != k)
      throw std::invalid_argument("stationary vector has wrong length");
    check_probability_vector(p, "stationary vector");
    for (int j = 0; j < k; ++j) {
      Rational lhs = 0;
      for (int i = 0; i < k; ++i) lhs += p[i] * Pi[i][j];
      if (rat_abs(lhs - p[j]) > kStationaryTol)
        throw std::invalid_argument("supplied vector is not stationary");
    }
  } else {
    p = stationary_vector(Pi);
  }
}

SineKernel::SineKernel(double a_in) : a(a_in) {
  if (!(a >= -2.0 && a <= 2.0))
    throw std::invalid_argument("sine kernel parameter must lie in [-2, 2]");
}

ExplicitToeplitz::ExplicitToeplitz(std::vector<double> c_in)
    : c(std::move(c_in)) {
  if (c.empty())
    throw std::invalid_argument("Toeplitz kernel needs at least c_0");
}

Alphabet alphabet_of(const ProcessMeasure& mu) {
  return std::visit([](const auto& m) { return m.alphabet; }, mu);
}

double sine_s1(int x, double a) {
  if (!(a >= -2.0 && a <= 2.0))
    throw std::invalid_argument("sine kernel parameter must lie in [-2, 2]");
  const double theta = std::acos(a / 2.0);
  if (x == 0) return theta / std::numbers::pi;
  return std::sin(theta * x) / (std::numbers::pi * x);
}

double sine_kernel_value(int x, int y, double a) { return sine_s1(x - y, a); }

double kernel_value(const KernelSpec& kernel, int x, int y) {
  if (const auto* sine = std::get_if<SineKernel>(&kernel))
    return sine_s1(x - y, sine->a);
  const auto& c = std::get<ExplicitToeplitz>(kernel).c;
  const int lag = std::abs(x - y);
  return lag < static_cast<int>(c.size()) ? c[lag] : 0.0;
}

namespace {

Eigen::MatrixXd kernel_matrix(const KernelSpec& kernel,
                              const std::vector<int>& pts) {
  const int n = static_cast<int>(pts.size());
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = kernel_value(kernel, pts[i], pts[j]);
  return m;
}

std::vector<int> sorted_unique(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

double banded_probability(double det, const char* what) {
  if (det < -kDetBand || det > 1.0 + kDetBand)
    throw KernelValidityError(std::string(what) +
                              " determinant escapes [0,1]: " +
                              fmt_double(det));
  return std::clamp(det, 0.0, 1.0);
}

}  // namespace

double dpp_inclusion_prob(const KernelSpec& kernel, const std::vector<int>& A,
                          int cap) {
  auto pts = sorted_unique(A);
  if (pts.empty())
    throw std::invalid_argument("inclusion probability needs a nonempty set");
  if (static_cast<int>(pts.size()) > cap)
    throw std::invalid_argument("determinant size exceeds the cap");
  double det = kernel_matrix(kernel, pts).partialPivLu().determinant();
  return banded_probability(det, "inclusion");
}

double dpp_window_config_prob(const KernelSpec& kernel,
                              const std::vector<int>& S,
                              const std::vector<int>& A, int cap) {
  auto sites = sorted_unique(S);
  auto present = sorted_unique(A);
  if (sites.empty())
    throw std::invalid_argument("configuration needs a nonempty site set");
  if (static_cast<int>(sites.size()) > cap)
    throw std::invalid_argument("determinant size exceeds the cap");
  if (!std::includes(sites.begin(), sites.end(), present.begin(),
                     present.end()))
    throw std::invalid_argument("configuration set escapes the site set");

  Eigen::MatrixXd m = kernel_matrix(kernel, sites);
  int absent = 0;
  for (int i = 0; i < static_cast<int>(sites.size()); ++i) {
    if (!std::binary_search(present.begin(), present.end(), sites[i])) {
      m(i, i) -= 1.0;
      ++absent;
    }
  }
  double det = m.partialPivLu().determinant();
  if (absent & 1) det = -det;
  return banded_probability(det, "configuration");
}

double dpp_window_config_prob(const KernelSpec& kernel, const Window& W,
                              const std::vector<int>& A, int cap) {
  std::vector<int> sites(W.length());
  for (int i = 0; i < W.length(); ++i) sites[i] = W.t_min + i;
  return dpp_window_config_prob(kernel, sites, A, cap);
}

namespace {

Prob bernoulli_prob(const BernoulliMeasure& m, const Constraints& cs) {
  Rational prod = 1;
  for (const auto& [t, s] : cs) prod *= m.pi[s];
  return exact_prob(std::move(prod));
}

Prob mixture_prob(const MixtureMeasure& m, const Constraints& cs) {
  Rational sum = 0;
  for (const auto& comp : m.components) {
    Rational prod = comp.w;
    for (const auto& [t, s] : cs) prod *= comp.pi[s];
    sum += prod;
  }
  return exact_prob(std::move(sum));
}

Prob markov_prob(const MarkovMeasure& m, const Constraints& cs) {
  Rational prod = m.p[cs.front().second];
  for (std::size_t i = 1; i < cs.size(); ++i) {
    const long gap = static_cast<long>(cs[i].first) - cs[i - 1].first;
    const int from = cs[i - 1].second, to = cs[i].second;
    prod *= gap == 1 ? m.Pi[from][to] : mat_pow(m.Pi, gap)[from][to];
    if (prod == 0) return exact_prob(Rational(0));
  }
  return exact_prob(std::move(prod));
}

Prob dpp_prob(const DeterminantalMeasure& m, const Constraints& cs) {
  std::vector<int> sites, present;
  sites.reserve(cs.size());
  for (const auto& [t, s] : cs) {
    sites.push_back(t);
    if (s == 1) present.push_back(t);
  }
  return float_prob(
      dpp_window_config_prob(m.kernel, sites, present, m.det_cap));
}

}  // namespace

Prob constraint_prob(const ProcessMeasure& mu, const Constraints& cs) {
  const bool is_dpp = std::holds_alternative<DeterminantalMeasure>(mu);
  auto norm = normalize_constraints(cs);
  if (!norm) return is_dpp ? float_prob(0.0) : exact_prob(Rational(0));

  const Alphabet ab = alphabet_of(mu);
  for (const auto& [t, s] : *norm)
    if (!ab.contains(s))
      throw std::invalid_argument("symbol " + std::to_string(s) +
                                  " is outside the alphabet");
  if (norm->empty()) return is_dpp ? float_prob(1.0) : exact_prob(Rational(1));

  return std::visit(
      [&](const auto& m) -> Prob {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, BernoulliMeasure>)
          return bernoulli_prob(m, *norm);
        else if constexpr (std::is_same_v<T, MixtureMeasure>)
          return mixture_prob(m, *norm);
        else if constexpr (std::is_same_v<T, MarkovMeasure>)
          return markov_prob(m, *norm);
        else
          return dpp_prob(m, *norm);
      },
      mu);
}

Prob cylinder_prob(const ProcessMeasure& mu, const Cylinder& c) {
  return constraint_prob(mu, constraints_of(c));
}

bool ValidationReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const ValidationCheck& c) { return c.passed; });
}

ValidationReport validate_measure(const ProcessMeasure& mu, int window_len) {
  if (window_len < 1)
    throw std::invalid_argument("validation window must be nonempty");
  const int k = alphabet_of(mu).size;
  const bool is_dpp = std::holds_alternative<DeterminantalMeasure>(mu);
  if (is_dpp && window_len > std::get<DeterminantalMeasure>(mu).det_cap)
    throw std::invalid_argument("validation window exceeds determinant cap");
  checked_cell_count(k, window_len, kCellCap);

  ValidationReport rep;
  auto prob_of = [&](const std::vector<int>& word) {
    return cylinder_prob(mu, Cylinder(0, word));
  };

  // An invalid kernel can surface as an out-of-band determinant long before
  // the spectrum check runs; report it on the check in progress instead of
  // escaping, per the no-throw contract.
  try {
    std::vector<int> word(window_len, 0);
    Rational exact_sum = 0;
    double float_sum = 0;
    do {
      Prob p = prob_of(word);
      if (p.exact)
        exact_sum += p.value_exact;
      else
        float_sum += p.value;
    } while (next_word(word, k));
    ValidationCheck chk;
    chk.name = "normalization";
    if (!is_dpp) {
      chk.passed = rat_abs(exact_sum - 1) <= Rational("1/10000000000");
      chk.detail = "total mass " + to_string(exact_sum);
    } else {
      chk.passed = std::abs(float_sum - 1.0) <= 1e-10;
      chk.detail = "total mass " + fmt_double(float_sum);
    }
    rep.checks.push_back(std::move(chk));
  } catch (const KernelValidityError& e) {
    rep.checks.push_back({"normalization", false, e.what()});
  }

  if (window_len >= 2) try {
    Rational exact_dev = 0;
    double float_dev = 0;
    std::vector<int> word(window_len - 1, 0);
    do {
      Prob shorter = prob_of(word);
      std::vector<int> longer = word;
      longer.push_back(0);
      Rational esum = 0;
      double fsum = 0;
      for (int s = 0; s < k; ++s) {
        longer.back() = s;
        Prob p = prob_of(longer);
        if (p.exact)
          esum += p.value_exact;
        else
          fsum += p.value;
      }
      if (shorter.exact)
        exact_dev = std::max(exact_dev, rat_abs(esum - shorter.value_exact));
      else
        float_dev = std::max(float_dev, std::abs(fsum - shorter.value));
    } while (next_word(word, k));
    ValidationCheck chk;
    chk.name = "consistency";
    if (!is_dpp) {
      chk.passed = exact_dev <= kSumTol;
      chk.detail = "max marginalization gap " + to_string(exact_dev);
    } else {
      chk.passed = float_dev <= 1e-12;
      chk.detail = "max marginalization gap " + fmt_double(float_dev);
    }
    rep.checks.push_back(std::move(chk));
  } catch (const KernelValidityError& e) {
    rep.checks.push_back({"consistency", false, e.what()});
  }

  if (is_dpp) {
    const auto& dm = std::get<DeterminantalMeasure>(mu);
    std::vector<int> sites(window_len);
    for (int i = 0; i < window_len; ++i) sites[i] = i;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        kernel_matrix(dm.kernel, sites));
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    ValidationCheck chk;
    chk.name = "spectrum";
    chk.passed = lo >= -1e-8 && hi <= 1.0 + 1e-8;
    chk.detail = "eigenvalues in [" + fmt_double(lo) + ", " + fmt_double(hi) +
                 "]";
    rep.checks.push_back(std::move(chk));
  }

  return rep;
}

namespace {

// Index of the first cdf entry exceeding u; cdf is increasing with final
// entry 1 up to rounding.
int pick(const std::vector<double>& cdf, double u) {
  for (int s = 0; s < static_cast<int>(cdf.size()); ++s)
    if (u < cdf[s]) return s;
  return static_cast<int>(cdf.size()) - 1;
}

std::vector<double> cdf_of(const std::vector<Rational>& pi) {
  std::vector<double> cdf(pi.size());
  Rational cum = 0;
  for (std::size_t s = 0; s < pi.size(); ++s) {
    cum += pi[s];
    cdf[s] = to_double(cum);
  }
  return cdf;
}

void sample_bernoulli(const BernoulliMeasure& m, int len,
                      const CounterRng& rng,
                      std::vector<std::vector<int>>& paths) {
  const auto cdf = cdf_of(m.pi);
  parallel_for(static_cast<std::int64_t>(paths.size()), [&](std::int64_t j) {
    auto& row = paths[j];
    row.resize(len);
    for (int i = 0; i < len; ++i)
      row[i] = pick(cdf, rng.u01(static_cast<std::uint64_t>(j),
                                 static_cast<std::uint64_t>(i)));
  });
}

void sample_markov(const MarkovMeasure& m, int len, const CounterRng& rng,
                   std::vector<std::vector<int>>& paths) {
  const auto p_cdf = cdf_of(m.p);
  std::vector<std::vector<double>> row_cdf;
  row_cdf.reserve(m.Pi.size());
  for (const auto& row : m.Pi) row_cdf.push_back(cdf_of(row));
  parallel_for(static_cast<std::int64_t>(paths.size()), [&](std::int64_t j) {
    auto& row = paths[j];
    row.resize(len);
    int prev = pick(p_cdf, rng.u01(j, 0));
    row[0] = prev;
    for (int i = 1; i < len; ++i) {
      prev = pick(row_cdf[prev], rng.u01(j, static_cast<std::uint64_t>(i)));
      row[i] = prev;
    }
  });
}

void sample_mixture(const MixtureMeasure& m, int len, const CounterRng& rng,
                    std::vector<std::vector<int>>& paths) {
  const int k = m.alphabet.size;
  const int n_comp = static_cast<int>(m.components.size());
  parallel_for(static_cast<std::int64_t>(paths.size()), [&](std::int64_t j) {
    auto& row = paths[j];
    row.resize(len);
    // Posterior over components given the sampled prefix; renormalized each
    // step so magnitudes stay tame.
    std::vector<Rational> post(n_comp);
    for (int c = 0; c < n_comp; ++c) post[c] = m.components[c].w;
    for (int i = 0; i < len; ++i) {
      const double u = rng.u01(j, static_cast<std::uint64_t>(i));
      double cum = 0.0;
      int sym = k - 1;
      for (int s = 0; s < k; ++s) {
        Rational pred = 0;
        for (int c = 0; c < n_comp; ++c)
          pred += post[c] * m.components[c].pi[s];
        cum += to_double(pred);
        if (u < cum) {
          sym = s;
          break;
        }
      }
      row[i] = sym;
      Rational total = 0;
      for (int c = 0; c < n_comp; ++c) {
        post[c] *= m.components[c].pi[sym];
        total += post[c];
      }
      if (total == 0) throw std::runtime_error("impossible sampled prefix");
      for (int c = 0; c < n_comp; ++c) post[c] /= total;
    }
  });
}

void sample_dpp(const DeterminantalMeasure& m, const Window& W,
                const CounterRng& rng,
                std::vector<std::vector<int>>& paths) {
  const int len = W.length();
  if (len > m.det_cap)
    throw std::invalid_argument("sampling window exceeds determinant cap");
  parallel_for(static_cast<std::int64_t>(paths.size()), [&](std::int64_t j) {
    auto& row = paths[j];
    row.resize(len);
    std::vector<int> sites, present;
    double denom = 1.0;
    for (int i = 0; i < len; ++i) {
      const int site = W.t_min + i;
      sites.push_back(site);
      present.push_back(site);
      const double with_point =
          dpp_window_config_prob(m.kernel, sites, present, m.det_cap);
      present.pop_back();
      if (denom <= 0.0) throw std::runtime_error("impossible sampled prefix");
      const double q1 = with_point / denom;
      if (rng.u01(j, static_cast<std::uint64_t>(i)) < q1) {
        row[i] = 1;
        present.push_back(site);
        denom = with_point;
      } else {
        row[i] = 0;
        denom = denom - with_point;
      }
    }
  });
}

}  // namespace

std::vector<std::vector<int>> sample_path(const ProcessMeasure& mu,
                                          const Window& W, std::uint64_t seed,
                                          int n_paths) {
  if (n_paths < 0) throw std::invalid_argument("negative path count");
  std::vector<std::vector<int>> paths(n_paths);
  const CounterRng rng{seed};
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, BernoulliMeasure>)
          sample_bernoulli(m, W.length(), rng, paths);
        else if constexpr (std::is_same_v<T, MarkovMeasure>)
          sample_markov(m, W.length(), rng, paths);
        else if constexpr (std::is_same_v<T, MixtureMeasure>)
          sample_mixture(m, W.length(), rng, paths);
        else
          sample_dpp(m, W, rng, paths);
      },
      mu);
  return paths;
}

std::vector<Rational> stationary_vector(
    const std::vector<std::vector<Rational>>& Pi) {
  const int k = static_cast<int>(Pi.size());
  // Unknown row vector p: p (Pi - I) = 0 stacked with sum(p) = 1, solved by
  // exact Gauss-Jordan. Rank below k means the chain does not pin p down.
  std::vector<std::vector<Rational>> aug(
      k + 1, std::vector<Rational>(k + 1, Rational(0)));
  for (int j = 0; j < k; ++j) {
    for (int i = 0; i < k; ++i)
      aug[j][i] = Pi[i][j] - Rational(i == j ? 1 : 0);
  }
  for (int i = 0; i < k; ++i) aug[k][i] = 1;
  aug[k][k] = 1;

  int row = 0;
  std::vector<int> pivot_cols;
  for (int col = 0; col < k && row <= k; ++col) {
    int pivot = -1;
    for (int r = row; r <= k; ++r)
      if (aug[r][col] != 0) {
        pivot = r;
        break;
      }
    if (pivot < 0) continue;
    std::swap(aug[row], aug[pivot]);
    const Rational lead = aug[row][col];
    for (int c = col; c <= k; ++c) aug[row][c] /= lead;
    for (int r = 0; r <= k; ++r) {
      if (r == row || aug[r][col] == 0) continue;
      const Rational f = aug[r][col];
      for (int c = col; c <= k; ++c) aug[r][c] -= f * aug[row][c];
    }
    pivot_cols.push_back(col);
    ++row;
  }
  if (static_cast<int>(pivot_cols.size()) < k)
    throw std::invalid_argument(
        "stationary vector is not unique; supply one explicitly");
  for (int r = row; r <= k; ++r)
    if (aug[r][k] != 0)
      throw std::invalid_argument("no stationary vector exists");

  std::vector<Rational> p(k);
  for (int r = 0; r < k; ++r) p[pivot_cols[r]] = aug[r][k];
  for (const auto& x : p)
    if (x < 0)
      throw std::invalid_argument("stationary solve gave a negative entry");
  return p;
}

bool is_primitive(const std::vector<std::vector<Rational>>& Pi) {
  const int k = static_cast<int>(Pi.size());
  std::vector<std::vector<bool>> base(k, std::vector<bool>(k));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) base[i][j] = Pi[i][j] > 0;
  auto all_positive = [&](const std::vector<std::vector<bool>>& m) {
    for (const auto& r : m)
      for (bool b : r)
        if (!b) return false;
    return true;
  };
  std::vector<std::vector<bool>> power = base;
  for (int step = 1; step <= k * k; ++step) {
    if (all_positive(power)) return true;
    std::vector<std::vector<bool>> next(k, std::vector<bool>(k, false));
    for (int i = 0; i < k; ++i)
      for (int l = 0; l < k; ++l)
        if (power[i][l])
          for (int j = 0; j < k; ++j)
            if (base[l][j]) next[i][j] = true;
    power = std::move(next);
  }
  return false;
}

}  // namespace exchangelab
