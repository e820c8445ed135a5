#include "exchangelab/exchange.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

#include "exchangelab/parallel.hpp"
#include "exchangelab/rng.hpp"

namespace exchangelab {

namespace {

Rational rat_abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

bool prob_is_zero(const Prob& p) {
  return p.exact ? p.structural_zero : p.value == 0.0;
}

long checked_cells(int k, int len, long cap) {
  long cells = 1;
  for (int i = 0; i < len; ++i) {
    if (cells > cap / k)
      throw std::invalid_argument("cylinder count exceeds the enumeration cap");
    cells *= k;
  }
  return cells;
}

std::int64_t factorial(int n) {
  std::int64_t f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Probabilities of every cylinder on W, indexed by word rank.
std::vector<Prob> window_prob_table(const ProcessMeasure& mu, const Window& W,
                                    long cells) {
  const int k = alphabet_of(mu).size;
  std::vector<Prob> probs(cells);
  parallel_for(cells, [&](std::int64_t r) {
    probs[r] = cylinder_prob(
        mu, Cylinder(W.t_min, word_unrank(r, W.length(), k)));
  });
  return probs;
}

FinitePermutation window_perm(const std::vector<int>& img, int t_min) {
  std::map<int, int> m;
  for (int j = 0; j < static_cast<int>(img.size()); ++j)
    m[t_min + j] = t_min + img[j];
  return FinitePermutation::from_map(m);
}

}  // namespace

ExchangeReport check_exchangeable(const ProcessMeasure& mu, int n, double tol,
                                  const ExchangeOptions& opt) {
  if (n < 1) throw std::invalid_argument("window length must be positive");
  if (tol < 0) throw std::invalid_argument("tolerance must be nonnegative");
  const int k = alphabet_of(mu).size;
  const long cells = checked_cells(k, n, opt.enum_cap);
  const std::int64_t n_fact = n <= 20 ? factorial(n) : opt.enum_cap + 1;
  const bool exhaustive =
      n <= opt.exhaustive_max_n && cells <= opt.enum_cap / n_fact;
  const std::int64_t perm_count =
      exhaustive ? n_fact : static_cast<std::int64_t>(opt.sampled_perms);

  const Window W(0, n - 1);
  const auto probs = window_prob_table(mu, W, cells);
  const bool exact = probs.empty() || probs.front().exact;
  const CounterRng rng{opt.seed};

  std::vector<long> kpow(n);
  for (int j = n - 1, p = 1; j >= 0; --j, p *= k) kpow[j] = p;

  // Per-cylinder first maximizer over the permutation scan.
  struct Best {
    Rational dev_e;
    double dev_d = -1.0;
    std::int64_t perm_rank = -1;
  };
  std::vector<Best> best(cells);

  parallel_for(cells, [&](std::int64_t r) {
    const auto word = word_unrank(r, n, k);
    Best b;
    auto consider = [&](const std::vector<int>& img, std::int64_t rank_p) {
      long image_rank = 0;
      for (int j = 0; j < n; ++j) image_rank += word[j] * kpow[img[j]];
      if (exact) {
        Rational dev =
            rat_abs(probs[r].value_exact - probs[image_rank].value_exact);
        if (b.perm_rank < 0 || dev > b.dev_e) {
          b.dev_e = std::move(dev);
          b.dev_d = to_double(b.dev_e);
          b.perm_rank = rank_p;
        }
      } else {
        double dev = std::abs(probs[r].value - probs[image_rank].value);
        if (b.perm_rank < 0 || dev > b.dev_d) {
          b.dev_d = dev;
          b.perm_rank = rank_p;
        }
      }
    };
    if (exhaustive) {
      std::vector<int> img(n);
      std::iota(img.begin(), img.end(), 0);
      std::int64_t rank_p = 0;
      do {
        consider(img, rank_p++);
      } while (std::next_permutation(img.begin(), img.end()));
    } else {
      for (std::int64_t s = 0; s < perm_count; ++s)
        consider(shuffled_identity(rng, static_cast<std::uint64_t>(s), n), s);
    }
    best[r] = std::move(b);
  });

  long best_cell = 0;
  for (long r = 1; r < cells; ++r) {
    const bool better = exact ? best[r].dev_e > best[best_cell].dev_e
                              : best[r].dev_d > best[best_cell].dev_d;
    if (better) best_cell = r;
  }

  // Rebuild the winning permutation from its scan rank.
  std::vector<int> win_img;
  if (exhaustive) {
    win_img.resize(n);
    std::iota(win_img.begin(), win_img.end(), 0);
    for (std::int64_t i = 0; i < best[best_cell].perm_rank; ++i)
      std::next_permutation(win_img.begin(), win_img.end());
  } else {
    win_img = shuffled_identity(
        rng, static_cast<std::uint64_t>(best[best_cell].perm_rank), n);
  }

  ExchangeReport rep;
  rep.window_len = n;
  rep.exact = exact;
  rep.max_deviation = best[best_cell].dev_d;
  if (exact) rep.max_deviation_exact = best[best_cell].dev_e;
  rep.worst_cylinder = Cylinder(0, word_unrank(best_cell, n, k));
  rep.worst_perm = window_perm(win_img, 0);
  rep.tol = tol;
  rep.exchangeable = rep.max_deviation <= tol;
  rep.exhaustive = exhaustive;
  rep.perms_checked = perm_count;
  return rep;
}

bool RnRatioTable::has_violation() const {
  return std::any_of(rows.begin(), rows.end(), [](const RnRow& r) {
    return r.flag == RnFlag::Violation;
  });
}

RnRatioTable rn_ratio_table(const ProcessMeasure& mu,
                            const FinitePermutation& sigma, const Window& W,
                            long cell_cap) {
  for (int t : sigma.support())
    if (!W.contains(t))
      throw std::invalid_argument(
          "permutation support escapes the table window");
  const int k = alphabet_of(mu).size;
  const int L = W.length();
  const long cells = checked_cells(k, L, cell_cap);
  const auto probs = window_prob_table(mu, W, cells);

  std::vector<long> kpow(L);
  for (int j = L - 1, p = 1; j >= 0; --j, p *= k) kpow[j] = p;
  std::vector<int> image_pos(L);
  for (int j = 0; j < L; ++j) image_pos[j] = sigma(W.t_min + j) - W.t_min;

  RnRatioTable table;
  table.sigma = sigma;
  table.window = W;
  table.rows.resize(cells);
  parallel_for(cells, [&](std::int64_t r) {
    const auto word = word_unrank(r, L, k);
    long image_rank = 0;
    for (int j = 0; j < L; ++j) image_rank += word[j] * kpow[image_pos[j]];
    RnRow row;
    row.c = Cylinder(W.t_min, word);
    row.base_prob = probs[r];
    row.image_prob = probs[image_rank];
    const bool base_zero = prob_is_zero(row.base_prob);
    const bool image_zero = prob_is_zero(row.image_prob);
    if (base_zero && image_zero) {
      row.flag = RnFlag::ZeroZero;
    } else if (base_zero || image_zero) {
      row.flag = RnFlag::Violation;
    } else {
      row.flag = RnFlag::Finite;
      if (row.base_prob.exact) {
        row.exact_ratio = true;
        row.ratio_exact =
            row.image_prob.value_exact / row.base_prob.value_exact;
        row.ratio = to_double(row.ratio_exact);
      } else {
        row.ratio = row.image_prob.value / row.base_prob.value;
      }
    }
    table.rows[r] = std::move(row);
  });
  return table;
}

namespace {

// Shortest positive-transition path between two states, endpoints included;
// neighbor scan in symbol order makes the result deterministic.
std::vector<int> shortest_positive_path(
    const std::vector<std::vector<Rational>>& Pi, int from, int to) {
  const int k = static_cast<int>(Pi.size());
  std::vector<int> parent(k, -1);
  std::vector<bool> seen(k, false);
  std::deque<int> queue;
  seen[from] = true;
  queue.push_back(from);
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    if (u == to) break;
    for (int v = 0; v < k; ++v) {
      if (seen[v] || Pi[u][v] == 0) continue;
      seen[v] = true;
      parent[v] = u;
      queue.push_back(v);
    }
  }
  if (!seen[to])
    throw std::invalid_argument("no positive path between states");
  std::vector<int> path;
  for (int u = to; u != -1; u = parent[u]) path.push_back(u);
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace

std::optional<QuasiWitness> quasi_witness_markov(const MarkovMeasure& chain) {
  if (!is_primitive(chain.Pi))
    throw std::invalid_argument(
        "witness construction needs an irreducible aperiodic chain");
  const int k = chain.alphabet.size;
  int i0 = -1, j0 = -1;
  for (int i = 0; i < k && i0 < 0; ++i)
    for (int j = 0; j < k; ++j)
      if (chain.Pi[i][j] == 0) {
        i0 = i;
        j0 = j;
        break;
      }
  if (i0 < 0) return std::nullopt;

  int a = -1, j = -1;
  for (int s = 0; s < k; ++s)
    if (chain.Pi[j0][s] > 0) {
      a = s;
      break;
    }
  for (int s = 0; s < k; ++s)
    if (chain.Pi[i0][s] > 0) {
      j = s;
      break;
    }

  const auto path = shortest_positive_path(chain.Pi, a, i0);
  std::vector<int> word_c, word_d;
  word_c.reserve(path.size() + 2);
  word_c.push_back(j);
  word_c.insert(word_c.end(), path.begin(), path.end());
  word_c.push_back(j0);
  word_d = word_c;
  word_d.front() = j0;
  word_d.back() = j;

  QuasiWitness w;
  w.c = Cylinder(0, word_c);
  w.d = Cylinder(0, word_d);
  w.sigma = perm_transposition(0, w.c.length() - 1);
  const ProcessMeasure mu = chain;
  w.mu_c = cylinder_prob(mu, w.c);
  w.mu_d = cylinder_prob(mu, w.d);

  if (!w.mu_c.structural_zero || !(w.mu_d.value_exact > 0) ||
      as_cylinder(perm_apply_to_cylinder(w.sigma, w.c)) != w.d)
    throw std::logic_error("witness construction failed its postconditions");
  return w;
}

SymmetrizeTable symmetrize(const ProcessMeasure& mu, int N, const Window& W,
                           const SymmetrizeOptions& opt) {
  if (N < 0) throw std::invalid_argument("negative symmetrization order");
  if (W.t_min > -N || W.t_max < N)
    throw std::invalid_argument("window must contain [-N, N]");
  const int k = alphabet_of(mu).size;
  const int L = W.length();
  const long cells = checked_cells(k, L, 1 << 16);
  const int m = 2 * N + 1;
  const bool exhaustive = !opt.force_mc && N <= opt.exact_max_n;
  if (!exhaustive && opt.mc_perms < 1)
    throw std::invalid_argument("Monte Carlo mode needs a sample count");
  const std::int64_t n_perms =
      exhaustive ? factorial(m) : static_cast<std::int64_t>(opt.mc_perms);

  const auto probs = window_prob_table(mu, W, cells);
  const bool exact = exhaustive && (probs.empty() || probs.front().exact);
  const CounterRng rng{opt.seed};

  std::vector<long> kpow(L);
  for (int j = L - 1, p = 1; j >= 0; --j, p *= k) kpow[j] = p;
  const int base = -N - W.t_min;  // window position of coordinate -N

  SymmetrizeTable table;
  table.N = N;
  table.window = W;
  table.alphabet_size = k;
  table.exhaustive = exhaustive;
  table.perms_used = n_perms;
  table.rows.resize(cells);

  parallel_for(cells, [&](std::int64_t r) {
    const auto word = word_unrank(r, L, k);
    long fixed_rank = 0;
    for (int j = 0; j < L; ++j)
      if (j < base || j >= base + m) fixed_rank += word[j] * kpow[j];

    // Count how often each image rank arises across the group, then take
    // one weighted sum; keeps the rational arithmetic per row at O(cells).
    std::vector<long> mult(cells, 0);
    auto tally = [&](const std::vector<int>& img) {
      long rank = fixed_rank;
      for (int i = 0; i < m; ++i) rank += word[base + i] * kpow[base + img[i]];
      ++mult[rank];
    };
    if (exhaustive) {
      std::vector<int> img(m);
      std::iota(img.begin(), img.end(), 0);
      do {
        tally(img);
      } while (std::next_permutation(img.begin(), img.end()));
    } else {
      for (std::int64_t s = 0; s < n_perms; ++s)
        tally(shuffled_identity(rng, static_cast<std::uint64_t>(s), m));
    }

    SymmetrizeRow row;
    row.c = Cylinder(W.t_min, word);
    if (exact) {
      Rational sum = 0;
      for (long q = 0; q < cells; ++q)
        if (mult[q]) sum += Rational(mult[q]) * probs[q].value_exact;
      row.nu = exact_prob(sum / Rational(static_cast<long>(n_perms)));
    } else {
      double sum = 0;
      for (long q = 0; q < cells; ++q)
        if (mult[q]) sum += static_cast<double>(mult[q]) * probs[q].value;
      row.nu = float_prob(sum / static_cast<double>(n_perms));
    }
    table.rows[r] = std::move(row);
  });
  return table;
}

TableDeviation table_exchange_deviation(const SymmetrizeTable& table) {
  const int N = table.N;
  const int m = 2 * N + 1;
  if (N > 4)
    throw std::invalid_argument("deviation scan enumerates at most 9! group elements");
  const Window& W = table.window;
  const int L = W.length();
  const long cells = static_cast<long>(table.rows.size());
  const int k = table.alphabet_size;

  std::vector<long> kpow(L);
  for (int j = L - 1, p = 1; j >= 0; --j, p *= k) kpow[j] = p;
  const int base = -N - W.t_min;
  const bool exact = !table.rows.empty() && table.rows.front().nu.exact;

  TableDeviation dev;
  dev.exact = exact;
  for (long r = 0; r < cells; ++r) {
    const auto word = word_unrank(r, L, k);
    long fixed_rank = 0;
    for (int j = 0; j < L; ++j)
      if (j < base || j >= base + m) fixed_rank += word[j] * kpow[j];
    std::vector<int> img(m);
    std::iota(img.begin(), img.end(), 0);
    do {
      long rank = fixed_rank;
      for (int i = 0; i < m; ++i) rank += word[base + i] * kpow[base + img[i]];
      if (exact) {
        Rational d = rat_abs(table.rows[r].nu.value_exact -
                             table.rows[rank].nu.value_exact);
        if (d > dev.value_exact) dev.value_exact = std::move(d);
      } else {
        dev.value = std::max(
            dev.value, std::abs(table.rows[r].nu.value - table.rows[rank].nu.value));
      }
    } while (std::next_permutation(img.begin(), img.end()));
  }
  if (exact) dev.value = to_double(dev.value_exact);
  return dev;
}

}  // namespace exchangelab
