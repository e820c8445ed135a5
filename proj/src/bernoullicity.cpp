#include "exchangelab/bernoullicity.hpp"

#include <algorithm>
#include <cmath>

#include "exchangelab/parallel.hpp"

namespace exchangelab {

namespace {

Rational rat_abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

long checked_cells(int k, int len, long cap) {
  long cells = 1;
  for (int i = 0; i < len; ++i) {
    if (cells > cap / k)
      throw std::invalid_argument("cell count exceeds the cap");
    cells *= k;
  }
  return cells;
}

}  // namespace

IndependenceGapReport independence_gap(const ProcessMeasure& mu, int past_len,
                                       int future_len, int g, long cell_cap) {
  if (past_len < 1 || future_len < 1)
    throw std::invalid_argument("block lengths must be positive");
  if (g < 0) throw std::invalid_argument("gap must be nonnegative");
  const int k = alphabet_of(mu).size;
  const long cells = checked_cells(k, past_len + future_len, cell_cap);
  const long past_cells = checked_cells(k, past_len, cell_cap);
  const long future_cells = checked_cells(k, future_len, cell_cap);

  const int past_offset = -past_len + 1;
  const int future_offset = g + 1;

  std::vector<Prob> past_probs(past_cells), future_probs(future_cells);
  parallel_for(past_cells, [&](std::int64_t r) {
    past_probs[r] = cylinder_prob(
        mu, Cylinder(past_offset, word_unrank(r, past_len, k)));
  });
  parallel_for(future_cells, [&](std::int64_t r) {
    future_probs[r] = cylinder_prob(
        mu, Cylinder(future_offset, word_unrank(r, future_len, k)));
  });
  const bool exact = past_probs.front().exact;

  std::vector<Rational> exact_parts(past_cells);
  std::vector<double> float_parts(past_cells, 0.0);
  parallel_for(past_cells, [&](std::int64_t rp) {
    const auto past_word = word_unrank(rp, past_len, k);
    Constraints cs;
    cs.reserve(past_len + future_len);
    for (int i = 0; i < past_len; ++i)
      cs.emplace_back(past_offset + i, past_word[i]);
    Rational esum = 0;
    double fsum = 0;
    for (long rf = 0; rf < future_cells; ++rf) {
      const auto future_word = word_unrank(rf, future_len, k);
      Constraints joint = cs;
      for (int i = 0; i < future_len; ++i)
        joint.emplace_back(future_offset + i, future_word[i]);
      const Prob jp = constraint_prob(mu, joint);
      if (exact)
        esum += rat_abs(jp.value_exact - past_probs[rp].value_exact *
                                             future_probs[rf].value_exact);
      else
        fsum += std::abs(jp.value -
                         past_probs[rp].value * future_probs[rf].value);
    }
    exact_parts[rp] = std::move(esum);
    float_parts[rp] = fsum;
  });

  IndependenceGapReport rep;
  rep.past_len = past_len;
  rep.future_len = future_len;
  rep.gap = g;
  rep.cells = cells;
  rep.exact = exact;
  if (exact) {
    Rational total = 0;
    for (const auto& part : exact_parts) total += part;
    rep.tv_exact = total / 2;
    rep.tv = to_double(rep.tv_exact);
  } else {
    double total = 0;
    for (double part : float_parts) total += part;
    rep.tv = total / 2;
  }
  return rep;
}

ErgodicAverageReport ergodic_average(const ProcessMeasure& mu,
                                     const Cylinder& f, long q, int r, int k,
                                     int n_paths, std::uint64_t seed) {
  if (r < 0 || k < 0) throw std::invalid_argument("negative shift bounds");
  if (q <= r + k)
    throw std::invalid_argument("averaging horizon must exceed R + k");
  if (n_paths < 1) throw std::invalid_argument("need at least one path");

  const long first_shift = r + k + 1;
  const Window needed(f.offset + static_cast<int>(first_shift),
                      f.offset + static_cast<int>(q) + f.length() - 1);
  const auto paths = sample_path(mu, needed, seed, n_paths);

  ErgodicAverageReport rep;
  rep.f = f;
  rep.q = q;
  rep.r = r;
  rep.k = k;
  rep.n_paths = n_paths;
  rep.seed = seed;
  rep.target = cylinder_prob(mu, f).value;
  rep.per_path.resize(n_paths);

  parallel_for(n_paths, [&](std::int64_t j) {
    const auto& path = paths[j];
    long hits = 0;
    for (long p = first_shift; p <= q; ++p) {
      const long start = f.offset + p - needed.t_min;
      bool match = true;
      for (int i = 0; i < f.length(); ++i)
        if (path[start + i] != f.word[i]) {
          match = false;
          break;
        }
      if (match) ++hits;
    }
    rep.per_path[j] = static_cast<double>(hits) / static_cast<double>(q);
  });

  double sum = 0, dev = 0;
  for (double v : rep.per_path) {
    sum += v;
    dev += std::abs(v - rep.target);
  }
  rep.estimate = sum / n_paths;
  rep.deviation = dev / n_paths;
  return rep;
}

ErgodicAverageReport weighted_ergodic_average(const ProcessMeasure& mu,
                                              const Cylinder& f, long q, int r,
                                              int k, int n_paths,
                                              std::uint64_t seed) {
  if (r < 0 || k < 0) throw std::invalid_argument("negative shift bounds");
  if (q <= r + k)
    throw std::invalid_argument("averaging horizon must exceed R + k");
  if (n_paths < 1) throw std::invalid_argument("need at least one path");
  if (r + k < f.length())
    throw std::invalid_argument(
        "ratio weights need R + k at least the block length, so the swapped "
        "blocks stay disjoint");
  if (std::holds_alternative<DeterminantalMeasure>(mu))
    throw std::invalid_argument(
        "ratio weights need exact cylinder probabilities; the determinantal "
        "family has none");

  const long first_shift = r + k + 1;
  const Window needed(f.offset,
                      f.offset + static_cast<int>(q) + f.length() - 1);
  const auto paths = sample_path(mu, needed, seed, n_paths);

  ErgodicAverageReport rep;
  rep.f = f;
  rep.q = q;
  rep.r = r;
  rep.k = k;
  rep.n_paths = n_paths;
  rep.seed = seed;
  rep.ratio_weighted = true;
  rep.target = cylinder_prob(mu, f).value;
  rep.per_path.resize(n_paths);

  parallel_for(n_paths, [&](std::int64_t j) {
    const auto& path = paths[j];
    const Prob pc = cylinder_prob(mu, Cylinder(needed.t_min, path));
    if (!pc.exact || pc.value_exact == 0)
      throw std::logic_error("sampled path received zero probability");
    Rational xi = 0;
    for (long p = first_shift; p <= q; ++p) {
      const long start = f.offset + p - needed.t_min;
      bool match = true;
      for (int i = 0; i < f.length(); ++i)
        if (path[start + i] != f.word[i]) {
          match = false;
          break;
        }
      if (!match) continue;
      std::vector<int> swapped = path;
      for (int i = 0; i < f.length(); ++i)
        std::swap(swapped[i], swapped[start + i]);
      const Prob pd =
          cylinder_prob(mu, Cylinder(needed.t_min, std::move(swapped)));
      xi += pd.value_exact / pc.value_exact;
    }
    rep.per_path[j] = to_double(Rational(xi / q));
  });

  double sum = 0, dev = 0;
  for (double v : rep.per_path) {
    sum += v;
    dev += std::abs(v - rep.target);
  }
  rep.estimate = sum / n_paths;
  rep.deviation = dev / n_paths;
  return rep;
}

}  // namespace exchangelab
