#include "exchangelab/definetti.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <set>

namespace exchangelab {

MomentSequence moments(const ProcessMeasure& mu, int r) {
  if (alphabet_of(mu).size != 2)
    throw std::invalid_argument("moments are defined for binary alphabets");
  if (r < 1) throw std::invalid_argument("need at least one moment");
  MomentSequence seq;
  seq.m.resize(r);
  for (int k = 1; k <= r; ++k) {
    const Prob p = cylinder_prob(mu, Cylinder(0, std::vector<int>(k, 1)));
    seq.m[k - 1] = p.value;
    if (k == 1) seq.exact = p.exact;
    if (p.exact) seq.m_exact.push_back(p.value_exact);
  }
  if (!seq.exact) seq.m_exact.clear();
  return seq;
}

namespace {

// m with m_0 = 1 prepended.
std::vector<double> full_moments(const MomentSequence& m) {
  std::vector<double> full;
  full.reserve(m.m.size() + 1);
  full.push_back(1.0);
  full.insert(full.end(), m.m.begin(), m.m.end());
  return full;
}

Eigen::MatrixXd hankel(const std::vector<double>& full, int size, int shift) {
  Eigen::MatrixXd h(size, size);
  for (int i = 0; i < size; ++i)
    for (int j = 0; j < size; ++j) h(i, j) = full[i + j + shift];
  return h;
}

}  // namespace

HankelReport hankel_psd_check(const MomentSequence& m) {
  const int r = static_cast<int>(m.m.size());
  if (r < 2)
    throw std::invalid_argument("the certificate needs at least two moments");
  const auto full = full_moments(m);

  HankelReport rep;
  rep.n0 = r / 2 + 1;
  rep.n1 = r / 2;

  const Eigen::MatrixXd h0 = hankel(full, rep.n0, 0);
  Eigen::MatrixXd h1(rep.n1, rep.n1);
  for (int i = 0; i < rep.n1; ++i)
    for (int j = 0; j < rep.n1; ++j)
      h1(i, j) = full[i + j + 1] - full[i + j + 2];

  rep.min_eig_h0 =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(h0).eigenvalues()
          .minCoeff();
  rep.min_eig_h1 =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(h1).eigenvalues()
          .minCoeff();
  rep.det_h0 = h0.partialPivLu().determinant();

  rep.monotone = true;
  for (std::size_t i = 0; i + 1 < full.size(); ++i)
    if (full[i + 1] > full[i] + 1e-12) rep.monotone = false;
  if (full.back() < -1e-12) rep.monotone = false;

  rep.consistent = rep.min_eig_h0 >= -1e-9 && rep.min_eig_h1 >= -1e-9;
  return rep;
}

AtomicMixingMeasure recover_atoms(const MomentSequence& m, int r_max,
                                  double tol) {
  const int r = static_cast<int>(m.m.size());
  if (r < 1) throw std::invalid_argument("no moments to invert");
  if (r_max < 1) throw std::invalid_argument("atom budget must be positive");
  if (tol <= 0) throw std::invalid_argument("tolerance must be positive");
  const auto full = full_moments(m);

  const int n0 = r / 2 + 1;
  const Eigen::MatrixXd h = hankel(full, n0, 0);
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(h);
  const double sigma_max = svd.singularValues()(0);
  int rank = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > 1e-8 * sigma_max) ++rank;

  // The pencil needs moments up to 2s-1, so s is also capped by (r+1)/2.
  int s = std::min({rank, r_max, (r + 1) / 2});
  if (s < 1) s = 1;

  // Back off while the leading Hankel block is not numerically positive
  // definite; the pencil solve factorizes it.
  Eigen::VectorXd locations;
  while (s >= 1) {
    const Eigen::MatrixXd h_low = hankel(full, s, 0);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> check(h_low);
    if (check.eigenvalues().minCoeff() > 1e-13 * std::max(1.0, sigma_max)) {
      const Eigen::MatrixXd h_shift = hankel(full, s, 1);
      Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> pencil(
          h_shift, h_low);
      locations = pencil.eigenvalues();
      break;
    }
    --s;
  }
  if (s < 1)
    throw AtomRecoveryError("moment matrix is numerically degenerate", 1.0);

  std::vector<double> ps(locations.data(), locations.data() + s);
  for (double& p : ps) p = std::clamp(p, 0.0, 1.0);
  std::sort(ps.begin(), ps.end());

  // Weights: least squares against all r+1 moment equations.
  Eigen::MatrixXd vander(r + 1, s);
  for (int row = 0; row <= r; ++row)
    for (int col = 0; col < s; ++col) vander(row, col) = std::pow(ps[col], row);
  Eigen::VectorXd rhs(r + 1);
  for (int row = 0; row <= r; ++row) rhs(row) = full[row];
  Eigen::VectorXd w =
      vander.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(rhs);

  AtomicMixingMeasure out;
  for (int i = 0; i < s; ++i) {
    if (w(i) < -1e-8)
      throw AtomRecoveryError("recovered weights are not a positive mixture",
                              (vander * w - rhs).cwiseAbs().maxCoeff());
    if (w(i) > 1e-12) out.atoms.push_back({ps[i], w(i)});
  }
  if (out.atoms.empty())
    throw AtomRecoveryError("all recovered weights vanish", 1.0);

  double residual = 0.0;
  for (int row = 0; row <= r; ++row) {
    double fit = 0.0;
    for (const auto& atom : out.atoms) fit += atom.w * std::pow(atom.p, row);
    residual = std::max(residual, std::abs(fit - full[row]));
  }
  out.residual = residual;
  if (residual > tol)
    throw AtomRecoveryError(
        "moments are not representable with the given atom budget", residual);
  return out;
}

ProcessMeasure lump_to_binary(const ProcessMeasure& mu,
                              const std::vector<int>& ones_symbols) {
  const Alphabet ab = alphabet_of(mu);
  std::set<int> ones(ones_symbols.begin(), ones_symbols.end());
  if (ones.empty() || static_cast<int>(ones.size()) >= ab.size)
    throw std::invalid_argument(
        "indicator set must be a nonempty proper subset of the alphabet");
  for (int s : ones)
    if (!ab.contains(s))
      throw std::invalid_argument("indicator symbol outside the alphabet");

  auto lump_pi = [&](const std::vector<Rational>& pi) {
    Rational q = 0;
    for (int s : ones) q += pi[s];
    return std::vector<Rational>{Rational(1) - q, q};
  };

  if (const auto* b = std::get_if<BernoulliMeasure>(&mu))
    return BernoulliMeasure(lump_pi(b->pi));
  if (const auto* mix = std::get_if<MixtureMeasure>(&mu)) {
    std::vector<MixtureComponent> comps;
    comps.reserve(mix->components.size());
    for (const auto& c : mix->components)
      comps.push_back({c.w, lump_pi(c.pi)});
    return MixtureMeasure(std::move(comps));
  }
  throw std::invalid_argument(
      "lumping preserves the law only for product-type families");
}

}  // namespace exchangelab
