#include "exchangelab/json_io.hpp"

#include <fstream>

namespace exchangelab {

namespace {

std::string str_of(const Json& j) { return j.get<std::string>(); }

Rational rational_field(const Json& j, const std::string& where) {
  if (j.is_string()) {
    try {
      return parse_rational(j.get<std::string>());
    } catch (const std::exception& e) {
      throw std::invalid_argument(where + ": " + e.what());
    }
  }
  if (j.is_number()) return rational_from_double(j.get<double>());
  throw std::invalid_argument(where + ": expected a number or rational string");
}

std::vector<Rational> rational_vector(const Json& j, const std::string& where) {
  if (!j.is_array())
    throw std::invalid_argument(where + ": expected an array");
  std::vector<Rational> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(rational_field(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

const Json& required(const Json& j, const std::string& key) {
  auto it = j.find(key);
  if (it == j.end())
    throw std::invalid_argument("missing field \"" + key + "\"");
  return *it;
}

Json rational_out(const Rational& q) { return to_string(q); }

Json rational_vector_out(const std::vector<Rational>& v) {
  Json arr = Json::array();
  for (const auto& q : v) arr.push_back(rational_out(q));
  return arr;
}

}  // namespace

ProcessMeasure measure_from_json(const Json& j) {
  if (!j.is_object())
    throw std::invalid_argument("measure spec must be a JSON object");
  const std::string type = required(j, "type").get<std::string>();
  if (type == "bernoulli")
    return BernoulliMeasure(rational_vector(required(j, "pi"), "pi"));
  if (type == "mixture") {
    const Json& comps = required(j, "components");
    if (!comps.is_array() || comps.empty())
      throw std::invalid_argument("components: expected a nonempty array");
    std::vector<MixtureComponent> out;
    for (std::size_t i = 0; i < comps.size(); ++i) {
      const std::string where = "components[" + std::to_string(i) + "]";
      out.push_back(
          {rational_field(required(comps[i], "w"), where + ".w"),
           rational_vector(required(comps[i], "pi"), where + ".pi")});
    }
    return MixtureMeasure(std::move(out));
  }
  if (type == "markov") {
    const Json& pi_rows = required(j, "Pi");
    if (!pi_rows.is_array())
      throw std::invalid_argument("Pi: expected an array of rows");
    std::vector<std::vector<Rational>> Pi;
    for (std::size_t i = 0; i < pi_rows.size(); ++i)
      Pi.push_back(
          rational_vector(pi_rows[i], "Pi[" + std::to_string(i) + "]"));
    std::optional<std::vector<Rational>> p;
    if (j.contains("p")) p = rational_vector(j["p"], "p");
    return MarkovMeasure(std::move(Pi), std::move(p));
  }
  if (type == "dpp-sine") {
    const Json& a = required(j, "a");
    if (!a.is_number()) throw std::invalid_argument("a: expected a number");
    return DeterminantalMeasure(SineKernel(a.get<double>()));
  }
  if (type == "dpp-toeplitz") {
    const Json& c = required(j, "c");
    if (!c.is_array()) throw std::invalid_argument("c: expected an array");
    std::vector<double> lags;
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (!c[i].is_number())
        throw std::invalid_argument("c[" + std::to_string(i) +
                                    "]: expected a number");
      lags.push_back(c[i].get<double>());
    }
    return DeterminantalMeasure(ExplicitToeplitz(std::move(lags)));
  }
  throw std::invalid_argument("unknown measure type \"" + type + "\"");
}

Json measure_to_json(const ProcessMeasure& mu) {
  Json j;
  if (const auto* b = std::get_if<BernoulliMeasure>(&mu)) {
    j["type"] = "bernoulli";
    j["pi"] = rational_vector_out(b->pi);
  } else if (const auto* mix = std::get_if<MixtureMeasure>(&mu)) {
    j["type"] = "mixture";
    Json comps = Json::array();
    for (const auto& c : mix->components)
      comps.push_back(
          {{"w", rational_out(c.w)}, {"pi", rational_vector_out(c.pi)}});
    j["components"] = std::move(comps);
  } else if (const auto* mk = std::get_if<MarkovMeasure>(&mu)) {
    j["type"] = "markov";
    Json rows = Json::array();
    for (const auto& row : mk->Pi) rows.push_back(rational_vector_out(row));
    j["Pi"] = std::move(rows);
    j["p"] = rational_vector_out(mk->p);
  } else {
    const auto& dm = std::get<DeterminantalMeasure>(mu);
    if (const auto* sine = std::get_if<SineKernel>(&dm.kernel)) {
      j["type"] = "dpp-sine";
      j["a"] = sine->a;
    } else {
      j["type"] = "dpp-toeplitz";
      j["c"] = std::get<ExplicitToeplitz>(dm.kernel).c;
    }
  }
  return j;
}

ProcessMeasure load_measure_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open spec file " + path);
  Json j;
  try {
    in >> j;
  } catch (const Json::parse_error& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
  return measure_from_json(j);
}

Json prob_to_json(const Prob& p) {
  Json j;
  j["value"] = p.value;
  j["exact"] = p.exact;
  if (p.exact) j["rational"] = rational_out(p.value_exact);
  j["structural_zero"] = p.structural_zero;
  return j;
}

Prob prob_from_json(const Json& j) {
  Prob p;
  p.value = required(j, "value").get<double>();
  p.exact = required(j, "exact").get<bool>();
  if (p.exact) p.value_exact = parse_rational(str_of(required(j, "rational")));
  p.structural_zero = required(j, "structural_zero").get<bool>();
  return p;
}

Json constraints_to_json(const Constraints& cs) {
  Json arr = Json::array();
  for (const auto& [t, s] : cs) arr.push_back(Json::array({t, s}));
  return arr;
}

Constraints constraints_from_json(const Json& j) {
  Constraints cs;
  for (const auto& pair : j)
    cs.emplace_back(pair.at(0).get<int>(), pair.at(1).get<int>());
  return cs;
}

Json validation_to_json(const ValidationReport& rep) {
  Json checks = Json::array();
  for (const auto& c : rep.checks)
    checks.push_back(
        {{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  return {{"checks", std::move(checks)}, {"all_passed", rep.all_passed()}};
}

ValidationReport validation_from_json(const Json& j) {
  ValidationReport rep;
  for (const auto& c : required(j, "checks"))
    rep.checks.push_back({c.at("name").get<std::string>(),
                          c.at("passed").get<bool>(),
                          c.at("detail").get<std::string>()});
  return rep;
}

Json exchange_report_to_json(const ExchangeReport& rep) {
  Json j;
  j["window_len"] = rep.window_len;
  j["max_deviation"] = rep.max_deviation;
  j["exact"] = rep.exact;
  if (rep.exact) j["max_deviation_rational"] = rational_out(rep.max_deviation_exact);
  j["worst_cylinder"] = to_string(rep.worst_cylinder);
  j["worst_perm"] = to_string(rep.worst_perm);
  j["exchangeable"] = rep.exchangeable;
  j["tol"] = rep.tol;
  j["exhaustive"] = rep.exhaustive;
  j["perms_checked"] = rep.perms_checked;
  return j;
}

ExchangeReport exchange_report_from_json(const Json& j) {
  ExchangeReport rep;
  rep.window_len = required(j, "window_len").get<int>();
  rep.max_deviation = required(j, "max_deviation").get<double>();
  rep.exact = required(j, "exact").get<bool>();
  if (rep.exact)
    rep.max_deviation_exact = parse_rational(str_of(j.at("max_deviation_rational")));
  rep.worst_cylinder = parse_cylinder(str_of(required(j, "worst_cylinder")));
  rep.worst_perm = parse_permutation(str_of(required(j, "worst_perm")));
  rep.exchangeable = required(j, "exchangeable").get<bool>();
  rep.tol = required(j, "tol").get<double>();
  rep.exhaustive = required(j, "exhaustive").get<bool>();
  rep.perms_checked = required(j, "perms_checked").get<std::int64_t>();
  return rep;
}

namespace {

std::string flag_name(RnFlag flag) {
  switch (flag) {
    case RnFlag::Finite: return "finite";
    case RnFlag::ZeroZero: return "zero/zero";
    default: return "violation";
  }
}

RnFlag flag_of(const std::string& name) {
  if (name == "finite") return RnFlag::Finite;
  if (name == "zero/zero") return RnFlag::ZeroZero;
  if (name == "violation") return RnFlag::Violation;
  throw std::invalid_argument("unknown ratio flag \"" + name + "\"");
}

}  // namespace

Json rn_table_to_json(const RnRatioTable& table) {
  Json rows = Json::array();
  for (const auto& r : table.rows) {
    Json row;
    row["cylinder"] = to_string(r.c);
    row["image_prob"] = prob_to_json(r.image_prob);
    row["base_prob"] = prob_to_json(r.base_prob);
    row["flag"] = flag_name(r.flag);
    if (r.flag == RnFlag::Finite) {
      row["ratio"] = r.ratio;
      if (r.exact_ratio) row["ratio_rational"] = rational_out(r.ratio_exact);
    }
    rows.push_back(std::move(row));
  }
  return {{"sigma", to_string(table.sigma)},
          {"window", Json::array({table.window.t_min, table.window.t_max})},
          {"rows", std::move(rows)},
          {"violation", table.has_violation()}};
}

RnRatioTable rn_table_from_json(const Json& j) {
  RnRatioTable table;
  table.sigma = parse_permutation(str_of(required(j, "sigma")));
  const Json& w = required(j, "window");
  table.window = Window(w.at(0).get<int>(), w.at(1).get<int>());
  for (const auto& row : required(j, "rows")) {
    RnRow r;
    r.c = parse_cylinder(str_of(row.at("cylinder")));
    r.image_prob = prob_from_json(row.at("image_prob"));
    r.base_prob = prob_from_json(row.at("base_prob"));
    r.flag = flag_of(str_of(row.at("flag")));
    if (r.flag == RnFlag::Finite) {
      r.ratio = row.at("ratio").get<double>();
      if (row.contains("ratio_rational")) {
        r.exact_ratio = true;
        r.ratio_exact = parse_rational(str_of(row.at("ratio_rational")));
      }
    }
    table.rows.push_back(std::move(r));
  }
  return table;
}

Json witness_to_json(const QuasiWitness& w) {
  return {{"C", to_string(w.c)},
          {"D", to_string(w.d)},
          {"sigma", to_string(w.sigma)},
          {"mu_C", prob_to_json(w.mu_c)},
          {"mu_D", prob_to_json(w.mu_d)}};
}

QuasiWitness witness_from_json(const Json& j) {
  QuasiWitness w;
  w.c = parse_cylinder(str_of(required(j, "C")));
  w.d = parse_cylinder(str_of(required(j, "D")));
  w.sigma = parse_permutation(str_of(required(j, "sigma")));
  w.mu_c = prob_from_json(required(j, "mu_C"));
  w.mu_d = prob_from_json(required(j, "mu_D"));
  return w;
}

Json symmetrize_to_json(const SymmetrizeTable& table) {
  Json rows = Json::array();
  for (const auto& r : table.rows)
    rows.push_back(
        {{"cylinder", to_string(r.c)}, {"nu", prob_to_json(r.nu)}});
  return {{"N", table.N},
          {"window", Json::array({table.window.t_min, table.window.t_max})},
          {"alphabet_size", table.alphabet_size},
          {"exhaustive", table.exhaustive},
          {"perms_used", table.perms_used},
          {"rows", std::move(rows)}};
}

SymmetrizeTable symmetrize_from_json(const Json& j) {
  SymmetrizeTable table;
  table.N = required(j, "N").get<int>();
  const Json& w = required(j, "window");
  table.window = Window(w.at(0).get<int>(), w.at(1).get<int>());
  table.alphabet_size = required(j, "alphabet_size").get<int>();
  table.exhaustive = required(j, "exhaustive").get<bool>();
  table.perms_used = required(j, "perms_used").get<std::int64_t>();
  for (const auto& row : required(j, "rows"))
    table.rows.push_back(
        {parse_cylinder(str_of(row.at("cylinder"))), prob_from_json(row.at("nu"))});
  return table;
}

Json independence_to_json(const IndependenceGapReport& rep) {
  Json j;
  j["past_len"] = rep.past_len;
  j["future_len"] = rep.future_len;
  j["gap"] = rep.gap;
  j["cells"] = rep.cells;
  j["tv"] = rep.tv;
  j["exact"] = rep.exact;
  if (rep.exact) j["tv_rational"] = rational_out(rep.tv_exact);
  return j;
}

IndependenceGapReport independence_from_json(const Json& j) {
  IndependenceGapReport rep;
  rep.past_len = required(j, "past_len").get<int>();
  rep.future_len = required(j, "future_len").get<int>();
  rep.gap = required(j, "gap").get<int>();
  rep.cells = required(j, "cells").get<long>();
  rep.tv = required(j, "tv").get<double>();
  rep.exact = required(j, "exact").get<bool>();
  if (rep.exact) rep.tv_exact = parse_rational(str_of(j.at("tv_rational")));
  return rep;
}

Json ergodic_to_json(const ErgodicAverageReport& rep) {
  return {{"F", to_string(rep.f)},
          {"Q", rep.q},
          {"R", rep.r},
          {"k", rep.k},
          {"n_paths", rep.n_paths},
          {"seed", rep.seed},
          {"ratio_weighted", rep.ratio_weighted},
          {"estimate", rep.estimate},
          {"target", rep.target},
          {"deviation", rep.deviation},
          {"per_path", rep.per_path}};
}

ErgodicAverageReport ergodic_from_json(const Json& j) {
  ErgodicAverageReport rep;
  rep.f = parse_cylinder(str_of(required(j, "F")));
  rep.q = required(j, "Q").get<long>();
  rep.r = required(j, "R").get<int>();
  rep.k = required(j, "k").get<int>();
  rep.n_paths = required(j, "n_paths").get<int>();
  rep.seed = required(j, "seed").get<std::uint64_t>();
  rep.ratio_weighted = j.value("ratio_weighted", false);
  rep.estimate = required(j, "estimate").get<double>();
  rep.target = required(j, "target").get<double>();
  rep.deviation = required(j, "deviation").get<double>();
  rep.per_path = required(j, "per_path").get<std::vector<double>>();
  return rep;
}

Json moments_to_json(const MomentSequence& m) {
  Json j;
  j["m"] = m.m;
  j["exact"] = m.exact;
  if (m.exact) j["m_rational"] = rational_vector_out(m.m_exact);
  return j;
}

MomentSequence moments_from_json(const Json& j) {
  MomentSequence m;
  m.m = required(j, "m").get<std::vector<double>>();
  m.exact = required(j, "exact").get<bool>();
  if (m.exact)
    for (const auto& q : j.at("m_rational"))
      m.m_exact.push_back(parse_rational(str_of(q)));
  return m;
}

Json hankel_to_json(const HankelReport& rep) {
  return {{"n0", rep.n0},
          {"n1", rep.n1},
          {"min_eig_h0", rep.min_eig_h0},
          {"min_eig_h1", rep.min_eig_h1},
          {"det_h0", rep.det_h0},
          {"monotone", rep.monotone},
          {"consistent", rep.consistent}};
}

HankelReport hankel_from_json(const Json& j) {
  HankelReport rep;
  rep.n0 = required(j, "n0").get<int>();
  rep.n1 = required(j, "n1").get<int>();
  rep.min_eig_h0 = required(j, "min_eig_h0").get<double>();
  rep.min_eig_h1 = required(j, "min_eig_h1").get<double>();
  rep.det_h0 = required(j, "det_h0").get<double>();
  rep.monotone = required(j, "monotone").get<bool>();
  rep.consistent = required(j, "consistent").get<bool>();
  return rep;
}

Json atoms_to_json(const AtomicMixingMeasure& m) {
  Json atoms = Json::array();
  for (const auto& a : m.atoms)
    atoms.push_back({{"p", a.p}, {"w", a.w}});
  return {{"atoms", std::move(atoms)}, {"residual", m.residual}};
}

AtomicMixingMeasure atoms_from_json(const Json& j) {
  AtomicMixingMeasure m;
  for (const auto& a : required(j, "atoms"))
    m.atoms.push_back({a.at("p").get<double>(), a.at("w").get<double>()});
  m.residual = required(j, "residual").get<double>();
  return m;
}

}  // namespace exchangelab
