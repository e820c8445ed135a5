#include "exchangelab/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <ostream>
#include <sstream>

#include "exchangelab/bernoullicity.hpp"
#include "exchangelab/definetti.hpp"
#include "exchangelab/exchange.hpp"
#include "exchangelab/json_io.hpp"
#include "exchangelab/measures.hpp"

namespace exchangelab {

namespace {

constexpr int kOk = 0;
constexpr int kError = 1;
constexpr int kFinding = 2;
constexpr std::uint64_t kDefaultSeed = 12345;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string prob_str(const Prob& p) {
  std::string s = fmt(p.value);
  if (p.exact) s += " (= " + to_string(p.value_exact) + " exactly)";
  if (p.structural_zero) s += " [structural zero]";
  return s;
}

std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> items;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      items.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  items.push_back(cur);
  return items;
}

int parse_int_str(const std::string& s) {
  std::size_t pos = 0;
  int v = std::stoi(s, &pos);
  if (pos != s.size())
    throw std::invalid_argument("expected an integer, got '" + s + "'");
  return v;
}

Window parse_window(const std::string& text) {
  auto dots = text.find("..");
  if (dots == std::string::npos)
    throw std::invalid_argument("window must read 'a..b': " + text);
  return Window(parse_int_str(text.substr(0, dots)),
                parse_int_str(text.substr(dots + 2)));
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (const auto& item : split_on(text, ','))
    if (!item.empty()) out.push_back(parse_int_str(item));
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split_on(text, ',')) {
    if (item.empty()) continue;
    std::size_t pos = 0;
    out.push_back(std::stod(item, &pos));
    if (pos != item.size())
      throw std::invalid_argument("expected a number, got '" + item + "'");
  }
  return out;
}

std::string word_str(const std::vector<int>& word) {
  bool digits = true;
  for (int s : word)
    if (s > 9) digits = false;
  std::string out;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (!digits && i) out += ',';
    out += std::to_string(word[i]);
  }
  return out;
}

// Word in double-bracket notation, e.g. [[0,0,1,1]]; start is carried aside.
std::string bracket_str(const Cylinder& c) {
  std::string out = "[[";
  for (std::size_t i = 0; i < c.word.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(c.word[i]);
  }
  return out + "]]";
}

void emit_json(std::ostream& out, const Json& j) { out << j.dump(2) << "\n"; }

struct CommonOpts {
  std::string spec_path;
  std::string format = "human";
  bool no_validate = false;
  int validate_len = 3;
  int det_cap = 64;
};

void add_common(CLI::App* sub, CommonOpts& c, bool needs_spec = true) {
  auto* spec =
      sub->add_option("--spec", c.spec_path, "measure spec file (JSON)");
  if (needs_spec) spec->required();
  sub->add_option("--format", c.format, "output format")
      ->check(CLI::IsMember({"human", "json", "tsv"}))
      ->capture_default_str();
  sub->add_flag("--no-validate", c.no_validate,
                "skip the pre-run measure validation");
  sub->add_option("--validate-len", c.validate_len,
                  "window length for the pre-run validation")
      ->capture_default_str();
  sub->add_option("--det-cap", c.det_cap,
                  "largest kernel determinant evaluated")
      ->capture_default_str();
}

ProcessMeasure load_measure(const CommonOpts& c, bool prevalidate) {
  ProcessMeasure mu = load_measure_file(c.spec_path);
  if (auto* dm = std::get_if<DeterminantalMeasure>(&mu))
    dm->det_cap = c.det_cap;
  if (prevalidate && !c.no_validate) {
    const ValidationReport rep = validate_measure(mu, c.validate_len);
    if (!rep.all_passed()) {
      std::string msg = "measure failed validation:";
      for (const auto& chk : rep.checks)
        if (!chk.passed) msg += " [" + chk.name + ": " + chk.detail + "]";
      msg += " (use --no-validate to override)";
      throw std::invalid_argument(msg);
    }
  }
  return mu;
}

double default_tol(const ProcessMeasure& mu) {
  return std::holds_alternative<DeterminantalMeasure>(mu) ? 1e-9 : 1e-12;
}

// ---- subcommand handlers ----

int run_validate(const CommonOpts& c, int len, std::ostream& out) {
  ProcessMeasure mu = load_measure(c, false);
  const ValidationReport rep = validate_measure(mu, len);
  if (c.format == "json") {
    emit_json(out, validation_to_json(rep));
  } else if (c.format == "tsv") {
    out << "check\tpassed\tdetail\n";
    for (const auto& chk : rep.checks)
      out << chk.name << "\t" << (chk.passed ? "yes" : "no") << "\t"
          << chk.detail << "\n";
  } else {
    for (const auto& chk : rep.checks)
      out << "check " << chk.name << ": " << (chk.passed ? "PASS" : "FAIL")
          << " (" << chk.detail << ")\n";
    out << (rep.all_passed() ? "all checks passed\n"
                             : "validation failed\n");
  }
  return rep.all_passed() ? kOk : kFinding;
}

int run_cyl_prob(const CommonOpts& c, const std::string& cyl_text,
                 std::ostream& out) {
  ProcessMeasure mu = load_measure(c, true);
  const Cylinder cyl = parse_cylinder(cyl_text);
  const Prob p = cylinder_prob(mu, cyl);
  if (c.format == "json") {
    emit_json(out, prob_to_json(p));
  } else if (c.format == "tsv") {
    out << "value\texact\trational\tstructural_zero\n";
    out << fmt(p.value) << "\t" << (p.exact ? "yes" : "no") << "\t"
        << (p.exact ? to_string(p.value_exact) : "") << "\t"
        << (p.structural_zero ? "yes" : "no") << "\n";
  } else {
    out << "P(" << to_string(cyl) << ") = " << prob_str(p) << "\n";
  }
  return kOk;
}

int run_perm_apply(const std::string& format, const std::string& perm_text,
                   const std::string& cyl_text, std::ostream& out) {
  const FinitePermutation sigma = parse_permutation(perm_text);
  const Cylinder cyl = parse_cylinder(cyl_text);
  const Constraints cs = perm_apply_to_cylinder(sigma, cyl);
  std::optional<Cylinder> image;
  try {
    image = as_cylinder(cs);
  } catch (const ScatteredCylinderError&) {
  }
  if (format == "json") {
    Json j;
    j["constraints"] = constraints_to_json(cs);
    if (image) j["cylinder"] = to_string(*image);
    emit_json(out, j);
  } else if (format == "tsv") {
    out << "coordinate\tsymbol\n";
    for (const auto& [t, s] : cs) out << t << "\t" << s << "\n";
  } else {
    out << "preimage constraints:";
    for (const auto& [t, s] : cs) out << " (" << t << "," << s << ")";
    out << "\n";
    if (image)
      out << "cylinder form: " << to_string(*image) << "\n";
    else
      out << "support is scattered; no cylinder form\n";
  }
  return kOk;
}

int run_check_exch(const CommonOpts& c, int n, double tol,
                   const ExchangeOptions& opt, std::ostream& out) {
  ProcessMeasure mu = load_measure(c, true);
  const double use_tol = tol >= 0 ? tol : default_tol(mu);
  const ExchangeReport rep = check_exchangeable(mu, n, use_tol, opt);
  if (c.format == "json") {
    emit_json(out, exchange_report_to_json(rep));
  } else if (c.format == "tsv") {
    out << "window_len\tmax_deviation\trational\tworst_cylinder\tworst_perm\t"
           "exchangeable\texhaustive\tperms_checked\n";
    out << rep.window_len << "\t" << fmt(rep.max_deviation) << "\t"
        << (rep.exact ? to_string(rep.max_deviation_exact) : "") << "\t"
        << to_string(rep.worst_cylinder) << "\t" << to_string(rep.worst_perm)
        << "\t" << (rep.exchangeable ? "yes" : "no") << "\t"
        << (rep.exhaustive ? "yes" : "no") << "\t" << rep.perms_checked
        << "\n";
  } else {
    out << "window length " << rep.window_len << ", "
        << (rep.exhaustive ? "exhaustive" : "sampled") << " scan over "
        << rep.perms_checked << " permutations\n";
    out << "max deviation = " << fmt(rep.max_deviation);
    if (rep.exact) out << " (= " << to_string(rep.max_deviation_exact)
                       << " exactly)";
    out << "\n";
    out << "worst pair: C = " << to_string(rep.worst_cylinder)
        << ", sigma = " << to_string(rep.worst_perm) << "\n";
    out << "verdict: "
        << (rep.exchangeable ? "exchangeable within tolerance "
                             : "VIOLATED at tolerance ")
        << fmt(rep.tol) << "\n";
  }
  return rep.exchangeable ? kOk : kFinding;
}

int run_rn_table(const CommonOpts& c, const std::string& perm_text,
                 const std::string& window_text, long cell_cap,
                 std::ostream& out) {
  ProcessMeasure mu = load_measure(c, true);
  const FinitePermutation sigma = parse_permutation(perm_text);
  const Window w = parse_window(window_text);
  const RnRatioTable table = rn_ratio_table(mu, sigma, w, cell_cap);
  if (c.format == "json") {
    emit_json(out, rn_table_to_json(table));
  } else {
    const char* flag_names[] = {"finite", "zero/zero", "VIOLATION"};
    if (c.format == "tsv")
      out << "cylinder\tmu_image\tmu_base\tflag\tratio\tratio_rational\n";
    else
      out << "density table for sigma = " << to_string(table.sigma)
          << " on window [" << w.t_min << ", " << w.t_max << "]\n";
    for (const auto& row : table.rows) {
      const int f = static_cast<int>(row.flag);
      if (c.format == "tsv") {
        out << to_string(row.c) << "\t" << fmt(row.image_prob.value) << "\t"
            << fmt(row.base_prob.value) << "\t" << flag_names[f] << "\t"
            << (row.flag == RnFlag::Finite ? fmt(row.ratio) : "") << "\t"
            << (row.exact_ratio ? to_string(row.ratio_exact) : "") << "\n";
      } else {
        out << to_string(row.c) << ": image " << prob_str(row.image_prob)
            << ", base " << prob_str(row.base_prob) << ", " << flag_names[f];
        if (row.flag == RnFlag::Finite) {
          out << ", ratio " << fmt(row.ratio);
          if (row.exact_ratio)
            out << " (= " << to_string(row.ratio_exact) << " exactly)";
        }
        out << "\n";
      }
    }
    if (c.format == "human")
      out << (table.has_violation()
                  ? "equivalence VIOLATED on this window\n"
                  : "no violation on this window\n");
  }
  return table.has_violation() ? kFinding : kOk;
}

int run_witness(const CommonOpts& c, std::ostream& out) {
  ProcessMeasure mu = load_measure(c, true);
  const auto* chain = std::get_if<MarkovMeasure>(&mu);
  if (!chain)
    throw std::invalid_argument(
        "the witness construction applies to the markov family");
  const auto w = quasi_witness_markov(*chain);
  if (c.format == "json") {
    Json j;
    j["found"] = w.has_value();
    if (w) j["witness"] = witness_to_json(*w);
    emit_json(out, j);
  } else if (c.format == "tsv") {
    out << "C\tD\tsigma\tmu_C\tmu_D\n";
    if (w)
      out << to_string(w->c) << "\t" << to_string(w->d) << "\t"
          << to_string(w->sigma) << "\t" << fmt(w->mu_c.value) << "\t"
          << fmt(w->mu_d.value) << "\n";
  } else if (w) {
    out << "witness found: the permuted law is not equivalent\n";
    out << "C = " << bracket_str(w->c) << " at " << w->c.offset
        << " with mu(C) = " << prob_str(w->mu_c) << "\n";
    out << "D = " << bracket_str(w->d) << " at " << w->d.offset
        << " with mu(D) = " << prob_str(w->mu_d) << "\n";
    out << "sigma = " << to_string(w->sigma)
        << " maps C to D; a null event trades places with a positive one\n";
  } else {
    out << "no zero transition: every permuted law stays equivalent\n";
  }
  return w ? kFinding : kOk;
}

int run_symmetrize(const CommonOpts& c, int N, const std::string& window_text,
                   const SymmetrizeOptions& opt, std::ostream& out) {
  ProcessMeasure mu = load_measure(c, true);
  const Window w = parse_window(window_text);
  const SymmetrizeTable table = symmetrize(mu, N, w, opt);
  if (c.format == "json") {
    emit_json(out, symmetrize_to_json(table));
  } else {
    if (c.format == "tsv") {
      out << "cylinder\tnu\tnu_rational\n";
    } else {
      out << "group average over permutations supported in [-" << N << ", "
          << N << "] (" << (table.exhaustive ? "exhaustive" : "Monte Carlo")
          << ", " << table.perms_used << " permutations)\n";
    }
    for (const auto& row : table.rows) {
      if (c.format == "tsv")
        out << to_string(row.c) << "\t" << fmt(row.nu.value) << "\t"
            << (row.nu.exact ? to_string(row.nu.value_exact) : "") << "\n";
      else
        out << to_string(row.c) << ": " << prob_str(row.nu) << "\n";
    }
  }
  return kOk;
}

int run_mixing_gap(const CommonOpts& c, int past, int future, int g,
                   const std::string& sweep, long cell_cap,
                   std::ostream& out) {
  ProcessMeasure mu = load_measure(c, true);
  int g0 = g, g1 = g;
  if (!sweep.empty()) {
    const Window range = parse_window(sweep);
    g0 = range.t_min;
    g1 = range.t_max;
  }
  std::vector<IndependenceGapReport> reports;
  for (int gap = g0; gap <= g1; ++gap)
    reports.push_back(independence_gap(mu, past, future, gap, cell_cap));
  if (c.format == "json") {
    Json arr = Json::array();
    for (const auto& rep : reports) arr.push_back(independence_to_json(rep));
    emit_json(out, reports.size() == 1 ? independence_to_json(reports[0])
                                       : arr);
  } else if (c.format == "tsv") {
    out << "g\ttv\ttv_rational\n";
    for (const auto& rep : reports)
      out << rep.gap << "\t" << fmt(rep.tv) << "\t"
          << (rep.exact ? to_string(rep.tv_exact) : "") << "\n";
  } else {
    for (const auto& rep : reports) {
      out << "past " << rep.past_len << " x future " << rep.future_len
          << " at gap " << rep.gap << " (" << rep.cells
          << " cells): tv = " << fmt(rep.tv);
      if (rep.exact) out << " (= " << to_string(rep.tv_exact) << " exactly)";
      out << "\n";
    }
  }
  return kOk;
}

int run_ergodic(const CommonOpts& c, const std::string& f_text, long q, int r,
                int k, int paths, std::uint64_t seed, bool ratio_weights,
                std::ostream& out) {
  ProcessMeasure mu = load_measure(c, true);
  const Cylinder f = parse_cylinder(f_text);
  const ErgodicAverageReport rep =
      ratio_weights ? weighted_ergodic_average(mu, f, q, r, k, paths, seed)
                    : ergodic_average(mu, f, q, r, k, paths, seed);
  if (c.format == "json") {
    emit_json(out, ergodic_to_json(rep));
  } else if (c.format == "tsv") {
    out << "Q\tR\tk\tpaths\tseed\tweighted\testimate\ttarget\tdeviation\n";
    out << rep.q << "\t" << rep.r << "\t" << rep.k << "\t" << rep.n_paths
        << "\t" << rep.seed << "\t" << (rep.ratio_weighted ? 1 : 0) << "\t"
        << fmt(rep.estimate) << "\t" << fmt(rep.target) << "\t"
        << fmt(rep.deviation) << "\n";
  } else {
    out << (rep.ratio_weighted ? "ratio-weighted occupation average of "
                               : "occupation average of ")
        << to_string(rep.f) << " over shifts " << (rep.r + rep.k + 1) << ".."
        << rep.q << ", " << rep.n_paths << " paths, seed " << rep.seed << "\n";
    out << "estimate = " << fmt(rep.estimate)
        << ", target = " << fmt(rep.target)
        << ", mean |path avg - target| = " << fmt(rep.deviation) << "\n";
  }
  return kOk;
}

int run_sample(const CommonOpts& c, const std::string& window_text, int paths,
               std::uint64_t seed, std::ostream& out) {
  ProcessMeasure mu = load_measure(c, true);
  const Window w = parse_window(window_text);
  const auto rows = sample_path(mu, w, seed, paths);
  if (c.format == "json") {
    Json j;
    j["window"] = Json::array({w.t_min, w.t_max});
    j["seed"] = seed;
    j["paths"] = rows;
    emit_json(out, j);
  } else {
    for (const auto& row : rows) out << word_str(row) << "\n";
  }
  return kOk;
}

int run_dpp_prob(const CommonOpts& c, const std::string& points_text,
                 const std::string& window_text, const std::string& subset_text,
                 std::ostream& out) {
  ProcessMeasure mu = load_measure(c, true);
  const auto* dm = std::get_if<DeterminantalMeasure>(&mu);
  if (!dm)
    throw std::invalid_argument(
        "kernel probabilities need a determinantal measure");
  std::string kind;
  double value = 0.0;
  if (!points_text.empty()) {
    kind = "inclusion";
    value = dpp_inclusion_prob(dm->kernel, parse_int_list(points_text),
                               dm->det_cap);
  } else if (!window_text.empty()) {
    kind = "configuration";
    value = dpp_window_config_prob(dm->kernel, parse_window(window_text),
                                   parse_int_list(subset_text), dm->det_cap);
  } else {
    throw std::invalid_argument("pass --points or --window/--subset");
  }
  if (c.format == "json") {
    emit_json(out, Json{{"kind", kind}, {"value", value}});
  } else if (c.format == "tsv") {
    out << "kind\tvalue\n" << kind << "\t" << fmt(value) << "\n";
  } else {
    out << kind << " probability = " << fmt(value) << "\n";
  }
  return kOk;
}

int run_moments(const CommonOpts& c, int r, std::ostream& out) {
  ProcessMeasure mu = load_measure(c, true);
  const MomentSequence seq = moments(mu, r);
  if (c.format == "json") {
    emit_json(out, moments_to_json(seq));
  } else {
    out << "k\tm_k\tm_k_rational\n";
    for (std::size_t i = 0; i < seq.m.size(); ++i)
      out << (i + 1) << "\t" << fmt(seq.m[i]) << "\t"
          << (seq.exact ? to_string(seq.m_exact[i]) : "") << "\n";
  }
  return kOk;
}

MomentSequence moment_input(const CommonOpts& c,
                            const std::string& moments_text, int r) {
  if (!moments_text.empty()) {
    MomentSequence seq;
    seq.m = parse_double_list(moments_text);
    if (seq.m.empty()) throw std::invalid_argument("empty moment list");
    return seq;
  }
  if (c.spec_path.empty())
    throw std::invalid_argument("pass --moments or --spec");
  return moments(load_measure(c, true), r);
}

int run_hankel(const CommonOpts& c, const std::string& moments_text, int r,
               std::ostream& out) {
  const MomentSequence seq = moment_input(c, moments_text, r);
  const HankelReport rep = hankel_psd_check(seq);
  if (c.format == "json") {
    emit_json(out, hankel_to_json(rep));
  } else if (c.format == "tsv") {
    out << "n0\tn1\tmin_eig_h0\tmin_eig_h1\tdet_h0\tmonotone\tconsistent\n";
    out << rep.n0 << "\t" << rep.n1 << "\t" << fmt(rep.min_eig_h0) << "\t"
        << fmt(rep.min_eig_h1) << "\t" << fmt(rep.det_h0) << "\t"
        << (rep.monotone ? "yes" : "no") << "\t"
        << (rep.consistent ? "yes" : "no") << "\n";
  } else {
    out << "Hankel blocks " << rep.n0 << "x" << rep.n0 << " and " << rep.n1
        << "x" << rep.n1 << "\n";
    out << "min eigenvalues: " << fmt(rep.min_eig_h0) << " and "
        << fmt(rep.min_eig_h1) << "; det H0 = " << fmt(rep.det_h0) << "\n";
    out << "moments monotone: " << (rep.monotone ? "yes" : "no") << "\n";
    out << (rep.consistent
                ? "consistent with a mixture of product laws\n"
                : "REJECTED: no mixture of product laws has these moments\n");
  }
  return rep.consistent ? kOk : kFinding;
}

int run_recover(const CommonOpts& c, const std::string& moments_text, int r,
                int r_max, double tol, std::ostream& out) {
  const MomentSequence seq = moment_input(c, moments_text, r);
  const AtomicMixingMeasure mix = recover_atoms(seq, r_max, tol);
  if (c.format == "json") {
    emit_json(out, atoms_to_json(mix));
  } else if (c.format == "tsv") {
    out << "p\tw\n";
    for (const auto& a : mix.atoms)
      out << fmt(a.p) << "\t" << fmt(a.w) << "\n";
  } else {
    out << "recovered " << mix.atoms.size() << " atom(s), max moment residual "
        << fmt(mix.residual) << "\n";
    for (const auto& a : mix.atoms)
      out << "  p = " << fmt(a.p) << ", weight = " << fmt(a.w) << "\n";
  }
  return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{
      "exchangelab: exact cylinder probabilities, exchangeability "
      "certificates, and mixing diagnostics for stationary symbolic "
      "processes"};
  app.require_subcommand(1);

  int exit_code = kOk;

  // validate
  {
    auto c = std::make_shared<CommonOpts>();
    auto len = std::make_shared<int>(3);
    auto* sub = app.add_subcommand(
        "validate", "normalization/consistency/spectrum checks");
    add_common(sub, *c);
    sub->add_option("--len", *len, "window length to check")
        ->capture_default_str();
    sub->callback([&exit_code, c, len, &out]() {
      exit_code = run_validate(*c, *len, out);
    });
  }

  // cyl-prob
  {
    auto c = std::make_shared<CommonOpts>();
    auto cyl = std::make_shared<std::string>();
    auto* sub =
        app.add_subcommand("cyl-prob", "probability of a cylinder event");
    add_common(sub, *c);
    sub->add_option("--cyl", *cyl, "cylinder, e.g. 0:011")->required();
    sub->callback([&exit_code, c, cyl, &out]() {
      exit_code = run_cyl_prob(*c, *cyl, out);
    });
  }

  // perm-apply
  {
    auto format = std::make_shared<std::string>("human");
    auto perm = std::make_shared<std::string>();
    auto cyl = std::make_shared<std::string>();
    auto* sub = app.add_subcommand(
        "perm-apply", "preimage of a cylinder under a permutation action");
    sub->add_option("--format", *format, "output format")
        ->check(CLI::IsMember({"human", "json", "tsv"}))
        ->capture_default_str();
    sub->add_option("--perm", *perm, "permutation in cycle notation")
        ->required();
    sub->add_option("--cyl", *cyl, "cylinder, e.g. 0:011")->required();
    sub->callback([&exit_code, format, perm, cyl, &out]() {
      exit_code = run_perm_apply(*format, *perm, *cyl, out);
    });
  }

  // check-exch
  {
    auto c = std::make_shared<CommonOpts>();
    auto n = std::make_shared<int>(3);
    auto tol = std::make_shared<double>(-1.0);
    auto opt = std::make_shared<ExchangeOptions>();
    auto* sub = app.add_subcommand(
        "check-exch", "max cylinder deviation under window permutations");
    add_common(sub, *c);
    sub->add_option("--n", *n, "window length")->required();
    sub->add_option("--tol", *tol,
                    "verdict tolerance (default 1e-12 exact, 1e-9 kernel)");
    sub->add_option("--enum-cap", opt->enum_cap,
                    "cylinder-times-permutation budget for the exhaustive scan")
        ->capture_default_str();
    sub->add_option("--sample-perms", opt->sampled_perms,
                    "permutations drawn when the scan is sampled")
        ->capture_default_str();
    sub->add_option("--seed", opt->seed, "seed for the sampled scan")
        ->capture_default_str();
    sub->callback([&exit_code, c, n, tol, opt, &out]() {
      exit_code = run_check_exch(*c, *n, *tol, *opt, out);
    });
  }

  // rn-table
  {
    auto c = std::make_shared<CommonOpts>();
    auto perm = std::make_shared<std::string>();
    auto window = std::make_shared<std::string>();
    auto cell_cap = std::make_shared<long>(1 << 20);
    auto* sub = app.add_subcommand(
        "rn-table", "cylinder density of the permuted law against the base");
    add_common(sub, *c);
    sub->add_option("--perm", *perm, "permutation in cycle notation")
        ->required();
    sub->add_option("--window", *window, "table window, e.g. 0..2")
        ->required();
    sub->add_option("--cell-cap", *cell_cap, "largest cylinder table")
        ->capture_default_str();
    sub->callback([&exit_code, c, perm, window, cell_cap, &out]() {
      exit_code = run_rn_table(*c, *perm, *window, *cell_cap, out);
    });
  }

  // witness
  {
    auto c = std::make_shared<CommonOpts>();
    auto* sub = app.add_subcommand(
        "witness",
        "constructive equivalence-breaking pair for a chain with a "
        "forbidden transition");
    add_common(sub, *c);
    sub->callback(
        [&exit_code, c, &out]() { exit_code = run_witness(*c, out); });
  }

  // symmetrize
  {
    auto c = std::make_shared<CommonOpts>();
    auto n_big = std::make_shared<int>(1);
    auto window = std::make_shared<std::string>();
    auto opt = std::make_shared<SymmetrizeOptions>();
    auto force_mc = std::make_shared<bool>(false);
    auto* sub = app.add_subcommand(
        "symmetrize", "group-averaged cylinder table over [-N, N]");
    add_common(sub, *c);
    sub->add_option("--N", *n_big, "support radius of the permutation group")
        ->required();
    sub->add_option("--window", *window, "table window, e.g. -1..1")
        ->required();
    sub->add_option("--exact-N-cap", opt->exact_max_n,
                    "largest N enumerated exhaustively")
        ->capture_default_str();
    sub->add_option("--mc-perms", opt->mc_perms,
                    "sampled permutations beyond the exhaustive cap")
        ->capture_default_str();
    sub->add_option("--seed", opt->seed, "seed for Monte Carlo averaging")
        ->capture_default_str();
    sub->add_flag("--mc", *force_mc, "force Monte Carlo averaging");
    sub->callback([&exit_code, c, n_big, window, opt, force_mc, &out]() {
      opt->force_mc = *force_mc;
      exit_code = run_symmetrize(*c, *n_big, *window, *opt, out);
    });
  }

  // mixing-gap
  {
    auto c = std::make_shared<CommonOpts>();
    auto past = std::make_shared<int>(1);
    auto future = std::make_shared<int>(1);
    auto g = std::make_shared<int>(0);
    auto sweep = std::make_shared<std::string>();
    auto cell_cap = std::make_shared<long>(1 << 20);
    auto* sub = app.add_subcommand(
        "mixing-gap",
        "past/future total-variation distance from independence");
    add_common(sub, *c);
    sub->add_option("--past", *past, "past block length")
        ->capture_default_str();
    sub->add_option("--future", *future, "future block length")
        ->capture_default_str();
    sub->add_option("--g", *g, "free coordinates between the blocks")
        ->capture_default_str();
    sub->add_option("--sweep", *sweep, "gap range, e.g. 0..8 (emits one row per gap)");
    sub->add_option("--cell-cap", *cell_cap, "largest joint cell count")
        ->capture_default_str();
    sub->callback([&exit_code, c, past, future, g, sweep, cell_cap, &out]() {
      exit_code =
          run_mixing_gap(*c, *past, *future, *g, *sweep, *cell_cap, out);
    });
  }

  // ergodic-avg
  {
    auto c = std::make_shared<CommonOpts>();
    auto f = std::make_shared<std::string>();
    auto q = std::make_shared<long>(1000);
    auto r = std::make_shared<int>(0);
    auto k = std::make_shared<int>(0);
    auto paths = std::make_shared<int>(500);
    auto seed = std::make_shared<std::uint64_t>(kDefaultSeed);
    auto weights = std::make_shared<bool>(false);
    auto* sub = app.add_subcommand(
        "ergodic-avg", "Monte Carlo occupation average of a cylinder");
    add_common(sub, *c);
    sub->add_option("--F", *f, "target cylinder, e.g. 1:1")->required();
    sub->add_option("--Q", *q, "averaging horizon")->capture_default_str();
    sub->add_option("--R", *r, "shift lower offset")->capture_default_str();
    sub->add_option("--k", *k, "block length offset")->capture_default_str();
    sub->add_option("--paths", *paths, "sampled paths")
        ->capture_default_str();
    sub->add_option("--seed", *seed, "sampling seed")->capture_default_str();
    sub->add_flag("--ratio-weights", *weights,
                  "weight each occurrence by the block-swapped cylinder "
                  "probability ratio (exact families only; cost grows with Q)");
    sub->callback([&exit_code, c, f, q, r, k, paths, seed, weights, &out]() {
      exit_code =
          run_ergodic(*c, *f, *q, *r, *k, *paths, *seed, *weights, out);
    });
  }

  // sample
  {
    auto c = std::make_shared<CommonOpts>();
    auto window = std::make_shared<std::string>();
    auto paths = std::make_shared<int>(10);
    auto seed = std::make_shared<std::uint64_t>(kDefaultSeed);
    auto* sub =
        app.add_subcommand("sample", "draw paths on a coordinate window");
    add_common(sub, *c);
    sub->add_option("--window", *window, "window, e.g. 1..20")->required();
    sub->add_option("--paths", *paths, "number of paths")
        ->capture_default_str();
    sub->add_option("--seed", *seed, "sampling seed")->capture_default_str();
    sub->callback([&exit_code, c, window, paths, seed, &out]() {
      exit_code = run_sample(*c, *window, *paths, *seed, out);
    });
  }

  // dpp-prob
  {
    auto c = std::make_shared<CommonOpts>();
    auto points = std::make_shared<std::string>();
    auto window = std::make_shared<std::string>();
    auto subset = std::make_shared<std::string>();
    auto* sub = app.add_subcommand(
        "dpp-prob", "kernel inclusion or exact-configuration probability");
    add_common(sub, *c);
    sub->add_option("--points", *points,
                    "inclusion probability of these sites, e.g. 0,1");
    sub->add_option("--window", *window,
                    "site window for a configuration probability");
    sub->add_option("--subset", *subset,
                    "sites required present inside --window");
    sub->callback([&exit_code, c, points, window, subset, &out]() {
      exit_code = run_dpp_prob(*c, *points, *window, *subset, out);
    });
  }

  // moments
  {
    auto c = std::make_shared<CommonOpts>();
    auto r = std::make_shared<int>(6);
    auto* sub = app.add_subcommand(
        "moments", "all-ones cylinder moments of a binary law");
    add_common(sub, *c);
    sub->add_option("--r", *r, "number of moments")->capture_default_str();
    sub->callback([&exit_code, c, r, &out]() {
      exit_code = run_moments(*c, *r, out);
    });
  }

  // hankel
  {
    auto c = std::make_shared<CommonOpts>();
    auto moments_text = std::make_shared<std::string>();
    auto r = std::make_shared<int>(6);
    auto* sub = app.add_subcommand(
        "hankel", "Hausdorff-moment positivity certificate");
    add_common(sub, *c, false);
    sub->add_option("--moments", *moments_text,
                    "literal moment list m_1..m_r, e.g. 0.5,0.34,0.26");
    sub->add_option("--r", *r, "moments to take from --spec")
        ->capture_default_str();
    sub->callback([&exit_code, c, moments_text, r, &out]() {
      exit_code = run_hankel(*c, *moments_text, *r, out);
    });
  }

  // recover
  {
    auto c = std::make_shared<CommonOpts>();
    auto moments_text = std::make_shared<std::string>();
    auto r = std::make_shared<int>(6);
    auto r_max = std::make_shared<int>(4);
    auto tol = std::make_shared<double>(1e-6);
    auto* sub = app.add_subcommand(
        "recover", "mixing-measure atoms from a moment sequence");
    add_common(sub, *c, false);
    sub->add_option("--moments", *moments_text,
                    "literal moment list m_1..m_r");
    sub->add_option("--r", *r, "moments to take from --spec")
        ->capture_default_str();
    sub->add_option("--r-max", *r_max, "atom budget")->capture_default_str();
    sub->add_option("--tol", *tol, "largest accepted moment residual")
        ->capture_default_str();
    sub->callback([&exit_code, c, moments_text, r, r_max, tol, &out]() {
      exit_code = run_recover(*c, *moments_text, *r, *r_max, *tol, out);
    });
  }

  std::vector<std::string> argv_storage;
  argv_storage.reserve(args.size() + 1);
  argv_storage.push_back("exchangelab");
  for (const auto& a : args) argv_storage.push_back(a);
  std::vector<const char*> argv;
  argv.reserve(argv_storage.size());
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    // Collapse the library's per-error codes onto the documented contract:
    // 0 for --help and friends, 1 for anything malformed.
    return app.exit(e, out, err) == 0 ? kOk : kError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kError;
  }
  return exit_code;
}

}  // namespace exchangelab
