#pragma once

// Regression report over the worked examples and the entropy inequalities.
// Every row carries a margin; a row passes iff its margin is >= 0.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "redbound/io.hpp"

namespace redbound::verify {

struct Row {
  std::string case_id;
  std::string quantity;
  std::optional<double> expected;
  std::optional<double> actual;
  double margin = 0.0;
  bool pass = false;
  bool flagged = false;  // informational discrepancy, never a failure
};

inline std::map<std::string, double> default_tolerances() {
  return {
      {"inequality", 1e-8},  {"equality", 1e-9},    {"spectrum", 1e-10}, {"criterion", 1e-10},
      {"closed_form", 1e-12}, {"feasibility", 1e-7}, {"bracket", 1e-8},  {"band", 1e-3},
      {"match", 1e-9},       {"bound", 1e-9},
  };
}

struct Config {
  std::uint64_t seed = 0;
  bool quick = false;
  std::map<std::string, double> tol = default_tolerances();

  double t(const std::string& key) const {
    auto it = tol.find(key);
    if (it == tol.end()) throw InvalidState("unknown tolerance '" + key + "'");
    return it->second;
  }
  int sweeps() const { return quick ? 100 : 1000; }
};

// Independent random stream per case.
inline Rng stream(const Config& cfg, std::uint64_t salt) {
  std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                    static_cast<std::uint32_t>(salt)};
  return Rng(seq);
}

inline Row inequality_row(std::string id, std::string quantity, double min_slack, double tol) {
  Row r{std::move(id), std::move(quantity), 0.0, min_slack, min_slack + tol, false, false};
  r.pass = r.margin >= 0.0;
  return r;
}

inline Row equality_row(std::string id, std::string quantity, double expected, double actual, double tol) {
  Row r{std::move(id), std::move(quantity), expected, actual, tol - std::abs(actual - expected), false, false};
  r.pass = r.margin >= 0.0;
  return r;
}

inline Row info_row(std::string id, std::string quantity, double expected, double actual) {
  Row r{std::move(id), std::move(quantity), expected, actual, 0.0, true, false};
  r.flagged = std::abs(actual - expected) > 1e-9;
  return r;
}

// ---------------------------------------------------------------------------
// Random sweeps.

inline std::vector<double> random_weights(std::size_t n, Rng& rng) {
  std::exponential_distribution<double> ex(1.0);
  std::vector<double> w(n);
  double total = 0.0;
  for (auto& x : w) total += (x = ex(rng));
  for (auto& x : w) x /= total;
  return w;
}

inline std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

// Ensembles of at most 4 members on B (x) B' with both factors at most qutrits.
inline Ensemble random_ensemble(Rng& rng) {
  const std::size_t db = pick(rng, 2, 3);
  const std::size_t dbp = pick(rng, 1, 3);
  const std::size_t m = pick(rng, 1, 4);
  Ensemble e{random_weights(m, rng), {}};
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t rank = pick(rng, 1, db * dbp);
    e.members.push_back(random_state({db, dbp}, rank, rng, {"B", "B'"}));
  }
  return e;
}

struct SweepMinima {
  double holevo_gap = std::numeric_limits<double>::infinity();
  double coherent_gap = std::numeric_limits<double>::infinity();
  double subadditivity = std::numeric_limits<double>::infinity();
  double araki_lieb = std::numeric_limits<double>::infinity();
};

inline SweepMinima entropy_sweeps(const Config& cfg) {
  SweepMinima m;
  const Indices b{0}, bp{1};
  Rng r1 = stream(cfg, 1);
  for (int i = 0; i < cfg.sweeps(); ++i) {
    const Ensemble e = random_ensemble(r1);
    m.holevo_gap = std::min(m.holevo_gap, holevo_gap_check(e, b, bp));
    const DensityMatrix avg = ensemble_average(e);
    m.subadditivity = std::min(m.subadditivity, subadditivity_slack(avg, b, bp));
    m.araki_lieb = std::min(m.araki_lieb, araki_lieb_slack(avg, b, bp));
  }
  Rng r2 = stream(cfg, 2);
  const Indices a{0}, bb{1}, bq{2}, bbq{1, 2};
  for (int i = 0; i < cfg.sweeps(); ++i) {
    const Dims dims{2, i % 2 == 0 ? std::size_t{2} : std::size_t{3}, 2};
    const DensityMatrix rho = random_pure(dims, r2, {"A", "B", "B'"});
    m.coherent_gap = std::min(m.coherent_gap, coherent_info_gap(rho, a, bb, bq));
    for (auto [x, y] : {std::pair{a, bbq}, std::pair{a, bb}, std::pair{bb, bq}, std::pair{a, bq}}) {
      m.subadditivity = std::min(m.subadditivity, subadditivity_slack(rho, x, y));
      m.araki_lieb = std::min(m.araki_lieb, araki_lieb_slack(rho, x, y));
    }
  }
  return m;
}

struct DefectSweep {
  double product_error = 0.0;    // max |Delta(rho (x) sigma) - Delta(rho) - Delta(sigma)|
  double correlated_slack = std::numeric_limits<double>::infinity();  // min of sum - joint
};

inline DefectSweep defect_sweeps(const Config& cfg) {
  DefectSweep out;
  Rng rng = stream(cfg, 3);
  using Fn = double (*)(const DensityMatrix&);
  const std::array<Fn, 2> defects{defect_key, defect_dist};
  for (int i = 0; i < 100; ++i) {
    const std::size_t d1 = pick(rng, 2, 3), d2 = pick(rng, 2, 3);
    const DensityMatrix r = random_state({d1}, pick(rng, 1, d1), rng);
    const DensityMatrix s = random_state({d2}, pick(rng, 1, d2), rng);
    const DensityMatrix rs = tensor(r, s);
    for (Fn f : defects) out.product_error = std::max(out.product_error, std::abs(f(rs) - f(r) - f(s)));
  }
  const Indices first{0}, second{1};
  for (int i = 0; i < 100; ++i) {
    const std::size_t d1 = pick(rng, 2, 3), d2 = pick(rng, 2, 3);
    const DensityMatrix j = random_state({d1, d2}, pick(rng, 1, d1 * d2), rng);
    const DensityMatrix a = reduce(j, first), b = reduce(j, second);
    for (Fn f : defects) out.correlated_slack = std::min(out.correlated_slack, f(a) + f(b) - f(j));
  }
  return out;
}

struct AgreementSweep {
  int states = 0;
  int disagreements = 0;
  std::vector<double> margins;
};

inline AgreementSweep agreement_sweep(const Config& cfg, int count = 200) {
  AgreementSweep out;
  Rng rng = stream(cfg, 4);
  const double band = cfg.t("band");
  ExtensionConfig ec;
  ec.feasibility_tol = cfg.t("feasibility");
  while (out.states < count) {
    const auto w = random_weights(4, rng);
    const BellDiagonalForm f = make_bell_form({w[0], w[1], w[2], w[3]});
    const auto c = bell_criterion(f);
    if (std::abs(c.margin) <= band) continue;
    ++out.states;
    out.margins.push_back(c.margin);
    const auto cert = find_symmetric_extension(bell_diagonal_state(f.p), ec);
    if ((cert.verdict == Verdict::FeasibleWitness) != c.holds) ++out.disagreements;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Example pipelines, shared with the tests.

inline SearchConfig search_config(const Config& cfg, std::size_t min_discarded = 0) {
  SearchConfig s;
  s.extension.feasibility_tol = cfg.t("feasibility");
  s.min_discarded = min_discarded;
  s.seed = cfg.seed;
  s.channel.seed = cfg.seed;
  return s;
}

struct BracketCase {
  std::string name;
  DensityMatrix state;
};

inline std::vector<BracketCase> bracket_cases() {
  return {
      {"bell", bell_state()},
      {"block_singlet_d2", block_singlet_state(2, 1.0)},
      {"dur_n5", dur_equal_state(5)},
      {"example2_k7", example2_state(2, complete_graph(7))},
      {"example3_choi", choi(example3_channel())},
      {"mixed_2x2", maximally_mixed({2, 2}, {"A", "B"})},
      {"upsilon_d2", upsilon_state(2)},
      {"upsilon_d3", upsilon_state(3)},
  };
}

struct BracketResult {
  double min_gap = std::numeric_limits<double>::infinity();  // min over pairs of bound - witness
  int pairs = 0;
};

inline BracketResult bracket_check(const Config& cfg) {
  BracketResult out;
  for (const auto& c : bracket_cases()) {
    const double witnesses[2] = {coherent_info_witness(c.state), dw_witness(c.state)};
    std::vector<double> bounds;
    for (Quantity q : {Quantity::KeyRate, Quantity::DistillableEnt}) {
      const auto r = certified_state_bound(c.state, q, search_config(cfg));
      if (r.certified) bounds.push_back(r.bound_bits);
    }
    for (double w : witnesses)
      for (double b : bounds) {
        out.min_gap = std::min(out.min_gap, b - w);
        ++out.pairs;
      }
  }
  return out;
}

// ---------------------------------------------------------------------------

inline std::vector<Row> run(const Config& cfg) {
  std::vector<Row> rows;
  ExtensionConfig ec;
  ec.feasibility_tol = cfg.t("feasibility");

  // Entropy inequalities.
  const SweepMinima sw = entropy_sweeps(cfg);
  rows.push_back(inequality_row("sweep.holevo_gap", "HolevoGap", sw.holevo_gap, cfg.t("inequality")));
  rows.push_back(inequality_row("sweep.coherent_info_gap", "CoherentInfoGap", sw.coherent_gap, cfg.t("inequality")));
  rows.push_back(inequality_row("sweep.subadditivity", "Subadditivity", sw.subadditivity, cfg.t("inequality")));
  rows.push_back(inequality_row("sweep.araki_lieb", "ArakiLieb", sw.araki_lieb, cfg.t("inequality")));

  const DefectSweep ds = defect_sweeps(cfg);
  rows.push_back(equality_row("sweep.defect_product", "DefectAdditivity", 0.0, ds.product_error, cfg.t("equality")));
  rows.push_back(
      inequality_row("sweep.defect_correlated", "DefectSubadditivity", ds.correlated_slack, cfg.t("inequality")));

  // Example 1.
  for (std::size_t d : {2, 3}) {
    const auto cert = find_symmetric_extension(upsilon_state(d), ec);
    Row r{"ex1.upsilon_d" + std::to_string(d) + ".extension", "ExtensionResidual", 0.0, cert.residual,
          cfg.t("feasibility") - cert.residual, false, false};
    r.pass = cert.verdict == Verdict::FeasibleWitness && r.margin >= 0.0;
    rows.push_back(r);
  }
  {
    const auto rep = certified_state_bound(block_singlet_state(2, 1.0), Quantity::KeyRate, search_config(cfg));
    Row r = equality_row("ex1.key_bound", "KeyRate", 4.0, rep.certified ? rep.bound_bits : NAN, cfg.t("bound"));
    r.pass = rep.certified && r.margin >= 0.0;
    if (!rep.certified) r.actual.reset();
    rows.push_back(r);
  }

  // Example 2.
  {
    const auto e = hermitian_eig(eq9_state().mat).eigenvalues;
    const double top = e[e.size() - 1], next = e[e.size() - 2];
    double rest = 0.0;
    for (std::size_t k = 0; k + 2 < e.size(); ++k) rest = std::max(rest, std::abs(e[k]));
    Row r{"ex2.eq9_spectrum", "Spectrum", 0.5, next,
          cfg.t("spectrum") - std::max({std::abs(top - 0.5), std::abs(next - 0.5), rest}), false, false};
    r.pass = r.margin >= 0.0;
    rows.push_back(r);

    const auto form = bell_diagonal_form(eq9_logical_state());
    const double margin = form ? bell_criterion(*form).margin : NAN;
    Row b = equality_row("ex2.bell_margin", "BellMargin", 0.0, margin, cfg.t("criterion"));
    b.pass = form.has_value() && b.margin >= 0.0;
    rows.push_back(b);

    const Eq9Match m = match_eq9(complete_graph(7));
    rows.push_back(equality_row("ex2.graph_match", "GraphMatch", 0.0, m.distance, cfg.t("match")));

    const DensityMatrix rho = example2_state(2, complete_graph(7));
    const auto rep = certified_state_bound(rho, Quantity::KeyRate, search_config(cfg, 1));
    Row k = equality_row("ex2.key_bound", "KeyRate", 4.0, rep.certified ? rep.bound_bits : NAN, cfg.t("bound"));
    k.pass = rep.certified && k.margin >= 0.0;
    if (!rep.certified) k.actual.reset();
    rows.push_back(k);

    const auto free_rep = certified_state_bound(rho, Quantity::KeyRate, search_config(cfg));
    rows.push_back(info_row("ex2.key_bound_unrestricted", "KeyRate", 4.0,
                            free_rep.certified ? free_rep.bound_bits : INFINITY));
  }

  // Example 3.
  {
    const auto rep = certified_channel_bound(example3_channel(), Quantity::ChannelCapacity, search_config(cfg, 1));
    Row r = equality_row("ex3.channel_bound", "ChannelCapacity", 2.0, rep.certified ? rep.bound_bits : NAN,
                         cfg.t("bound"));
    r.pass = rep.certified && r.margin >= 0.0;
    if (!rep.certified) r.actual.reset();
    rows.push_back(r);
  }

  // Example 4.
  {
    const std::size_t n = 5;
    const DensityMatrix rho = dur_equal_state(n);
    const auto rep = certified_state_bound(rho, Quantity::DistillableEnt, search_config(cfg));
    double expected = NAN;
    if (rep.certified && rep.plan.discarded_parts.size() == 1)
      expected = 2.0 * von_neumann(reduce(rho, rep.plan.discarded_parts));
    Row r = equality_row("ex4.dist_bound", "DistillableEnt", expected, rep.certified ? rep.bound_bits : NAN,
                         cfg.t("equality"));
    r.pass = rep.certified && rep.plan.discarded_parts.size() == 1 && r.margin >= 0.0;
    if (!rep.certified) r.actual.reset();
    if (std::isnan(expected)) r.expected.reset();
    rows.push_back(r);

    const std::size_t count = (std::size_t{1} << (n - 1)) - 1;
    const std::vector<double> lams(count, 0.25 / static_cast<double>(count));
    const double actual = rep.certified ? rep.bound_bits : INFINITY;
    rows.push_back(info_row("ex4.scalar_form_minus", "DistillableEnt", dur_scalar_form(0.0, lams), actual));
    rows.push_back(info_row("ex4.scalar_form_plus", "DistillableEnt", dur_scalar_form(0.5, lams), actual));
  }

  // Symmetric extension cross-checks.
  {
    const AgreementSweep ag = agreement_sweep(cfg);
    Row r{"symext.agreement", "CriterionAgreement", 0.0, static_cast<double>(ag.disagreements),
          -static_cast<double>(ag.disagreements), false, false};
    r.pass = ag.disagreements == 0;
    rows.push_back(r);

    const auto cert = certify_extension(bell_state(), ec);
    const double margin = cert.margin ? *cert.margin : NAN;
    Row b = equality_row("symext.bell_closed_form", "BellMargin", -0.5, margin, cfg.t("closed_form"));
    b.pass = cert.verdict == Verdict::InfeasibleClosedForm && b.margin >= 0.0;
    rows.push_back(b);
  }

  // Witnesses never exceed certified bounds.
  {
    const BracketResult br = bracket_check(cfg);
    Row r = inequality_row("bracket.witness_vs_bound", "Bracket", br.min_gap, cfg.t("bracket"));
    r.pass = br.pairs > 0 && r.margin >= 0.0;
    rows.push_back(r);
  }

  for (auto& r : rows)
    if (!std::isfinite(r.margin)) {
      r.margin = -INFINITY;
      if (!r.flagged) r.pass = false;
    }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.case_id < b.case_id; });
  return rows;
}

inline bool all_pass(const std::vector<Row>& rows) {
  return std::all_of(rows.begin(), rows.end(), [](const Row& r) { return r.pass; });
}

// ---------------------------------------------------------------------------
// Output.

inline json to_json(const std::vector<Row>& rows, const Config& cfg) {
  json arr = json::array();
  for (const auto& r : rows) {
    arr.push_back({{"case_id", r.case_id},
                   {"quantity", r.quantity},
                   {"expected", r.expected ? number_or_null(*r.expected) : json(nullptr)},
                   {"actual", r.actual ? number_or_null(*r.actual) : json(nullptr)},
                   {"margin", number_or_null(r.margin)},
                   {"pass", r.pass},
                   {"flagged", r.flagged}});
  }
  return json{{"seed", cfg.seed}, {"quick", cfg.quick}, {"all_pass", all_pass(rows)}, {"rows", arr}};
}

inline std::string fmt(std::optional<double> x, int digits) {
  if (!x || std::isnan(*x)) return "";
  if (std::isinf(*x)) return *x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, round_sig(*x, digits));
  return buf;
}

inline std::string to_csv(const std::vector<Row>& rows) {
  std::ostringstream out;
  out << "case_id,quantity,expected,actual,margin,pass\n";
  for (const auto& r : rows)
    out << r.case_id << ',' << r.quantity << ',' << fmt(r.expected, 12) << ',' << fmt(r.actual, 12) << ','
        << fmt(r.margin, 12) << ',' << (r.pass ? "true" : "false") << '\n';
  return out.str();
}

inline std::string to_pretty(const std::vector<Row>& rows) {
  std::ostringstream out;
  out << std::left << std::setw(30) << "case" << std::setw(22) << "quantity" << std::setw(12) << "expected"
      << std::setw(12) << "actual" << std::setw(12) << "margin" << "result\n";
  for (const auto& r : rows)
    out << std::setw(30) << r.case_id << std::setw(22) << r.quantity << std::setw(12) << fmt(r.expected, 4)
        << std::setw(12) << fmt(r.actual, 4) << std::setw(12) << fmt(r.margin, 4)
        << (r.pass ? (r.flagged ? "pass (flagged)" : "pass") : "FAIL") << '\n';
  return out.str();
}

}  // namespace redbound::verify
