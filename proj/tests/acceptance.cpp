// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <sys/wait.h>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "redbound/report.hpp"

using namespace redbound;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double x) {
  std::ostringstream s;
  s.precision(6);
  s << x;
  return s.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<double> simplex(std::size_t n, Rng& rng) {
  std::exponential_distribution<double> ex(1.0);
  std::vector<double> w(n);
  double t = 0.0;
  for (double& x : w) t += (x = ex(rng));
  for (double& x : w) x /= t;
  return w;
}

std::size_t uniform(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

// Entropy of a single-qubit reduction, read directly off the populations of
// the full density matrix. Valid because the Dur reductions are diagonal.
double qubit_reduction_entropy(const DensityMatrix& rho, std::size_t q) {
  const std::size_t n = rho.dims.size();
  double p0 = 0.0, off = 0.0;
  for (std::size_t i = 0; i < rho.dim(); ++i) {
    if (((i >> (n - 1 - q)) & 1U) == 0) {
      p0 += rho.mat(i, i).real();
      off += std::abs(rho.mat(i, i | (std::size_t{1} << (n - 1 - q))));
    }
  }
  if (off > 1e-14) return NAN;
  double s = 0.0;
  for (double p : {p0, 1.0 - p0})
    if (p > 1e-15) s -= p * std::log2(p);
  return s;
}

std::string capture(const std::string& cmd, int& code) {
  std::string out;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) {
    code = -1;
    return out;
  }
  std::array<char, 8192> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), n);
  const int status = pclose(p);
  code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return out;
}

// ---------------------------------------------------------------------------

Outcome holevo_reduction() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(1001);
  const Indices b{0}, bp{1};
  double worst = INFINITY;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t db = uniform(rng, 2, 3), dbp = uniform(rng, 1, 3), m = uniform(rng, 1, 4);
    Ensemble e{simplex(m, rng), {}};
    for (std::size_t k = 0; k < m; ++k) e.members.push_back(random_state({db, dbp}, uniform(rng, 1, db * dbp), rng));
    worst = std::min(worst, holevo_gap_check(e, b, bp));
  }
  const double secs = seconds_since(t0);
  return {worst >= -1e-8 && secs < 60.0, "min margin " + num(worst) + ", " + num(secs) + " s"};
}

Outcome coherent_reduction() {
  Rng rng(1002);
  const Indices a{0}, b{1}, bp{2};
  double worst = INFINITY;
  for (int i = 0; i < 1000; ++i) {
    const DensityMatrix psi = random_pure({2, i % 2 ? std::size_t{3} : std::size_t{2}, 2}, rng);
    worst = std::min(worst, coherent_info_gap(psi, a, b, bp));
  }
  return {worst >= -1e-8, "min margin " + num(worst)};
}

Outcome entropy_primitives() {
  Rng rng(1003);
  double worst_sub = INFINITY, worst_al = INFINITY;
  const Indices b{0}, bp{1};
  for (int i = 0; i < 1000; ++i) {
    const std::size_t db = uniform(rng, 2, 3), dbp = uniform(rng, 1, 3), m = uniform(rng, 1, 4);
    Ensemble e{simplex(m, rng), {}};
    for (std::size_t k = 0; k < m; ++k) e.members.push_back(random_state({db, dbp}, uniform(rng, 1, db * dbp), rng));
    const DensityMatrix avg = ensemble_average(e);
    worst_sub = std::min(worst_sub, subadditivity_slack(avg, b, bp));
    worst_al = std::min(worst_al, araki_lieb_slack(avg, b, bp));
  }
  const Indices a{0}, bb{1}, bq{2}, bbq{1, 2};
  for (int i = 0; i < 1000; ++i) {
    const DensityMatrix psi = random_pure({2, i % 2 ? std::size_t{3} : std::size_t{2}, 2}, rng);
    for (auto [x, y] : {std::pair{a, bbq}, std::pair{a, bb}, std::pair{bb, bq}}) {
      worst_sub = std::min(worst_sub, subadditivity_slack(psi, x, y));
      worst_al = std::min(worst_al, araki_lieb_slack(psi, x, y));
    }
  }
  return {worst_sub >= -1e-8 && worst_al >= -1e-8,
          "subadditivity " + num(worst_sub) + ", Araki-Lieb " + num(worst_al)};
}

Outcome example1() {
  std::string detail;
  bool ok = true;
  for (std::size_t d : {2, 3}) {
    const DensityMatrix u = upsilon_state(d);
    const auto cert = find_symmetric_extension(u);
    const double res = cert.witness ? verify_extension(*cert.witness, u, Indices{1}).total() : INFINITY;
    ok = ok && cert.verdict == Verdict::FeasibleWitness && res <= 1e-7;
    detail += "upsilon d=" + std::to_string(d) + " residual " + num(res) + "; ";
  }
  const auto rep = certified_state_bound(block_singlet_state(2, 1.0), Quantity::KeyRate);
  ok = ok && rep.certified && std::abs(rep.bound_bits - 4.0) <= 1e-9;
  return {ok, detail + "K bound " + (rep.certified ? num(rep.bound_bits) : "none")};
}

Outcome example2() {
  const auto e = hermitian_eig(eq9_state().mat).eigenvalues;
  double spec_err = std::max(std::abs(e[31] - 0.5), std::abs(e[30] - 0.5));
  for (std::size_t k = 0; k < 30; ++k) spec_err = std::max(spec_err, std::abs(e[k]));
  const auto form = bell_diagonal_form(eq9_logical_state());
  const double margin = form ? bell_criterion(*form).margin : NAN;
  SearchConfig cfg;
  cfg.min_discarded = 1;
  const auto rep = certified_state_bound(example2_state(2, complete_graph(7)), Quantity::KeyRate, cfg);
  const bool ok = spec_err <= 1e-10 && std::abs(margin) <= 1e-10 && rep.certified &&
                  rep.plan.discarded_parts.size() == 1 && std::abs(rep.bound_bits - 4.0) <= 1e-9;
  return {ok, "spectrum error " + num(spec_err) + ", margin " + num(margin) + ", K bound " +
                  (rep.certified ? num(rep.bound_bits) : "none")};
}

Outcome example3() {
  SearchConfig cfg;
  cfg.min_discarded = 1;
  const auto rep = certified_channel_bound(example3_channel(), Quantity::ChannelCapacity, cfg);
  const bool ok = rep.certified && rep.plan.discarded_parts.size() == 1 && std::abs(rep.bound_bits - 2.0) <= 1e-9;
  return {ok, "Q bound " + (rep.certified ? num(rep.bound_bits) : "none")};
}

Outcome example4() {
  const std::size_t n = 5;
  const DensityMatrix rho = dur_equal_state(n);
  const auto rep = certified_state_bound(rho, Quantity::DistillableEnt);
  if (!rep.certified || rep.plan.discarded_parts.size() != 1) return {false, "no single-qubit certificate"};
  const double brute = 2.0 * qubit_reduction_entropy(rho, rep.plan.discarded_parts[0]);
  const std::size_t count = (std::size_t{1} << (n - 1)) - 1;
  const std::vector<double> lams(count, 0.25 / static_cast<double>(count));
  const double plus = dur_scalar_form(0.5, lams), minus = dur_scalar_form(0.0, lams);
  std::string detail = "D bound " + num(rep.bound_bits) + ", brute force " + num(brute) +
                       "; scalar form (l0+) " + num(plus) + ", (l0-) " + num(minus);
  if (std::abs(plus - rep.bound_bits) > 1e-9 || std::abs(minus - rep.bound_bits) > 1e-9)
    detail += " [flagged: scalar form differs]";
  return {std::abs(rep.bound_bits - brute) <= 1e-9, detail};
}

Outcome defect_subadditivity() {
  Rng rng(1008);
  double prod_err = 0.0, corr_slack = INFINITY;
  using Fn = double (*)(const DensityMatrix&);
  const Fn fns[2] = {defect_key, defect_dist};
  for (int i = 0; i < 100; ++i) {
    const std::size_t d1 = uniform(rng, 2, 3), d2 = uniform(rng, 2, 3);
    const DensityMatrix r = random_state({d1}, uniform(rng, 1, d1), rng), s = random_state({d2}, uniform(rng, 1, d2), rng);
    for (Fn f : fns) prod_err = std::max(prod_err, std::abs(f(tensor(r, s)) - f(r) - f(s)));
  }
  const Indices first{0}, second{1};
  for (int i = 0; i < 100; ++i) {
    const std::size_t d1 = uniform(rng, 2, 3), d2 = uniform(rng, 2, 3);
    const DensityMatrix j = random_state({d1, d2}, uniform(rng, 1, d1 * d2), rng);
    for (Fn f : fns) corr_slack = std::min(corr_slack, f(reduce(j, first)) + f(reduce(j, second)) - f(j));
  }
  return {prod_err <= 1e-9 && corr_slack >= -1e-8,
          "product error " + num(prod_err) + ", correlated slack " + num(corr_slack)};
}

Outcome symext_cross_validation() {
  Rng rng(1009);
  int compared = 0, disagree = 0;
  while (compared < 200) {
    const auto w = simplex(4, rng);
    const std::array<double, 4> p{w[0], w[1], w[2], w[3]};
    double det = p[0] * p[1] * p[2] * p[3], sq = 0.0;
    for (double x : p) sq += x * x;
    const double margin = 4.0 * std::sqrt(det) - sq + 0.5;
    if (std::abs(margin) <= 1e-3) continue;
    ++compared;
    const auto cert = find_symmetric_extension(bell_diagonal_state(p));
    if ((cert.verdict == Verdict::FeasibleWitness) != (margin >= 0.0)) ++disagree;
  }
  const auto bell = certify_extension(bell_state());
  const bool bell_ok = bell.verdict == Verdict::InfeasibleClosedForm && bell.margin && std::abs(*bell.margin + 0.5) <= 1e-12;
  return {disagree == 0 && bell_ok, std::to_string(disagree) + " disagreements in 200; Bell margin " +
                                        (bell.margin ? num(*bell.margin) : "none")};
}

Outcome bracket_soundness() {
  double worst = INFINITY;
  int pairs = 0;
  std::string where;
  for (const auto& c : verify::bracket_cases()) {
    std::vector<double> witnesses{coherent_info(c.state), dw_witness(c.state)};
    for (Quantity q : {Quantity::KeyRate, Quantity::DistillableEnt}) {
      const auto r = certified_state_bound(c.state, q);
      if (!r.certified) continue;
      for (double w : witnesses) {
        ++pairs;
        if (r.bound_bits - w < worst) {
          worst = r.bound_bits - w;
          where = c.name;
        }
      }
    }
  }
  return {pairs > 0 && worst >= -1e-8, std::to_string(pairs) + " pairs, min gap " + num(worst) + " (" + where + ")"};
}

Outcome determinism() {
  const std::string cmd = std::string(REDBOUND_CLI_PATH) + " verify-paper --seed 7 2>/dev/null";
  int c1 = 0, c2 = 0;
  const std::string a = capture(cmd, c1);
  const std::string b = capture(cmd, c2);
  const bool ok = !a.empty() && a == b && c1 == 0 && c2 == 0;
  return {ok, std::to_string(a.size()) + " bytes, exit codes " + std::to_string(c1) + "/" + std::to_string(c2) +
                  (a == b ? ", identical" : ", different")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"Holevo reduction inequality", holevo_reduction},
      {"coherent-information reduction", coherent_reduction},
      {"subadditivity and Araki-Lieb", entropy_primitives},
      {"Example 1 extension and key bound", example1},
      {"Example 2 spectrum, margin and key bound", example2},
      {"Example 3 channel bound", example3},
      {"Example 4 distillable bound", example4},
      {"defect subadditivity", defect_subadditivity},
      {"symmetric-extension cross-validation", symext_cross_validation},
      {"bracket soundness", bracket_soundness},
      {"determinism of verify-paper", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "[PASS]" : "[FAIL]") << " criterion " << i + 1 << ": " << criteria[i].first << " -- "
              << o.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
