// redbound command-line front end.
//
// Exit codes: 0 success or certified, 1 uncertified or failed check,
// 2 unreadable/malformed input or bad usage, 3 invalid state.

#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "redbound/report.hpp"

namespace {

using namespace redbound;

constexpr int kExitOk = 0;
constexpr int kExitUncertified = 1;
constexpr int kExitIo = 2;
constexpr int kExitInvalid = 3;

struct Common {
  std::uint64_t seed = 0;
  std::vector<std::string> tol;
  std::string format;  // empty: subcommand default
  bool quick = false;
  std::string out;
};

std::map<std::string, double> parse_tolerances(const std::vector<std::string>& items) {
  auto tol = verify::default_tolerances();
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw IoError("--tol expects key=value, got '" + item + "'");
    const std::string key = item.substr(0, eq);
    if (!tol.count(key)) throw IoError("--tol: unknown key '" + key + "'");
    try {
      std::size_t used = 0;
      const double v = std::stod(item.substr(eq + 1), &used);
      if (used != item.size() - eq - 1 || !(v > 0.0)) throw std::invalid_argument("bad");
      tol[key] = v;
    } catch (const std::exception&) {
      throw IoError("--tol: '" + item + "' needs a positive number");
    }
  }
  return tol;
}

void emit(const Common& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
  } else {
    write_text_file(c.out, text.back() == '\n' ? text : text + "\n");
  }
}

// At least one decimal, 4 significant digits.
std::string pretty_number(double x) {
  std::string s = verify::fmt(x, 4);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

// "A", "B0,B1", "0,2" or a party letter.
Indices select_parts(const DensityMatrix& rho, const std::string& spec) {
  if (spec.size() == 1 && std::string("ABEX").find(spec) != std::string::npos) {
    const Party p = party_of(spec);
    Indices out = rho.parts(p);
    if (!out.empty()) return out;
    if (rho.labels.empty() && rho.dims.size() == 2 && (spec == "A" || spec == "B")) return {spec == "A" ? 0u : 1u};
    throw InvalidState("no subsystem belongs to party " + spec);
  }
  Indices out;
  std::size_t start = 0;
  while (start <= spec.size()) {
    const auto comma = spec.find(',', start);
    const std::string tok = spec.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (auto k = rho.find_label(tok)) {
      out.push_back(*k);
    } else {
      try {
        std::size_t used = 0;
        const unsigned long v = std::stoul(tok, &used);
        if (used != tok.size() || v >= rho.dims.size()) throw std::out_of_range("bad");
        out.push_back(v);
      } catch (const std::exception&) {
        throw InvalidState("unknown subsystem '" + tok + "'");
      }
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<Indices> split_groups(const DensityMatrix& rho, const std::string& spec, std::size_t expected) {
  std::vector<Indices> groups;
  std::size_t start = 0;
  while (true) {
    const auto colon = spec.find(':', start);
    groups.push_back(select_parts(rho, spec.substr(start, colon == std::string::npos ? std::string::npos : colon - start)));
    if (colon == std::string::npos) break;
    start = colon + 1;
  }
  if (groups.size() != expected)
    throw InvalidState("expected " + std::to_string(expected) + " colon-separated groups in '" + spec + "'");
  return groups;
}

ExtensionConfig extension_config(const Common& c, const std::string& cfg_file) {
  ExtensionConfig cfg;
  if (!cfg_file.empty()) cfg = extension_config_from_json(read_json_file(cfg_file));
  for (const auto& item : c.tol)
    if (item.rfind("feasibility=", 0) == 0) cfg.feasibility_tol = parse_tolerances({item}).at("feasibility");
  return cfg;
}

// ---------------------------------------------------------------------------

int cmd_entropy(const Common& c, const std::string& state_file, const std::string& subsystems,
                const std::string& coherent, const std::string& mutual, const std::string& cmi) {
  const DensityMatrix rho = read_state(state_file);
  json j;
  if (!coherent.empty()) {
    const auto g = split_groups(rho, coherent, 2);
    j["coherent_info_bits"] = round_sig(coherent_info(rho, g[0], g[1]));
  }
  if (!mutual.empty()) {
    const auto g = split_groups(rho, mutual, 2);
    j["mutual_info_bits"] = round_sig(mutual_info(rho, g[0], g[1]));
  }
  if (!cmi.empty()) {
    const auto g = split_groups(rho, cmi, 3);
    j["cond_mutual_info_bits"] = round_sig(cond_mutual_info(rho, g[0], g[1], g[2]));
  }
  if (j.empty()) {
    Indices parts;
    if (subsystems.empty())
      for (std::size_t k = 0; k < rho.dims.size(); ++k) parts.push_back(k);
    else
      parts = select_parts(rho, subsystems);
    j["entropy_bits"] = round_sig(entropy_of(rho, parts));
  }
  if (c.format == "json") {
    emit(c, j.dump(2));
  } else {
    std::string text;
    for (auto it = j.begin(); it != j.end(); ++it)
      text += (j.size() > 1 ? it.key() + " " : std::string()) + pretty_number(it.value().get<double>()) + "\n";
    emit(c, text);
  }
  return kExitOk;
}

int cmd_symext(const Common& c, const std::string& state_file, const std::string& cut, const std::string& cfg_file,
               const std::string& witness_out) {
  const DensityMatrix rho = read_state(state_file);
  const Indices b = cut.empty() ? default_cut(rho) : select_parts(rho, cut);
  ExtensionCertificate cert = certify_extension(rho, b, extension_config(c, cfg_file));
  json j = to_json(cert, false);
  j["witness_file"] = nullptr;
  if (!witness_out.empty() && cert.witness) {
    write_text_file(witness_out, to_json(*cert.witness).dump(2) + "\n");
    j["witness_file"] = witness_out;
  }
  if (c.format == "json") {
    emit(c, j.dump(2));
  } else {
    std::string text = std::string("verdict ") + to_string(cert.verdict) + "\n";
    if (cert.margin) text += "margin " + pretty_number(*cert.margin) + "\n";
    if (!std::isnan(cert.residual)) text += "residual " + verify::fmt(cert.residual, 4) + "\n";
    text += "iterations " + std::to_string(cert.iterations) + "\n";
    emit(c, text);
  }
  return kExitOk;
}

int cmd_bound(const Common& c, const std::string& state_file, const std::string& channel_file,
              const std::string& quantity_name, const std::string& cfg_file, std::size_t min_discard,
              bool unitary_search, bool channel_search, const std::string& unitary_out) {
  const auto q = parse_quantity(quantity_name);
  if (!q) throw IoError("--quantity must be KeyRate, DistillableEnt, ChannelCapacity or PrivateCapacity");
  if (state_file.empty() == channel_file.empty()) throw IoError("give exactly one of --state and --channel");
  SearchConfig cfg;
  cfg.extension = extension_config(c, cfg_file);
  cfg.min_discarded = min_discard;
  cfg.unitary_search = unitary_search;
  cfg.seed = c.seed;
  cfg.channel.search = channel_search;
  cfg.channel.seed = c.seed;
  const BoundReport rep = state_file.empty() ? certified_channel_bound(read_channel(channel_file), *q, cfg)
                                             : certified_state_bound(read_state(state_file), *q, cfg);
  std::optional<std::string> ufile;
  if (rep.plan.unitary) {
    ufile = unitary_out.empty() ? "redbound_unitary_" + std::to_string(c.seed) + ".json" : unitary_out;
    write_text_file(*ufile, matrix_parts_to_json(*rep.plan.unitary).dump(2) + "\n");
  }
  const json j = to_json(rep, ufile);
  if (c.format == "json") {
    emit(c, j.dump(2));
  } else {
    std::string text = std::string(to_string(rep.quantity)) + " bound ";
    text += rep.certified ? pretty_number(rep.bound_bits) + " bits (certified)\n" : "none (uncertified)\n";
    text += "defect " + (std::isfinite(rep.defect_bits) ? pretty_number(rep.defect_bits) : "n/a") + "\n";
    text += std::string("certificate ") + to_string(rep.certificate.verdict) + "\n";
    emit(c, text);
  }
  return rep.certified ? kExitOk : kExitUncertified;
}

int cmd_verify(const Common& c) {
  verify::Config cfg;
  cfg.seed = c.seed;
  cfg.quick = c.quick;
  cfg.tol = parse_tolerances(c.tol);
  const auto rows = verify::run(cfg);
  if (c.format == "csv")
    emit(c, verify::to_csv(rows));
  else if (c.format == "pretty")
    emit(c, verify::to_pretty(rows));
  else
    emit(c, verify::to_json(rows, cfg).dump(2));
  bool ok = true;
  for (const auto& r : rows)
    if (!r.pass) {
      std::cerr << "FAILED: " << r.case_id << '\n';
      ok = false;
    }
  return ok ? kExitOk : kExitUncertified;
}

GraphSpec graph_choice(const std::string& graph_file, const std::string& kind, std::size_t vertices) {
  if (!graph_file.empty()) return graph_from_json(read_json_file(graph_file));
  if (kind == "complete") return complete_graph(vertices);
  if (kind == "chain") return chain_graph(vertices);
  throw IoError("--graph-kind must be chain or complete");
}

int cmd_zoo(const Common& c, const std::string& name, std::size_t d, double amp, std::size_t n,
            const std::string& graph_file, const std::string& kind) {
  json j;
  if (name == "upsilon") j = to_json(upsilon_state(d));
  else if (name == "block-singlet") j = to_json(block_singlet_state(d, amp));
  else if (name == "graph") j = to_json(graph_state(graph_choice(graph_file, kind, n)));
  else if (name == "example2") j = to_json(example2_state(n, graph_choice(graph_file, kind, 3 * n + 1)));
  else if (name == "eq9") j = to_json(eq9_state());
  else if (name == "eq9-logical") j = to_json(eq9_logical_state());
  else if (name == "dur") j = to_json(dur_equal_state(n));
  else if (name == "bell") j = to_json(bell_state());
  else if (name == "mixed") j = to_json(maximally_mixed({d, d}, {"A", "B"}));
  else if (name == "example3-channel") j = to_json(example3_channel());
  else if (name == "identity-channel") j = to_json(identity_channel(d));
  else if (name == "depolarizing-channel") j = to_json(fully_depolarizing_channel(d));
  else throw IoError("unknown zoo entry '" + name + "'");
  emit(c, j.dump(2));
  return kExitOk;
}

int cmd_match(const Common& c, const std::string& graph_file, const std::string& kind) {
  const Eq9Match m = match_eq9(graph_choice(graph_file, kind, 7));
  const json j{{"distance", round_sig(m.distance)},
               {"alice", m.alice},
               {"bob", m.bob},
               {"assignments", m.assignments}};
  if (c.format == "json")
    emit(c, j.dump(2));
  else
    emit(c, "distance " + verify::fmt(m.distance, 4) + "\nalice " + j["alice"].dump() + "\nbob " + j["bob"].dump() + "\n");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reduced upper bounds on one-way quantum communication rates"};
  app.require_subcommand(1);
  Common common;

  auto add_common = [&common](CLI::App* sub) {
    sub->add_option("--seed", common.seed, "Seed for every random choice")->capture_default_str();
    sub->add_option("--tol", common.tol, "Tolerance override key=value (repeatable)");
    sub->add_option("--format", common.format, "Output format")->check(CLI::IsMember({"json", "csv", "pretty"}));
    sub->add_option("--out", common.out, "Write output to a file instead of stdout");
  };

  std::string state_file, channel_file, cfg_file, subsystems, coherent, mutual, cmi, cut, witness_out;
  std::string quantity = "KeyRate", unitary_out, name, graph_file, kind = "chain";
  std::size_t min_discard = 0, d = 2, n = 2;
  double amp = 1.0;
  bool unitary_search = false, channel_search = false;

  auto* entropy = app.add_subcommand("entropy", "Entropic quantities of a state file");
  entropy->add_option("--state", state_file, "State JSON file")->required();
  entropy->add_option("--subsystems", subsystems, "Subsystems for S (labels, indices or a party letter)");
  entropy->add_option("--coherent", coherent, "Coherent information A:B");
  entropy->add_option("--mutual", mutual, "Mutual information A:B");
  entropy->add_option("--cmi", cmi, "Conditional mutual information A:B:C");

  auto* symext = app.add_subcommand("symext", "Symmetric-extension certificate");
  symext->add_option("--state", state_file, "State JSON file")->required();
  symext->add_option("--cut", cut, "Bob's subsystems (default: factors labelled B...)");
  symext->add_option("--cfg", cfg_file, "Solver settings JSON");
  symext->add_option("--witness-out", witness_out, "Write the extension witness here");

  auto* bound = app.add_subcommand("bound", "Certified reduced upper bound");
  bound->add_option("--state", state_file, "State JSON file");
  bound->add_option("--channel", channel_file, "Channel JSON file");
  bound->add_option("--quantity", quantity, "KeyRate | DistillableEnt | ChannelCapacity | PrivateCapacity")
      ->capture_default_str();
  bound->add_option("--cfg", cfg_file, "Solver settings JSON");
  bound->add_option("--min-discard", min_discard, "Smallest number of Bob factors to discard");
  bound->add_flag("--unitary-search", unitary_search, "Search Bob-local unitaries when a plan does not certify");
  bound->add_flag("--channel-search", channel_search, "Estimate the channel defect numerically instead of the cap");
  bound->add_option("--unitary-out", unitary_out, "Where to write the plan's unitary, if any");

  auto* verify_cmd = app.add_subcommand("verify-paper", "Regression report over the worked examples");
  verify_cmd->add_flag("--quick", common.quick, "100 random sweeps instead of 1000");

  auto* zoo = app.add_subcommand("zoo", "Write an example state or channel as JSON");
  zoo->add_option("name", name,
                  "upsilon | block-singlet | graph | example2 | eq9 | eq9-logical | dur | bell | mixed | "
                  "example3-channel | identity-channel | depolarizing-channel")
      ->required();
  zoo->add_option("--d", d, "Local dimension")->capture_default_str();
  zoo->add_option("--amp", amp, "Coupling amplitude of the block-singlet state")->capture_default_str();
  zoo->add_option("--n", n, "n for example2, qubit count for dur and graph")->capture_default_str();
  zoo->add_option("--graph", graph_file, "Graph JSON file");
  zoo->add_option("--graph-kind", kind, "chain | complete")->capture_default_str();

  auto* match = app.add_subcommand("match-eq9", "Distance between the n = 2 graph marginal and the explicit state");
  match->add_option("--graph", graph_file, "Graph JSON file");
  match->add_option("--graph-kind", kind, "chain | complete")->capture_default_str();

  add_common(entropy);
  add_common(symext);
  add_common(bound);
  add_common(verify_cmd);
  add_common(zoo);
  add_common(match);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitIo;
  }

  // Per-subcommand default format when none was given.
  if (common.format.empty()) common.format = entropy->parsed() ? "pretty" : "json";

  try {
    if (entropy->parsed()) return cmd_entropy(common, state_file, subsystems, coherent, mutual, cmi);
    if (symext->parsed()) return cmd_symext(common, state_file, cut, cfg_file, witness_out);
    if (bound->parsed())
      return cmd_bound(common, state_file, channel_file, quantity, cfg_file, min_discard, unitary_search,
                       channel_search, unitary_out);
    if (verify_cmd->parsed()) return cmd_verify(common);
    if (zoo->parsed()) return cmd_zoo(common, name, d, amp, n, graph_file, kind);
    if (match->parsed()) return cmd_match(common, graph_file, kind);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const InvalidState& e) {
    std::cerr << "invalid state: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const LinalgError& e) {
    std::cerr << "invalid state: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUncertified;
  }
  return kExitIo;
}
