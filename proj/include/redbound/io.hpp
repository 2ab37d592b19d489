#pragma once

// JSON formats for states, channels, graphs, solver settings, certificates and
// bound reports. Requires nlohmann/json (vendor/json.hpp).

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "redbound/bounds.hpp"
#include "redbound/zoo.hpp"

namespace redbound {

using json = nlohmann::json;

// Unreadable or malformed input.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Round to 12 significant digits so printed output is stable.
inline double round_sig(double x, int digits = 12) {
  if (!std::isfinite(x)) return x;
  if (x == 0.0) return 0.0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return std::strtod(buf, nullptr);
}

inline json number_or_null(double x) {
  if (!std::isfinite(x)) return nullptr;
  return round_sig(x);
}

// ---------------------------------------------------------------------------
// Matrices.

inline json matrix_parts_to_json(const CMatrix& m) {
  json re = json::array(), im = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json r = json::array(), c = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) {
      r.push_back(round_sig(m(i, j).real()));
      c.push_back(round_sig(m(i, j).imag()));
    }
    re.push_back(std::move(r));
    im.push_back(std::move(c));
  }
  return json{{"re", std::move(re)}, {"im", std::move(im)}};
}

namespace detail {

[[noreturn]] inline void io_fail(const std::string& what) { throw IoError(what); }

inline const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) io_fail(where + ": missing field '" + key + "'");
  return j.at(key);
}

inline std::size_t positive_size(const json& j, const std::string& where) {
  if (!j.is_number_integer() || j.get<long long>() <= 0) io_fail(where + ": expected a positive integer");
  return j.get<std::size_t>();
}

inline double real_number(const json& j, const std::string& where) {
  if (!j.is_number()) io_fail(where + ": expected a number");
  return j.get<double>();
}

inline CMatrix matrix_from_parts(const json& j, const std::string& where) {
  const json& re = field(j, "re", where);
  if (!re.is_array() || re.empty()) io_fail(where + ": 're' must be a non-empty array of rows");
  const std::size_t rows = re.size();
  const std::size_t cols = re.front().is_array() ? re.front().size() : 0;
  if (cols == 0) io_fail(where + ": 're' rows must be non-empty arrays");
  const bool has_im = j.contains("im");
  const json& im = has_im ? j.at("im") : re;
  if (has_im && (!im.is_array() || im.size() != rows)) io_fail(where + ": 'im' shape differs from 're'");
  CMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!re[i].is_array() || re[i].size() != cols) io_fail(where + ": ragged 're' rows");
    if (has_im && (!im[i].is_array() || im[i].size() != cols)) io_fail(where + ": ragged 'im' rows");
    for (std::size_t k = 0; k < cols; ++k) {
      const double a = real_number(re[i][k], where + ".re");
      const double b = has_im ? real_number(im[i][k], where + ".im") : 0.0;
      m(i, k) = cplx(a, b);
    }
  }
  return m;
}

inline Dims dims_from(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) io_fail(where + ": expected a non-empty array");
  Dims d;
  for (const auto& x : j) d.push_back(positive_size(x, where));
  return d;
}

inline Indices indices_from(const json& j, const std::string& where) {
  if (!j.is_array()) io_fail(where + ": expected an array");
  Indices d;
  for (const auto& x : j) {
    if (!x.is_number_integer() || x.get<long long>() < 0) io_fail(where + ": expected non-negative integers");
    d.push_back(x.get<std::size_t>());
  }
  return d;
}

}  // namespace detail

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw IoError(path + ": " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("write failed for " + path);
}

// ---------------------------------------------------------------------------
// States: {dims, labels, re, im}.

inline json to_json(const DensityMatrix& rho) {
  json j = matrix_parts_to_json(rho.mat);
  j["dims"] = rho.dims;
  json labels = json::array();
  for (std::size_t k = 0; k < rho.dims.size(); ++k) labels.push_back(rho.label(k));
  j["labels"] = labels;
  return j;
}

// Structure errors raise IoError; a well-formed but invalid state raises
// InvalidState.
inline DensityMatrix state_from_json(const json& j) {
  const std::string where = "state";
  Dims dims = detail::dims_from(detail::field(j, "dims", where), where + ".dims");
  std::vector<std::string> labels;
  if (j.contains("labels")) {
    if (!j.at("labels").is_array()) detail::io_fail(where + ".labels: expected an array of strings");
    for (const auto& s : j.at("labels")) {
      if (!s.is_string()) detail::io_fail(where + ".labels: expected an array of strings");
      labels.push_back(s.get<std::string>());
    }
  }
  CMatrix m = detail::matrix_from_parts(j, where);
  return ingest_state(std::move(m), std::move(dims), std::move(labels));
}

inline DensityMatrix read_state(const std::string& path) { return state_from_json(read_json_file(path)); }

// ---------------------------------------------------------------------------
// Channels: {d_in, d_out, kraus: [{re, im}, ...]} plus optional out_dims.

inline json to_json(const Channel& c) {
  json kraus = json::array();
  for (const auto& k : c.kraus) kraus.push_back(matrix_parts_to_json(k));
  json j{{"d_in", c.d_in}, {"d_out", c.d_out}, {"kraus", kraus}};
  if (!c.out_dims.empty()) j["out_dims"] = c.out_dims;
  return j;
}

inline Channel channel_from_json(const json& j) {
  const std::string where = "channel";
  Channel c;
  c.d_in = detail::positive_size(detail::field(j, "d_in", where), where + ".d_in");
  c.d_out = detail::positive_size(detail::field(j, "d_out", where), where + ".d_out");
  const json& kraus = detail::field(j, "kraus", where);
  if (!kraus.is_array() || kraus.empty()) detail::io_fail(where + ".kraus: expected a non-empty array");
  for (const auto& k : kraus) c.kraus.push_back(detail::matrix_from_parts(k, where + ".kraus"));
  if (j.contains("out_dims")) c.out_dims = detail::dims_from(j.at("out_dims"), where + ".out_dims");
  require_valid(c, "channel file");
  return c;
}

inline Channel read_channel(const std::string& path) { return channel_from_json(read_json_file(path)); }

// ---------------------------------------------------------------------------
// Graphs: {n_vertices, edges: [[i, j], ...]}.

inline json to_json(const GraphSpec& g) {
  json edges = json::array();
  for (auto [i, j] : g.edges) edges.push_back({i, j});
  return json{{"n_vertices", g.n_vertices}, {"edges", edges}};
}

inline GraphSpec graph_from_json(const json& j) {
  const std::string where = "graph";
  GraphSpec g;
  g.n_vertices = detail::positive_size(detail::field(j, "n_vertices", where), where + ".n_vertices");
  const json& edges = detail::field(j, "edges", where);
  if (!edges.is_array()) detail::io_fail(where + ".edges: expected an array of pairs");
  for (const auto& e : edges) {
    const Indices p = detail::indices_from(e, where + ".edges");
    if (p.size() != 2) detail::io_fail(where + ".edges: each edge is a pair");
    g.edges.emplace_back(p[0], p[1]);
  }
  require_valid(g);
  return g;
}

// ---------------------------------------------------------------------------
// Solver settings: {max_iters, feasibility_tol, plateau_window}, all optional.

inline json to_json(const ExtensionConfig& cfg) {
  return json{{"max_iters", cfg.max_iters},
              {"feasibility_tol", round_sig(cfg.feasibility_tol)},
              {"plateau_window", cfg.plateau_window}};
}

inline ExtensionConfig extension_config_from_json(const json& j) {
  const std::string where = "cfg";
  if (!j.is_object()) detail::io_fail(where + ": expected an object");
  ExtensionConfig cfg;
  if (j.contains("max_iters")) cfg.max_iters = static_cast<int>(detail::positive_size(j.at("max_iters"), where));
  if (j.contains("feasibility_tol")) {
    cfg.feasibility_tol = detail::real_number(j.at("feasibility_tol"), where + ".feasibility_tol");
    if (!(cfg.feasibility_tol > 0.0)) detail::io_fail(where + ".feasibility_tol: must be positive");
  }
  if (j.contains("plateau_window")) {
    const json& w = j.at("plateau_window");
    if (!w.is_number_integer() || w.get<long long>() < 0) detail::io_fail(where + ".plateau_window: expected >= 0");
    cfg.plateau_window = w.get<int>();
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// Certificates and reports.

inline json to_json(const ExtensionCertificate& c, bool with_witness = true) {
  json j{{"verdict", to_string(c.verdict)}, {"residual", number_or_null(c.residual)}, {"iterations", c.iterations}};
  j["margin"] = c.margin ? number_or_null(*c.margin) : json(nullptr);
  if (with_witness) j["witness"] = c.witness ? to_json(*c.witness) : json(nullptr);
  return j;
}

inline json to_json(const BoundReport& r, const std::optional<std::string>& unitary_file = std::nullopt) {
  json plan{{"bob_parts", r.plan.bob_parts},
            {"discarded_parts", r.plan.discarded_parts},
            {"unitary_file", unitary_file ? json(*unitary_file) : json(nullptr)},
            {"seed", r.plan.seed}};
  json cert{{"verdict", to_string(r.certificate.verdict)},
            {"residual", number_or_null(r.certificate.residual)},
            {"iterations", r.certificate.iterations}};
  return json{{"quantity", to_string(r.quantity)},
              {"bound_bits", r.certified ? number_or_null(r.bound_bits) : json(nullptr)},
              {"defect_bits", number_or_null(r.defect_bits)},
              {"plan", plan},
              {"certificate", cert},
              {"certified", r.certified}};
}

}  // namespace redbound
