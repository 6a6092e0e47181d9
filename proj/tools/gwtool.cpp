#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <variant>

#include <groupwigner/groupwigner.hpp>

using json = nlohmann::ordered_json;
using namespace gw;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Config {
  std::string command;
  std::string group = "cyclic:7";
  std::string band = "1";
  int symbol_band = -1;
  int internal_band = -1;
  int principal_degree = -1;
  double tol = -1;
  std::string route;
  std::string out;
  std::string format = "json";
  std::string slice;
  int threads = 1;
  int j_grid = 5;
  int max_nodes = -1;
  unsigned seed = 7;
  bool allow_lossy = false;
  bool diagnostics = false;
  std::vector<std::string> inputs;
};

using AnyGroup = std::variant<Circle, SU2, Cyclic, Frobenius21>;

AnyGroup parse_group(const std::string& s) {
  if (s == "circle") return Circle{};
  if (s == "su2") return SU2{};
  if (s == "frobenius21") return Frobenius21{};
  if (s.rfind("cyclic:", 0) == 0) {
    int n = 0;
    try {
      n = std::stoi(s.substr(7));
    } catch (...) {
      throw UsageError("bad cyclic order in group '" + s + "'");
    }
    if (n < 1) throw UsageError("cyclic order must be positive");
    return Cyclic(n);
  }
  throw UsageError("unknown group '" + s + "' (circle, su2, cyclic:n, frobenius21)");
}

// labels in the group's native units; su2 bands are spins j in twice-j units
template <class G>
int parse_label(const G&, double v, const std::string& field) {
  if constexpr (std::is_same_v<G, SU2>) {
    const double twice = 2 * v;
    if (std::abs(twice - std::round(twice)) > 1e-12 || twice < 0)
      throw UsageError(field + ": spin must be a non-negative multiple of 1/2");
    return static_cast<int>(std::round(twice));
  } else {
    if (std::abs(v - std::round(v)) > 1e-12) throw UsageError(field + ": label must be an integer");
    return static_cast<int>(std::round(v));
  }
}

// accepts decimals and fractions such as 3/2
double parse_number(const std::string& s, const std::string& field) {
  std::size_t used = 0;
  double v = 0;
  try {
    auto slash = s.find('/');
    if (slash != std::string::npos) {
      std::size_t u2 = 0;
      const std::string den = s.substr(slash + 1);
      v = std::stod(s.substr(0, slash), &used) / std::stod(den, &u2);
      if (used != slash || u2 != den.size()) throw std::invalid_argument(s);
    } else {
      v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
    }
  } catch (...) {
    throw UsageError(field + ": invalid number '" + s + "'");
  }
  return v;
}

template <class G>
int parse_band(const G& g, const std::string& s) {
  const double v = parse_number(s, "--band");
  if (v < 0) throw UsageError("band must be non-negative");
  if (g.is_finite()) return 0;
  return parse_label(g, v, "--band");
}

template <class G>
json label_json(const G&, int label) {
  if constexpr (std::is_same_v<G, SU2>) return label / 2.0;
  else return label;
}

template <class G>
int row_of(const G& g, int label, double m, const std::string& field) {
  int row = 0;
  if constexpr (std::is_same_v<G, SU2>) {
    const double r = label / 2.0 - m;
    if (std::abs(r - std::round(r)) > 1e-12) throw UsageError(field + ": magnetic number does not match spin");
    row = static_cast<int>(std::round(r));
  } else {
    if (std::abs(m - std::round(m)) > 1e-12) throw UsageError(field + ": row index must be an integer");
    row = static_cast<int>(std::round(m));
  }
  if (row < 0 || row >= g.dim(label)) throw UsageError(field + ": index out of range");
  return row;
}

// element coordinates as separate table columns
std::vector<std::string> element_columns(double) { return {"theta"}; }
std::vector<std::string> element_columns(int) { return {"g"}; }
std::vector<std::string> element_columns(const std::array<double, 4>&) { return {"qw", "qx", "qy", "qz"}; }
std::vector<json> element_cells(double t) { return {t}; }
std::vector<json> element_cells(int k) { return {k}; }
std::vector<json> element_cells(const std::array<double, 4>& q) { return {q[0], q[1], q[2], q[3]}; }

std::vector<std::string> columns(std::vector<std::string> head, const std::vector<std::string>& mid,
                                 const std::vector<std::string>& tail) {
  head.insert(head.end(), mid.begin(), mid.end());
  head.insert(head.end(), tail.begin(), tail.end());
  return head;
}

std::vector<json> row(std::vector<json> head, const std::vector<json>& mid, const std::vector<json>& tail) {
  head.insert(head.end(), mid.begin(), mid.end());
  head.insert(head.end(), tail.begin(), tail.end());
  return head;
}

json element_json(double t) { return t; }
json element_json(int k) { return k; }
json element_json(const SU2::Element& q) { return json::array({q[0], q[1], q[2], q[3]}); }

template <class G>
typename G::Element element_from(const G& g, const json& j, const std::string& field) {
  using E = typename G::Element;
  try {
    if constexpr (std::is_same_v<E, SU2::Element>) {
      if (!j.is_array() || j.size() != 4) throw UsageError(field + ": expected quaternion [w, x, y, z]");
      return SU2::normalized({j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()});
    } else if constexpr (std::is_same_v<E, int>) {
      int k = j.get<int>();
      if (k < 0 || k >= static_cast<int>(g.haar_quadrature().size())) throw UsageError(field + ": element out of range");
      return k;
    } else {
      return j.get<double>();
    }
  } catch (const json::exception&) {
    throw UsageError(field + ": malformed group element");
  }
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError(path + ": invalid JSON (" + e.what() + ")");
  }
}

template <class T>
T field_value(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw UsageError(where + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw UsageError(where + ": field '" + key + "' has the wrong type");
  }
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;
};

std::string cell(const json& v) {
  if (v.is_number_float()) return fmt(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

json table_json(const Table& t) {
  json rows = json::array();
  for (const auto& r : t.rows) {
    json o = json::object();
    for (std::size_t c = 0; c < t.columns.size(); ++c) o[t.columns[c]] = r[c];
    rows.push_back(o);
  }
  return rows;
}

void write_output(const Config& cfg, const std::string& text) {
  if (cfg.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(cfg.out);
  if (!out) throw IoError("cannot write '" + cfg.out + "'");
  out << text;
  if (!out) throw IoError("write to '" + cfg.out + "' failed");
}

std::string render(const Config& cfg, const json& provenance, const json& body, const Table* table) {
  if (cfg.format == "csv") {
    if (!table) throw UsageError("this command has no CSV form without --slice");
    std::ostringstream s;
    for (auto it = provenance.begin(); it != provenance.end(); ++it) s << "# " << it.key() << ": " << cell(*it) << "\n";
    for (std::size_t c = 0; c < table->columns.size(); ++c) s << (c ? "," : "") << table->columns[c];
    s << "\n";
    for (const auto& r : table->rows) {
      for (std::size_t c = 0; c < r.size(); ++c) s << (c ? "," : "") << cell(r[c]);
      s << "\n";
    }
    return s.str();
  }
  json doc = json::object();
  doc["provenance"] = provenance;
  for (auto it = body.begin(); it != body.end(); ++it) doc[it.key()] = *it;
  return doc.dump(1) + "\n";
}

template <Group G>
struct Session {
  Config cfg;
  G group;
  int band;
  Route route;
  PhaseSpace<G> ps;

  Session(const Config& c, G g, int b, Route r)
      : cfg(c), group(g), band(b), route(r), ps(Space<G>(g, b), options(c, r)) {}

  static PhaseSpaceOptions options(const Config& c, Route r) {
    PhaseSpaceOptions o;
    o.symbol_band = c.symbol_band;
    o.internal_band = c.internal_band;
    o.principal_degree = c.principal_degree;
    o.route = r;
    o.threads = c.threads;
    return o;
  }

  double tolerance() const {
    if (cfg.tol > 0) return cfg.tol;
    if (group.is_finite()) return 1e-12;
    if constexpr (std::is_same_v<G, Circle>) return 1e-10;
    return 1e-9;
  }

  json provenance(const json& diagnostics) const {
    std::ostringstream key;
    key << cfg.command << "|" << group.id() << "|" << band << "|" << ps.symbol_band() << "|"
        << ps.options().internal_band << "|" << ps.options().principal_degree << "|" << route_name(route) << "|"
        << cfg.slice << "|" << cfg.allow_lossy << "|" << cfg.j_grid << "|" << cfg.seed << "|" << tolerance();
    for (const auto& in : cfg.inputs) key << "|" << in;
    char hash[20];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a(key.str())));
    json p = json::object();
    p["tool"] = "gwtool";
    p["command"] = cfg.command;
    p["config_hash"] = hash;
    p["group"] = group.id();
    p["band"] = label_json(group, band);
    p["symbol_band"] = label_json(group, ps.symbol_band());
    p["route"] = route_name(route);
    p["node_set"] = ps.symbol_nodes().id;
    p["diagnostics"] = diagnostics;
    return p;
  }

  // state and operator files

  void check_header(const json& j, const std::string& where) const {
    if (j.contains("group") && field_value<std::string>(j, "group", where) != group.id())
      throw UsageError(where + ": field 'group' does not match " + group.id());
    if (j.contains("band") && !group.is_finite() &&
        parse_label(group, field_value<double>(j, "band", where), where + ".band") != band)
      throw UsageError(where + ": field 'band' does not match the configured band");
  }

  std::vector<DTerm> terms_from(const json& arr, const std::string& where) const {
    if (!arr.is_array()) throw UsageError(where + ": expected an array");
    std::vector<DTerm> out;
    for (std::size_t k = 0; k < arr.size(); ++k) {
      const std::string w = where + "[" + std::to_string(k) + "]";
      const int label = parse_label(group, field_value<double>(arr[k], "j", w), w + ".j");
      if (label_index(group.irreps(std::max(2 * band, label)), label) < 0 && !group.is_finite())
        throw UsageError(w + ".j: unknown label");
      out.push_back({label, row_of(group, label, field_value<double>(arr[k], "m", w), w + ".m"),
                     row_of(group, label, field_value<double>(arr[k], "n", w), w + ".n"),
                     cplx(arr[k].value("re", 0.0), arr[k].value("im", 0.0))});
    }
    return out;
  }

  Vec state_from(const json& j, const std::string& where) const {
    check_header(j, where);
    const auto& space = ps.space();
    if (!j.contains("coeffs")) throw UsageError(where + ": missing field 'coeffs'");
    Vec c = Vec::Zero(space.dim());
    for (const auto& t : terms_from(j["coeffs"], where + ".coeffs")) {
      const int b = space.block_of_label(t.label);
      if (b < 0) throw UsageError(where + ".coeffs: label outside the band");
      c(space.index(b, t.m, t.n)) += t.value;
    }
    if (c.norm() == 0) throw UsageError(where + ".coeffs: state is zero");
    return c / c.norm();
  }

  QuadratureRule<typename G::Element> function_rule() const { return group.haar_quadrature(4 * band + 8); }

  std::pair<Mat, bool> operator_from(const json& j, const std::string& where) const {
    check_header(j, where);
    const auto& space = ps.space();
    const int d = space.dim();
    if (j.contains("matrix")) {
      const auto& m = j["matrix"];
      if (!m.is_array() || static_cast<int>(m.size()) != d * d)
        throw UsageError(where + ".matrix: expected " + std::to_string(d * d) + " [re, im] pairs");
      Mat a(d, d);
      for (int k = 0; k < d * d; ++k) {
        if (!m[k].is_array() || m[k].size() != 2) throw UsageError(where + ".matrix[" + std::to_string(k) + "]: expected [re, im]");
        a(k / d, k % d) = cplx(m[k][0].get<double>(), m[k][1].get<double>());
      }
      return {a, false};
    }
    if (!j.contains("spec")) throw UsageError(where + ": needs 'matrix' or 'spec'");
    const auto& s = j["spec"];
    const std::string w = where + ".spec";
    const auto type = field_value<std::string>(s, "type", w);
    if (type == "identity") return {Mat::Identity(d, d), false};
    if (type == "V") return {space.left_regular(element_from(group, s.at("g"), w + ".g")), false};
    if (type == "Vtilde") return {space.right_regular(element_from(group, s.at("g"), w + ".g")), false};
    if (type == "U") {
      const int label = parse_label(group, field_value<double>(s, "j", w), w + ".j");
      auto u = space.U(label, row_of(group, label, field_value<double>(s, "m", w), w + ".m"),
                       row_of(group, label, field_value<double>(s, "n", w), w + ".n"));
      return {u.value, u.lossy};
    }
    if (type == "mult") {
      if (!s.contains("terms")) throw UsageError(w + ": missing field 'terms'");
      auto m = space.multiplication(terms_from(s["terms"], w + ".terms"));
      return {m.value, m.lossy};
    }
    if (type == "exp_mult") {
      if (!s.contains("terms")) throw UsageError(w + ": missing field 'terms'");
      auto terms = terms_from(s["terms"], w + ".terms");
      auto e = space.exp_multiplication(
          [&](const typename G::Element& x) { return std::real(evaluate_terms(group, terms, x)); }, function_rule());
      return {e.value, e.lossy};
    }
    throw UsageError(w + ".type: unknown constructor '" + type + "'");
  }

  // symbol fields

  json field_json(const SymbolField<typename G::Element>& f) const {
    json nodes = json::array();
    for (std::size_t k = 0; k < f.nodes.size(); ++k) {
      json blocks = json::array();
      for (std::size_t j = 0; j < f.irreps.size(); ++j) {
        json data = json::array();
        const Mat& b = f.values[k][j];
        for (int r = 0; r < b.rows(); ++r)
          for (int c = 0; c < b.cols(); ++c) data.push_back(json::array({b(r, c).real(), b(r, c).imag()}));
        blocks.push_back({{"j", label_json(group, f.irreps[j].label)}, {"data", data}});
      }
      nodes.push_back({{"g", element_json(f.nodes[k])}, {"w", f.weights[k]}, {"blocks", blocks}});
    }
    json out = json::object();
    out["group"] = f.group;
    out["band"] = label_json(group, f.band);
    out["symbol_band"] = label_json(group, f.symbol_band);
    out["node_set"] = f.node_set;
    out["route"] = f.route;
    out["nodes"] = nodes;
    return out;
  }

  SymbolField<typename G::Element> field_from(const json& j, const std::string& where) const {
    check_header(j, where);
    auto f = ps.empty_field();
    if (j.contains("node_set") && field_value<std::string>(j, "node_set", where) != f.node_set)
      throw UsageError(where + ": field 'node_set' does not match the configured symbol nodes");
    if (j.contains("symbol_band") &&
        parse_label(group, field_value<double>(j, "symbol_band", where), where + ".symbol_band") != ps.symbol_band())
      throw UsageError(where + ": field 'symbol_band' does not match --symbol-band");
    if (!j.contains("nodes") || j["nodes"].size() != f.nodes.size())
      throw UsageError(where + ": field 'nodes' must list " + std::to_string(f.nodes.size()) + " nodes");
    for (std::size_t k = 0; k < f.nodes.size(); ++k) {
      const std::string w = where + ".nodes[" + std::to_string(k) + "]";
      const auto& node = j["nodes"][k];
      if (!node.contains("blocks") || node["blocks"].size() != f.irreps.size())
        throw UsageError(w + ": field 'blocks' has the wrong length");
      for (std::size_t b = 0; b < f.irreps.size(); ++b) {
        const auto& data = node["blocks"][b]["data"];
        const int n = f.irreps[b].dim;
        if (!data.is_array() || static_cast<int>(data.size()) != n * n)
          throw UsageError(w + ".blocks[" + std::to_string(b) + "].data: wrong size");
        for (int e = 0; e < n * n; ++e) f.values[k][b](e / n, e % n) = cplx(data[e][0].get<double>(), data[e][1].get<double>());
      }
    }
    return f;
  }

  Table slice_table(const SymbolField<typename G::Element>& f) const {
    std::stringstream ss(cfg.slice);
    std::string part;
    std::vector<double> v;
    while (std::getline(ss, part, ',')) v.push_back(parse_number(part, "--slice"));
    if (v.size() != 3) throw UsageError("--slice expects j,m,n");
    const int label = parse_label(group, v[0], "--slice");
    const int j = label_index(f.irreps, label);
    if (j < 0) throw UsageError("--slice: label outside the symbol band");
    const int m = row_of(group, label, v[1], "--slice"), n = row_of(group, label, v[2], "--slice");
    Table t{columns({"node"}, element_columns(group.identity()), {"weight", "re", "im"}), {}};
    for (std::size_t k = 0; k < f.nodes.size(); ++k)
      t.rows.push_back(row({static_cast<int>(k)}, element_cells(f.nodes[k]),
                           {f.weights[k], f.values[k][j](m, n).real(), f.values[k][j](m, n).imag()}));
    return t;
  }

  json round_trip(const Mat& a, const SymbolField<typename G::Element>& f) const {
    json d = json::object();
    d["round_trip_residual"] = max_abs(ps.reconstruct(f, ReconstructMode::Dual, cfg.allow_lossy) - a);
    if (!group.is_finite()) {
      auto r = ps.frame_report();
      d["frame_lambda_min"] = r.lambda_min;
      d["frame_lambda_max"] = r.lambda_max;
      d["frame_deficit"] = r.deficit;
    }
    return d;
  }

  // commands

  int cmd_symbol() {
    if (cfg.inputs.size() != 1) throw UsageError("symbol takes one operator file");
    auto [a, lossy] = operator_from(read_json(cfg.inputs[0]), cfg.inputs[0]);
    auto f = ps.symbol(a);
    json diag = {{"lossy_input", lossy}, {"nodes", f.nodes.size()}};
    if (cfg.diagnostics) diag.update(round_trip(a, f));
    if (!cfg.slice.empty()) {
      auto t = slice_table(f);
      if (cfg.format == "csv") {
        write_output(cfg, render(cfg, provenance(diag), {}, &t));
        return 0;
      }
      write_output(cfg, render(cfg, provenance(diag), {{"slice", table_json(t)}}, nullptr));
      return 0;
    }
    write_output(cfg, render(cfg, provenance(diag), field_json(f), nullptr));
    return 0;
  }

  int cmd_wigner() {
    if (cfg.inputs.size() != 1) throw UsageError("wigner takes one state file");
    Vec psi = state_from(read_json(cfg.inputs[0]), cfg.inputs[0]);
    Mat rho = psi * psi.adjoint();
    auto f = ps.symbol(rho);
    const auto& space = ps.space();
    // momentum marginal: integral of W(g; j m n) against (1/N) sum_k psi_{jnk} conj(psi_{jmk})
    double momentum = 0.0;
    for (std::size_t j = 0; j < f.irreps.size(); ++j) {
      const int n = f.irreps[j].dim;
      Mat computed = Mat::Zero(n, n), direct = Mat::Zero(n, n);
      for (std::size_t k = 0; k < f.nodes.size(); ++k) computed += f.weights[k] * f.values[k][j];
      const int b = space.block_of_label(f.irreps[j].label);
      if (b >= 0)
        for (int m = 0; m < n; ++m)
          for (int mp = 0; mp < n; ++mp)
            for (int k = 0; k < n; ++k)
              direct(m, mp) += psi(space.index(b, mp, k)) * std::conj(psi(space.index(b, m, k))) / static_cast<double>(n);
      momentum = std::max(momentum, max_abs(computed - direct));
    }
    Table pos{columns({"node"}, element_columns(group.identity()), {"computed", "direct", "reference"}), {}};
    double position = 0.0;
    bool has_reference = false;
    for (std::size_t k = 0; k < f.nodes.size(); ++k) {
      cplx p = 0.0;
      for (std::size_t j = 0; j < f.irreps.size(); ++j) p += static_cast<double>(f.irreps[j].dim) * f.values[k][j].trace();
      const double direct = std::norm(space.evaluate(psi, f.nodes[k]));
      json reference = nullptr;
      if (group.is_finite()) {
        reference = direct;
      } else if constexpr (std::is_same_v<G, Circle>) {
        // |psi|^2 smoothed by the Dirichlet kernel of the symbol band
        cplx s = 0.0;
        const int mb = band, kb = ps.symbol_band();
        for (int a = -mb; a <= mb; ++a)
          for (int c = -mb; c <= mb; ++c) {
            double w = 0.0;
            for (int m = -kb; m <= kb; ++m) {
              const double x = m - (a + c) / 2.0;
              w += std::abs(x) < 1e-15 ? 1.0 : std::sin(pi * x) / (pi * x);
            }
            s += psi(a + mb) * std::conj(psi(c + mb)) * std::exp(I * ((a - c) * f.nodes[k])) * w;
          }
        reference = s.real();
      }
      if (!reference.is_null()) {
        has_reference = true;
        position = std::max(position, std::abs(p - reference.get<double>()));
      }
      pos.rows.push_back(row({static_cast<int>(k)}, element_cells(f.nodes[k]), {p.real(), direct, reference}));
    }
    json diag = {{"momentum_marginal_residual", momentum},
                 {"position_marginal_residual", has_reference ? json(position) : json(nullptr)},
                 {"position_reference", group.is_finite() ? "exact density"
                                        : has_reference   ? "Dirichlet-smoothed density"
                                                          : "none"}};
    if (cfg.diagnostics) diag.update(round_trip(rho, f));
    const bool pass = momentum <= tolerance() && (!has_reference || position <= tolerance());
    if (cfg.format == "csv") {
      write_output(cfg, render(cfg, provenance(diag), {}, &pos));
    } else {
      json body = field_json(f);
      body["position_marginal"] = table_json(pos);
      write_output(cfg, render(cfg, provenance(diag), body, nullptr));
    }
    return pass ? 0 : 1;
  }

  int cmd_star() {
    if (cfg.inputs.size() != 2) throw UsageError("star takes two symbol-field files");
    auto a = field_from(read_json(cfg.inputs[0]), cfg.inputs[0]);
    auto b = field_from(read_json(cfg.inputs[1]), cfg.inputs[1]);
    StarRoute sr = StarRoute::Operator;
    if (!cfg.route.empty()) {
      try {
        sr = parse_star_route(cfg.route);
      } catch (const std::exception&) {
        throw UsageError("star --route expects operator or kernel");
      }
    }
    auto out = star(ps, a, b, sr, cfg.allow_lossy);
    json diag = {{"star_route", sr == StarRoute::Operator ? "operator" : "kernel"}};
    if (cfg.diagnostics) {
      auto other = star(ps, a, b, sr == StarRoute::Operator ? StarRoute::Kernel : StarRoute::Operator, cfg.allow_lossy);
      diag["route_residual"] = max_abs(out - other);
    }
    if (!cfg.slice.empty() && cfg.format == "csv") {
      auto t = slice_table(out);
      write_output(cfg, render(cfg, provenance(diag), {}, &t));
      return 0;
    }
    write_output(cfg, render(cfg, provenance(diag), field_json(out), nullptr));
    return 0;
  }

  int cmd_classical() {
    if constexpr (!std::is_same_v<G, SU2>) {
      throw UsageError("classical functions are available for su2 only");
    } else {
      if (cfg.inputs.size() != 1) throw UsageError("classical takes one operator file");
      auto [a, lossy] = operator_from(read_json(cfg.inputs[0]), cfg.inputs[0]);
      const json doc = read_json(cfg.inputs[0]);
      std::string source = "truncated operator";
      std::optional<ClassicalFunction> built;
      if (doc.contains("spec")) {
        // exact symbols of the untruncated operator from the delta kernel
        using E = SU2::Element;
        using Fn = std::function<cplx(const E&)>;
        const auto& sp = doc["spec"];
        const auto type = field_value<std::string>(sp, "type", cfg.inputs[0] + ".spec");
        Fn one = [](const E&) { return cplx(1.0); }, fl = one;
        E left = group.identity(), right = group.identity();
        bool exact = true;
        if (type == "V") left = element_from(group, sp.at("g"), "spec.g");
        else if (type == "Vtilde") right = element_from(group, sp.at("g"), "spec.g");
        else if (type == "mult") {
          auto terms = terms_from(sp["terms"], "spec.terms");
          fl = [terms, this](const E& x) { return evaluate_terms(group, terms, x); };
        } else if (type != "identity")
          exact = false;
        if (exact) {
          const int top = ps.symbol_band();
          const G grp = group;
          built.emplace(
              [grp, fl, one, left, right, top](const E& x) {
                std::vector<Mat> blocks;
                for (int l = 0; l <= top; ++l) blocks.push_back(delta_kernel_symbol<SU2>(grp, fl, left, right, one, x, l));
                return blocks;
              },
              top);
          source = "delta kernel";
        }
      }
      if (!built) built.emplace(ps, a);
      const ClassicalFunction& fn = *built;
      const double jmax = std::sqrt(fn.max_casimir());
      const int n = std::max(cfg.j_grid, 1);
      std::vector<RVec> grid;
      for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
          for (int z = 0; z < n; ++z) {
            auto coord = [&](int i) { return n == 1 ? 0.0 : -jmax + 2 * jmax * i / (n - 1); };
            RVec j(3);
            j << coord(x), coord(y), coord(z);
            if (j.squaredNorm() <= fn.max_casimir()) grid.push_back(j);
          }
      const auto& nodes = ps.symbol_nodes().nodes;
      const std::size_t count = cfg.max_nodes > 0 ? std::min<std::size_t>(cfg.max_nodes, nodes.size()) : nodes.size();
      std::vector<std::vector<cplx>> values(count);
      parallel_for(count, cfg.threads, [&](std::size_t k) {
        auto ex = fn.expansions(nodes[k]);
        for (const auto& j : grid) values[k].push_back(fn.evaluate(ex, j));
      });
      Table t{columns({"node"}, element_columns(group.identity()), {"Jx", "Jy", "Jz", "re", "im"}), {}};
      for (std::size_t k = 0; k < count; ++k)
        for (std::size_t p = 0; p < grid.size(); ++p)
          t.rows.push_back(row({static_cast<int>(k)}, element_cells(nodes[k]),
                               {grid[p](0), grid[p](1), grid[p](2), values[k][p].real(), values[k][p].imag()}));
      json diag = {{"lossy_input", lossy}, {"symbol_source", source}, {"blocks_used", label_json(group, fn.max_label())},
                   {"casimir_max", fn.max_casimir()}};
      if (cfg.format == "json")
        write_output(cfg, render(cfg, provenance(diag), {{"samples", table_json(t)}}, nullptr));
      else
        write_output(cfg, render(cfg, provenance(diag), {}, &t));
      return 0;
    }
  }

  // verification suite

  Mat random_operator(std::mt19937_64& rng) const {
    std::normal_distribution<double> nd;
    const int d = ps.space().dim();
    Mat a(d, d);
    for (int k = 0; k < d * d; ++k) a.data()[k] = cplx(nd(rng), nd(rng));
    return a;
  }

  std::vector<DTerm> random_function(std::mt19937_64& rng, int label) const {
    std::normal_distribution<double> nd;
    std::vector<DTerm> f;
    const int n = group.dim(label);
    for (int m = 0; m < n; ++m)
      for (int k = 0; k < n; ++k) f.push_back({label, m, k, cplx(nd(rng), nd(rng))});
    return f;
  }

  int cmd_verify() {
    std::mt19937_64 rng(cfg.seed);
    const double tol = tolerance();
    Table t{{"identity", "residual", "tolerance", "pass"}, {}};
    bool all = true;
    auto add = [&](const std::string& name, double r, double tl) {
      const bool ok = r <= tl;
      all = all && ok;
      t.rows.push_back({name, r, tl, ok});
    };
    const auto& space = ps.space();
    const auto& nodes = ps.symbol_nodes().nodes;
    const std::size_t stride = std::max<std::size_t>(1, nodes.size() / 6);

    double herm = 0.0;
    for (std::size_t k = 0; k < nodes.size(); k += stride) {
      auto w = ps.phase_points(nodes[k]);
      for (std::size_t j = 0; j < ps.symbol_irreps().size(); ++j) {
        const int n = ps.symbol_irreps()[j].dim, off = ps.label_offset(j);
        for (int m = 0; m < n; ++m)
          for (int mp = 0; mp < n; ++mp)
            herm = std::max(herm, max_abs(w[off + m * n + mp].adjoint() - w[off + mp * n + m]));
      }
    }
    add("adjoint of a phase-point operator swaps its indices", herm, tol);

    {
      PhaseSpaceOptions o = options(cfg, Route::Kernel);
      PhaseSpace<G> other(space, o);
      double diff = 0.0;
      for (std::size_t k = 0; k < nodes.size(); k += stride) {
        auto a = ps.phase_points(nodes[k]);
        auto b = other.phase_points(nodes[k]);
        for (std::size_t s = 0; s < a.size(); ++s) diff = std::max(diff, max_abs(a[s] - b[s]));
      }
      add("phase-point routes agree (principal vs position kernel)", diff, tol);
    }

    double rt = 0.0;
    Mat a0, b0;
    for (int k = 0; k < 3; ++k) {
      Mat a = random_operator(rng);
      if (k == 0) a0 = a;
      if (k == 1) b0 = a;
      rt = std::max(rt, max_abs(ps.reconstruct(ps.symbol(a), ReconstructMode::Dual, cfg.allow_lossy) - a));
    }
    add("symbol round trip through the dual frame", rt, tol);

    auto g0 = group.is_finite() ? nodes[nodes.size() / 2] : nodes[nodes.size() / 3];
    auto cov = ps.covariance_check(a0, g0, 12);
    add("left translation covariance of symbols", cov.first, tol);
    add("right translation covariance of symbols", cov.second, tol);

    {
      Mat v = space.left_regular(g0);
      cplx lhs = (v * a0).trace();
      cplx rhs = ps.trace_pairing(ps.symbol(v), ps.symbol(a0));
      add("trace pairing against a translation", std::abs(lhs - rhs), tol * (1 + std::abs(lhs)));
    }

    {
      auto prod = star(ps, ps.symbol(a0), ps.symbol(b0), StarRoute::Operator, cfg.allow_lossy);
      auto direct = ps.symbol(a0 * b0);
      const double scale = std::max(1.0, max_abs(direct));
      add("star product is the symbol of the operator product", max_abs(prod - direct), tol * scale);
      if (group.is_finite()) {
        try {
          auto kern = StarKernel<G>(ps).contract(ps.symbol(a0), ps.symbol(b0));
          add("star kernel contraction matches the operator route", max_abs(kern - prod), tol * scale);
        } catch (const std::length_error&) {
        }
        auto ti = trace_identity(ps, a0, b0);
        add("trace identity on the multiplicity-free space", ti.residual, tol * (1 + std::abs(ti.operator_side)));
      }
    }

    {
      const int label = group.is_finite() ? group.irreps(0).back().label : group.irreps(1).back().label;
      auto f = random_function(rng, label);
      Mat v = space.left_regular(g0);
      Mat lhs = v * space.multiplication(f).value * v.adjoint();
      auto shifted = expand_function<G>(
          group, [&](const typename G::Element& x) { return evaluate_terms(group, f, group.multiply(group.inverse(g0), x)); },
          group.is_finite() ? 0 : 1, group.haar_quadrature(8));
      add("Weyl relation for translated multiplication operators", max_abs(lhs - space.multiplication(shifted).value),
          tol);
    }

    if constexpr (LieGroup<G>) {
      auto left = space.generators();
      auto right = space.right_generators();
      double comm = 0.0;
      const int n = group.lie_dimension();
      auto c = group.structure_constants();
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s) {
          Mat l = left[r] * left[s] - left[s] * left[r];
          Mat rr = right[r] * right[s] - right[s] * right[r];
          for (int u = 0; u < n; ++u) {
            l -= I * c(u, r * n + s) * left[u];
            rr -= I * c(u, r * n + s) * right[u];
          }
          comm = std::max({comm, max_abs(l), max_abs(rr), max_abs(left[r] * right[s] - right[s] * left[r])});
        }
      add("generator commutation relations", comm, tol);
      add("right generators from left generators via the adjoint matrix", adjoint_relation_residual(space), tol);
    }

    if constexpr (std::is_same_v<G, SU2>) {
      Mat rho = random_operator(rng);
      rho = rho * rho.adjoint();
      rho /= rho.trace();
      double oc = 0.0;
      for (std::size_t k = 0; k < nodes.size(); k += stride * 2) {
        auto blocks = ps.symbol_at(rho, nodes[k]);
        for (std::size_t j = 0; j < ps.symbol_irreps().size() && ps.symbol_irreps()[j].label <= 2; ++j) {
          const int label = ps.symbol_irreps()[j].label;
          Mat wt = ps.overcomplete(rho, nodes[k], label);
          oc = std::max(oc, max_abs(PhaseSpace<G>::contract_overcomplete(wt, label + 1) - blocks[j]));
        }
      }
      add("overcomplete Wigner function contracts to the symbol", oc, tol);
    }

    json diag = {{"checks", t.rows.size()}, {"all_pass", all}};
    if (cfg.format == "csv")
      write_output(cfg, render(cfg, provenance(diag), {}, &t));
    else
      write_output(cfg, render(cfg, provenance(diag), {{"checks", table_json(t)}, {"pass", all}}, nullptr));
    return all ? 0 : 1;
  }

  int cmd_bench() {
    using clock = std::chrono::steady_clock;
    std::mt19937_64 rng(cfg.seed);
    Table t{{"stage", "seconds"}, {}};
    auto time = [&](const std::string& name, auto&& f) {
      auto start = clock::now();
      f();
      t.rows.push_back({name, std::chrono::duration<double>(clock::now() - start).count()});
    };
    Mat a = random_operator(rng), b = random_operator(rng);
    std::optional<PhaseSpace<G>> fresh;
    time("phase space construction", [&] { fresh.emplace(Space<G>(group, band), options(cfg, route)); });
    SymbolField<typename G::Element> fa, fb;
    time("symbol", [&] { fa = fresh->symbol(a); });
    fb = fresh->symbol(b);
    time("frame operator", [&] { fresh->frame_operator(); });
    time("reconstruct", [&] { fresh->reconstruct(fa, ReconstructMode::Dual, true); });
    time("star (operator route)", [&] { star(*fresh, fa, fb, StarRoute::Operator, true); });
    json diag = {{"dim", ps.space().dim()}, {"nodes", ps.symbol_nodes().size()}, {"threads", cfg.threads}};
    if (cfg.format == "csv")
      write_output(cfg, render(cfg, provenance(diag), {}, &t));
    else
      write_output(cfg, render(cfg, provenance(diag), {{"timings", table_json(t)}}, nullptr));
    return 0;
  }

  int run() {
    if (cfg.command == "verify") return cmd_verify();
    if (cfg.command == "wigner") return cmd_wigner();
    if (cfg.command == "symbol") return cmd_symbol();
    if (cfg.command == "star") return cmd_star();
    if (cfg.command == "classical") return cmd_classical();
    if (cfg.command == "bench") return cmd_bench();
    throw UsageError("unknown command");
  }
};

int dispatch(Config cfg, bool group_given, bool band_given) {
  json header;
  if (!cfg.inputs.empty() && (!group_given || !band_given)) {
    header = read_json(cfg.inputs[0]);
    if (!group_given && header.contains("group")) cfg.group = field_value<std::string>(header, "group", cfg.inputs[0]);
    if (!band_given && header.contains("band")) {
      const auto& b = header["band"];
      cfg.band = b.is_string() ? b.get<std::string>() : fmt(b.get<double>());
    }
  }
  if (!header.is_null() && !group_given && cfg.command == "star" && header.contains("symbol_band") && cfg.symbol_band < 0) {
    AnyGroup g = parse_group(cfg.group);
    cfg.symbol_band = std::visit([&](const auto& gg) { return parse_label(gg, header["symbol_band"].get<double>(), "symbol_band"); }, g);
  }
  AnyGroup g = parse_group(cfg.group);
  return std::visit(
      [&](const auto& gg) -> int {
        using G = std::decay_t<decltype(gg)>;
        const int band = parse_band(gg, cfg.band);
        Route route = Route::A;
        if (cfg.command == "star") {
          if (header.contains("route")) route = parse_route(header["route"].get<std::string>());
        } else if (!cfg.route.empty()) {
          try {
            route = parse_route(cfg.route);
          } catch (const std::exception&) {
            throw UsageError("--route expects A, kernel or finite");
          }
        }
        Session<G> s(cfg, gg, band, route);
        return s.run();
      },
      g);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wigner-Weyl phase-space tools for compact groups"};
  app.require_subcommand(1);
  Config cfg;
  bool group_given = false, band_given = false;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--group", cfg.group, "circle, su2, cyclic:n or frobenius21");
    sub->add_option("--band", cfg.band, "band limit (spin j for su2, e.g. 1/2; |m| for circle)");
    sub->add_option("--symbol-band", cfg.symbol_band, "symbol band in the group's native label units");
    sub->add_option("--internal-band", cfg.internal_band, "internal band of the phase-point construction");
    sub->add_option("--principal-degree", cfg.principal_degree, "exactness degree of the principal rule");
    sub->add_option("--tol", cfg.tol, "tolerance override");
    sub->add_option("--route", cfg.route, "A|kernel|finite, or operator|kernel for star");
    sub->add_option("--out", cfg.out, "output file (default stdout)");
    sub->add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--slice", cfg.slice, "j,m,n scalar slice over nodes");
    sub->add_option("--threads", cfg.threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--seed", cfg.seed, "seed for random test operators");
    sub->add_flag("--allow-lossy", cfg.allow_lossy, "permit reconstruction below twice the band");
    sub->add_flag("--diagnostics", cfg.diagnostics, "add round-trip and route residuals");
  };
  auto* verify = app.add_subcommand("verify", "run the identity suite for a group");
  auto* wigner = app.add_subcommand("wigner", "Wigner function and marginals of a state");
  auto* symbol = app.add_subcommand("symbol", "Weyl symbol of an operator");
  auto* starc = app.add_subcommand("star", "star product of two symbol fields");
  auto* classical = app.add_subcommand("classical", "classical phase-space function of an operator (su2)");
  auto* bench = app.add_subcommand("bench", "time the main stages");
  for (auto* s : {verify, wigner, symbol, starc, classical, bench}) add_common(s);
  wigner->add_option("state", cfg.inputs, "state JSON")->required();
  symbol->add_option("operator", cfg.inputs, "operator JSON")->required();
  starc->add_option("fields", cfg.inputs, "two symbol-field JSON files")->required()->expected(2);
  classical->add_option("operator", cfg.inputs, "operator JSON")->required();
  classical->add_option("--j-grid", cfg.j_grid, "grid points per momentum axis");
  classical->add_option("--max-nodes", cfg.max_nodes, "limit on sampled group nodes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  for (auto* s : app.get_subcommands()) {
    cfg.command = s->get_name();
    group_given = s->count("--group") > 0;
    band_given = s->count("--band") > 0;
  }
  try {
    return dispatch(cfg, group_given, band_given);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const BandError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const InsufficientBand& e) {
    std::cerr << "usage error: " << e.what() << " (needs band " << e.required() << "; pass --allow-lossy to override)\n";
    return 2;
  } catch (const UnsupportedOperation& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 3;
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
