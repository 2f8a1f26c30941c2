// holotrace: batch front end. One run = one subcommand over one config; the
// report embeds every resolved parameter and default, and the exit status is
// 0 iff all checks pass (2 schema or config error, 3 check or accuracy
// failure, 1 any other engine error).

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "holotrace/config.hpp"
#include "holotrace/finitepart.hpp"
#include "holotrace/laurent.hpp"
#include "holotrace/oracle.hpp"
#include "holotrace/verify.hpp"
#include "holotrace/zeta.hpp"
#include "json.hpp"

namespace {

using namespace holotrace;
using json = nlohmann::json;
using holotrace::config::schema_error;

constexpr int exit_ok = 0;
constexpr int exit_other = 1;
constexpr int exit_config = 2;
constexpr int exit_check = 3;

// Option values as given on the command line; empty means "not given".
struct Options {
  std::string config_path;
  std::map<std::string, std::string> items;  // symbol, family, a, b, q, model
  std::string z0, K, N, mu, transform, ring_radius, method, geometry, x, M_max, suite, points;
  std::string tol_overrides, out, report = "json";
  int threads = 1;
};

// Flat run config: CLI flags win over keys of --config.
struct RunConfig {
  std::string subcommand;
  json file = json::object();
  std::filesystem::path base;  // directory of the config file; spec paths inside it are relative to it
  const Options* cli = nullptr;

  bool has(const std::string& key) const { return !flag(key).empty() || file.contains(key); }
  std::string flag(const std::string& key) const {
    if (cli->items.count(key)) return cli->items.at(key);
    static const std::map<std::string, std::string Options::*> m{
        {"z0", &Options::z0},       {"K", &Options::K},
        {"N", &Options::N},         {"mu", &Options::mu},
        {"transform", &Options::transform}, {"ring_radius", &Options::ring_radius},
        {"method", &Options::method}, {"geometry", &Options::geometry},
        {"x", &Options::x},         {"M_max", &Options::M_max},
        {"suite", &Options::suite}, {"points", &Options::points}};
    auto it = m.find(key);
    return it == m.end() ? std::string() : cli->*(it->second);
  }
};

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> k{
      {"fp", {"symbol", "N", "mu", "transform", "geometry", "x"}},
      {"laurent", {"family", "z0", "K", "ring_radius", "method", "geometry", "x", "points"}},
      {"zeta", {"a", "q", "z0", "K", "geometry", "x", "ring_radius", "points"}},
      {"det", {"q", "geometry", "x", "ring_radius", "points"}},
      {"defect", {"a", "b", "q", "geometry", "x"}},
      {"oracle", {"model", "z0", "K", "ring_radius", "points", "M_max"}},
      {"verify", {"suite"}}};
  return k;
}

json read_json_text(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw schema_error(what, std::string("malformed JSON: ") + e.what());
  }
}

// A spec argument is inline JSON when it starts with '{', otherwise a path.
json load_spec(const std::string& arg, const std::string& what) {
  std::size_t p = arg.find_first_not_of(" \t\n");
  if (p != std::string::npos && arg[p] == '{') return read_json_text(arg, what);
  std::ifstream in(arg);
  if (!in) throw schema_error(what, "cannot open '" + arg + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return read_json_text(ss.str(), what);
}

json item(const RunConfig& rc, const std::string& key) {
  std::string f = rc.flag(key);
  if (!f.empty()) return load_spec(f, key);
  if (rc.file.contains(key)) {
    const json& v = rc.file[key];
    if (!v.is_string()) return v;
    std::filesystem::path p = v.get<std::string>();
    return load_spec(p.is_relative() ? (rc.base / p).string() : p.string(), key);
  }
  throw schema_error(key, "required for '" + rc.subcommand + "'");
}

// Scalar parameter resolution, recorded in the report.
json param_json(const RunConfig& rc, const std::string& key) {
  std::string f = rc.flag(key);
  if (!f.empty()) return f;  // parsed below from text
  return rc.file.contains(key) ? rc.file[key] : json();
}

double parse_real(const std::string& s, const std::string& key) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw schema_error(key, "expected a number, got '" + s + "'");
  }
}

std::vector<double> parse_list(const std::string& s, const std::string& key) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) v.push_back(parse_real(tok, key));
  return v;
}

std::optional<double> get_real(const RunConfig& rc, const std::string& key) {
  json v = param_json(rc, key);
  if (v.is_null()) return std::nullopt;
  if (v.is_string()) return parse_real(v.get<std::string>(), key);
  return config::get_number(v, key);
}

std::optional<int> get_int(const RunConfig& rc, const std::string& key) {
  json v = param_json(rc, key);
  if (v.is_null()) return std::nullopt;
  if (v.is_string()) {
    double d = parse_real(v.get<std::string>(), key);
    if (d != std::floor(d)) throw schema_error(key, "expected an integer");
    return static_cast<int>(d);
  }
  return config::get_int(v, key);
}

std::optional<cplx> get_cplx(const RunConfig& rc, const std::string& key) {
  json v = param_json(rc, key);
  if (v.is_null()) return std::nullopt;
  if (v.is_string()) {
    auto l = parse_list(v.get<std::string>(), key);
    if (l.size() == 1) return cplx(l[0]);
    if (l.size() == 2) return cplx(l[0], l[1]);
    throw schema_error(key, "expected re or re,im");
  }
  return config::get_complex(v, key);
}

std::optional<std::string> get_str(const RunConfig& rc, const std::string& key) {
  json v = param_json(rc, key);
  if (v.is_null()) return std::nullopt;
  return config::get_string(v, key);
}

// Tolerances: defaults per subcommand, overridable by --tol-overrides k=v,...
struct Tolerances {
  std::map<std::string, double> t;
  double operator[](const std::string& k) const { return t.at(k); }
};

Tolerances resolve_tolerances(const std::string& sub, const std::string& overrides) {
  static const std::map<std::string, std::map<std::string, double>> defaults{
      {"fp", {{"lim_fit_rel", 1e-6}, {"n_independence", 1e-10}, {"rescaling", 1e-8}, {"transform", 1e-8}}},
      {"laurent", {{"coefficient", 1e-6}, {"higher_principal", 1e-8}}},
      {"zeta", {{"coefficient", 1e-6}}},
      {"det", {{"determinant", 1e-7}}},
      {"defect", {{"commutator_defect", 1e-6}, {"local_global", 1e-6}, {"residue_identity", 1e-8}}},
      {"oracle", {{"principal", 1e-8}, {"poisson", 1e-6}}},
      {"verify", {}}};
  Tolerances tol{defaults.at(sub)};
  std::stringstream ss(overrides);
  std::string kv;
  while (std::getline(ss, kv, ',')) {
    if (kv.empty()) continue;
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw schema_error("tol-overrides", "expected key=value, got '" + kv + "'");
    std::string k = kv.substr(0, eq);
    if (!tol.t.count(k)) throw schema_error("tol-overrides." + k, "unknown tolerance for '" + sub + "'");
    double v = parse_real(kv.substr(eq + 1), "tol-overrides." + k);
    if (!(v > 0.0)) throw schema_error("tol-overrides." + k, "tolerance must be positive");
    tol.t[k] = v;
  }
  return tol;
}

json cj(cplx c) { return config::complex_json(c); }

json cvec(const std::vector<cplx>& v) {
  json a = json::array();
  for (auto c : v) a.push_back(cj(c));
  return a;
}

struct Report {
  json body = json::object();
  json checks = json::array();
  json params = json::object();
  // CSV table: header and rows of already formatted cells.
  std::vector<std::string> csv_header;
  std::vector<std::vector<std::string>> csv_rows;

  void check(const std::string& name, double value, double tol, const std::string& relation = "<=") {
    bool pass = std::isfinite(value) && (relation == "<=" ? value <= tol : value >= tol);
    checks.push_back({{"name", name}, {"value", value}, {"tolerance", tol}, {"relation", relation}, {"pass", pass}});
  }
  bool pass() const {
    for (auto& c : checks)
      if (!c["pass"].get<bool>()) return false;
    return true;
  }
};

std::string fmt(double v) {
  std::ostringstream o;
  o << std::setprecision(17) << v;
  return o.str();
}

XEval resolve_geometry(const RunConfig& rc, Report& R, const std::string& default_geometry) {
  std::string g = get_str(rc, "geometry").value_or(default_geometry);
  if (g != "point" && g != "circle") throw schema_error("geometry", "expected point or circle");
  R.params["geometry"] = g;
  if (g == "circle") {
    if (rc.has("x")) throw schema_error("x", "x is only used with geometry point");
    return XEval::circle();
  }
  double x = get_real(rc, "x").value_or(0.0);
  R.params["x"] = x;
  return XEval::at(x);
}

void laurent_rows(Report& R, const std::string& label, const LaurentSeries& L) {
  for (std::size_t j = 0; j < L.principal.size(); ++j)
    R.csv_rows.push_back({label, "b" + std::to_string(j + 1), fmt(L.principal[j].real()), fmt(L.principal[j].imag())});
  for (std::size_t k = 0; k < L.regular.size(); ++k)
    R.csv_rows.push_back({label, "c" + std::to_string(k), fmt(L.regular[k].real()), fmt(L.regular[k].imag())});
}

json laurent_json(const LaurentSeries& L) {
  json j{{"z0", cj(L.z0)}, {"K", L.K}, {"method", L.method}, {"principal", cvec(L.principal)}, {"regular", cvec(L.regular)}};
  if (L.method == "empirical") {
    j["ring_radius"] = L.ring_radius;
    j["points"] = L.points;
    j["fit_residual"] = L.fit_residual;
  }
  return j;
}

// Coefficientwise |analytic - empirical|; missing principal entries count as 0.
json laurent_deltas(const LaurentSeries& A, const LaurentSeries& E, double& max_regular, double& max_b1, double& max_higher) {
  json d{{"principal", json::array()}, {"regular", json::array()}};
  max_regular = max_b1 = max_higher = 0.0;
  std::size_t P = std::max(A.principal.size(), E.principal.size());
  for (std::size_t j = 0; j < P; ++j) {
    cplx a = j < A.principal.size() ? A.principal[j] : 0.0, e = j < E.principal.size() ? E.principal[j] : 0.0;
    double v = std::abs(a - e);
    d["principal"].push_back(v);
    (j == 0 ? max_b1 : max_higher) = std::max(j == 0 ? max_b1 : max_higher, v);
  }
  for (std::size_t k = 0; k < std::min(A.regular.size(), E.regular.size()); ++k) {
    double v = std::abs(A.regular[k] - E.regular[k]);
    d["regular"].push_back(v);
    max_regular = std::max(max_regular, v);
  }
  return d;
}

void run_fp(const RunConfig& rc, const Tolerances& tol, Report& R) {
  json spec = item(rc, "symbol");
  SymbolExpansion s = config::parse_symbol(spec, "symbol");
  XEval xe = resolve_geometry(rc, R, "point");
  int N = get_int(rc, "N").value_or(default_N(s));
  R.params["N"] = N;
  FinitePartResult fr = asymptotic_expansion(s, N, xe);
  R.body["finite_part"] = cj(fr.finite_part);
  R.body["N_used"] = fr.N_used;
  R.body["quad_error_estimate"] = fr.quad_error_estimate;
  json table = json::array();
  for (auto& e : fr.divergence_table) {
    table.push_back({{"j", e.j}, {"power", cj(e.power)}, {"log_exponent", e.log_exponent}, {"pure_log", e.pure_log},
                     {"coefficient", cj(e.coefficient)}});
    R.csv_rows.push_back({std::to_string(e.j), fmt(e.power.real()), fmt(e.power.imag()), std::to_string(e.log_exponent),
                          e.pure_log ? "1" : "0", fmt(e.coefficient.real()), fmt(e.coefficient.imag())});
  }
  R.csv_header = {"j", "power_re", "power_im", "log_exponent", "pure_log", "coef_re", "coef_im"};
  R.body["divergence_table"] = table;
  R.body["residue"] = cj(residue_density(s, xe));
  json lr = json::array();
  for (int l = 0; l <= s.log_degree(); ++l) lr.push_back(cj(log_residue(s, l, xe)));
  R.body["log_residues"] = lr;

  LimFit fit = lim_fit(s, 1.0, xe);
  double rel = std::abs(fr.finite_part - fit.constant) / std::max(1.0, std::abs(fit.constant));
  R.body["oracle"] = {{"lim_fit", cj(fit.constant)}, {"radii", fit.radii}, {"columns", fit.columns}, {"delta_rel", rel}};
  R.check("fp_vs_lim_fit_rel", rel, tol["lim_fit_rel"]);

  cplx f0 = finite_part_integral(s, N, xe, TailIntegration::quadrature);
  double dn = 0.0;
  for (int k = 1; k <= 2; ++k) dn = std::max(dn, std::abs(f0 - finite_part_integral(s, N + k, xe, TailIntegration::quadrature)));
  R.body["n_independence"] = {{"N", {N, N + 1, N + 2}}, {"max_delta", dn}};
  R.check("n_independence", dn, tol["n_independence"]);

  if (auto mu = get_real(rc, "mu")) {
    if (!(*mu > 0.0)) throw schema_error("mu", "must be positive");
    R.params["mu"] = *mu;
    cplx closed = rescaled_finite_part(s, *mu, xe);
    cplx fitted = lim_fit(s, *mu, xe).constant;
    R.body["rescaling"] = {{"mu", *mu}, {"closed_form", cj(closed)}, {"lim_fit", cj(fitted)}, {"delta", std::abs(closed - fitted)}};
    R.check("rescaling_vs_lim_fit", std::abs(closed - fitted), tol["rescaling"]);
  }
  if (rc.has("transform")) {
    json tv = param_json(rc, "transform");
    std::vector<double> e = tv.is_string() ? parse_list(tv.get<std::string>(), "transform") : config::get_reals(tv, "transform");
    int n = s.dimension();
    if (static_cast<int>(e.size()) != n * n) throw schema_error("transform", "expected n*n row-major entries");
    std::array<double, 9> a{};
    std::copy(e.begin(), e.end(), a.begin());
    LinearMap C = LinearMap::from_rows(n, a);
    R.params["transform"] = e;
    cplx closed = transform_finite_part(s, C, xe), direct = transform_finite_part_direct(s, C, xe);
    R.body["transform"] = {{"closed_form", cj(closed)}, {"pullback", cj(direct)}, {"delta", std::abs(closed - direct)}};
    R.check("transform_closed_vs_pullback", std::abs(closed - direct), tol["transform"]);
  }
}

void run_laurent(const RunConfig& rc, const Tolerances& tol, Report& R, int threads) {
  HolomorphicFamily F = config::parse_family(item(rc, "family"), "family");
  XEval xe = resolve_geometry(rc, R, "point");
  cplx z0 = get_cplx(rc, "z0").value_or(0.0);
  int K = get_int(rc, "K").value_or(default_laurent_K);
  std::string method = get_str(rc, "method").value_or("both");
  if (method != "analytic" && method != "empirical" && method != "both")
    throw schema_error("method", "expected analytic, empirical or both");
  if (K < 0 || K > default_laurent_K) throw schema_error("K", "K must lie in 0.." + std::to_string(default_laurent_K));
  int points = get_int(rc, "points").value_or(default_ring_points);
  double r = get_real(rc, "ring_radius").value_or(0.0);
  R.params.update({{"z0", cj(z0)}, {"K", K}, {"method", method}, {"points", points}});
  auto P = pole_set(F, z0, 1e-6);
  R.body["z0_in_P"] = !P.empty();
  R.body["order_path"] = F.order.kind_name();
  R.csv_header = {"method", "coefficient", "re", "im"};
  std::optional<LaurentSeries> A, E;
  if (method != "empirical") {
    A = laurent_expansion(F, z0, K, xe);
    R.body["analytic"] = laurent_json(*A);
    laurent_rows(R, "analytic", *A);
  }
  if (method != "analytic") {
    if (r <= 0.0) r = default_ring_radius(F, z0);
    R.params["ring_radius"] = r;
    E = empirical_laurent(F, z0, K, r, points, xe, threads);
    R.body["empirical"] = laurent_json(*E);
    laurent_rows(R, "empirical", *E);
  }
  if (A && E) {
    double mr, mb, mh;
    R.body["deltas"] = laurent_deltas(*A, *E, mr, mb, mh);
    R.check("c_k_analytic_vs_empirical", mr, tol["coefficient"]);
    R.check("b1_analytic_vs_empirical", mb, tol["coefficient"]);
    R.check("higher_principal_vanish", mh, tol["higher_principal"]);
  }
}

void run_zeta(const RunConfig& rc, const Tolerances& tol, Report& R, int threads) {
  EllipticModelSymbol q = config::parse_model_symbol(item(rc, "q"), "q");
  SymbolExpansion a = rc.has("a") ? config::parse_symbol(item(rc, "a"), "a") : identity_symbol(q.dimension());
  XEval xe = resolve_geometry(rc, R, "point");
  cplx z0 = get_cplx(rc, "z0").value_or(0.0);
  int K = get_int(rc, "K").value_or(1);
  if (K < 0 || K > default_laurent_K) throw schema_error("K", "K must lie in 0.." + std::to_string(default_laurent_K));
  int points = get_int(rc, "points").value_or(default_ring_points);
  R.params.update({{"z0", cj(z0)}, {"K", K}, {"points", points}, {"depth", default_depth(q.dimension())}});
  LaurentSeries A = z0 == cplx(0.0) ? zeta_at_zero(a, q, K, xe) : zeta_laurent(a, q, z0, K, xe);
  auto F = power_family(a, q, zeta_exponent());
  double r = get_real(rc, "ring_radius").value_or(default_ring_radius(F, z0));
  R.params["ring_radius"] = r;
  LaurentSeries E = empirical_laurent(F, z0, K, r, points, xe, threads);
  if (z0 == cplx(0.0) && q.kernel())
    for (int k = 0; k <= K && k < static_cast<int>(q.kernel()->kernel_terms.size()); ++k)
      E.regular[k] -= (k % 2 == 0 ? 1.0 : -1.0) * q.kernel()->kernel_terms[k];
  R.body["order"] = cj(q.order());
  R.body["analytic"] = laurent_json(A);
  R.body["oracle"] = laurent_json(E);
  R.csv_header = {"method", "coefficient", "re", "im"};
  laurent_rows(R, "analytic", A);
  laurent_rows(R, "empirical", E);
  double mr, mb, mh;
  R.body["deltas"] = laurent_deltas(A, E, mr, mb, mh);
  R.check("c_k_analytic_vs_contour", mr, tol["coefficient"]);
  R.check("residue_analytic_vs_contour", mb, tol["coefficient"]);
}

void run_det(const RunConfig& rc, const Tolerances& tol, Report& R, int threads) {
  EllipticModelSymbol q = config::parse_model_symbol(item(rc, "q"), "q");
  XEval xe = resolve_geometry(rc, R, "point");
  int points = get_int(rc, "points").value_or(default_ring_points);
  LogDetResult d = log_det(q, xe);
  auto F = power_family(identity_symbol(q.dimension()), q, zeta_exponent());
  double r = get_real(rc, "ring_radius").value_or(default_ring_radius(F, 0.0));
  R.params.update({{"points", points}, {"ring_radius", r}, {"depth", default_depth(q.dimension())}});
  LaurentSeries E = empirical_laurent(F, 0.0, 1, r, points, xe, threads);
  cplx oracle = -E.regular[1];
  if (q.kernel() && q.kernel()->kernel_terms.size() > 1) oracle -= q.kernel()->kernel_terms[1];
  R.body["log_det"] = cj(d.value);
  R.body["branch"] = d.branch;
  R.body["general"] = cj(d.general);
  R.body["tr_log"] = cj(d.tr_log);
  R.body["residue_term"] = cj(d.residue_term);
  R.body["oracle"] = {{"minus_zeta_prime_0", cj(oracle)}, {"ring", laurent_json(E)}};
  R.body["delta"] = std::abs(d.general - oracle);
  R.csv_header = {"quantity", "re", "im"};
  for (auto& [k, v] : std::vector<std::pair<std::string, cplx>>{
           {"log_det", d.value}, {"general", d.general}, {"tr_log", d.tr_log}, {"residue_term", d.residue_term}, {"oracle", oracle}})
    R.csv_rows.push_back({k, fmt(v.real()), fmt(v.imag())});
  R.check("log_det_vs_minus_zeta_prime", std::abs(d.general - oracle), tol["determinant"]);
}

void run_defect(const RunConfig& rc, const Tolerances& tol, Report& R) {
  SymbolExpansion a = config::parse_symbol(item(rc, "a"), "a");
  SymbolExpansion b = config::parse_symbol(item(rc, "b"), "b");
  EllipticModelSymbol q = config::parse_model_symbol(item(rc, "q"), "q");
  XEval xe = resolve_geometry(rc, R, "circle");
  int depth = default_depth(q.dimension());
  R.params["depth"] = depth;
  cplx cd = commutator_defect(a, b, q, depth, xe);
  TraceDefect td = trace_defect(a, b, q, depth, xe);
  R.body["commutator_defect"] = cj(cd);
  R.body["trace_defect"] = {{"local", cj(td.local)}, {"global", cj(td.global)}, {"res_bracket", cj(td.res_bracket)},
                            {"res_combined", cj(td.res_combined)}, {"res_a_blog", cj(td.res_a_blog)},
                            {"tr_commutator", cj(td.tr_commutator)}};
  R.csv_header = {"quantity", "re", "im"};
  R.csv_rows.push_back({"commutator_defect", fmt(cd.real()), fmt(cd.imag())});
  R.csv_rows.push_back({"local", fmt(td.local.real()), fmt(td.local.imag())});
  R.csv_rows.push_back({"global", fmt(td.global.real()), fmt(td.global.imag())});
  R.check("commutator_defect", std::abs(cd), tol["commutator_defect"]);
  R.check("trace_defect_local_vs_global", std::abs(td.local - td.global), tol["local_global"]);
  R.check("residue_identity", std::abs(td.res_bracket - td.res_combined), tol["residue_identity"]);
}

void run_oracle(const RunConfig& rc, const Tolerances& tol, Report& R, int threads) {
  MultiplierModel m = config::parse_model(item(rc, "model"), "model");
  cplx z0 = get_cplx(rc, "z0").value_or(1.0);
  int K = get_int(rc, "K").value_or(1);
  if (K < 0 || K > default_laurent_K) throw schema_error("K", "K must lie in 0.." + std::to_string(default_laurent_K));
  int points = get_int(rc, "points").value_or(default_ring_points);
  double r = get_real(rc, "ring_radius").value_or(multiplier_ring_radius(m, z0));
  int M = get_int(rc, "M_max").value_or(64);
  R.params.update({{"z0", cj(z0)}, {"K", K}, {"points", points}, {"ring_radius", r}, {"M_max", M},
                   {"depth", model_depth(m)}, {"geometry", "circle"}});
  LaurentSeries S = spectral_laurent(m, z0, K, r, points, threads);
  HolomorphicFamily F = model_family(m);
  LaurentSeries Y = contour_laurent([&](cplx z) { return symbol_zeta(F, z); }, z0, K, r, points, 3, threads);
  R.body["model"] = m.name;
  R.body["spectral"] = laurent_json(S);
  R.body["symbol"] = laurent_json(Y);
  R.csv_header = {"coefficient", "spectral_re", "spectral_im", "symbol_re", "symbol_im"};
  for (std::size_t j = 0; j < S.principal.size(); ++j)
    R.csv_rows.push_back({"b" + std::to_string(j + 1), fmt(S.principal[j].real()), fmt(S.principal[j].imag()),
                          fmt(Y.principal[j].real()), fmt(Y.principal[j].imag())});
  for (std::size_t k = 0; k < S.regular.size(); ++k)
    R.csv_rows.push_back({"c" + std::to_string(k), fmt(S.regular[k].real()), fmt(S.regular[k].imag()),
                          fmt(Y.regular[k].real()), fmt(Y.regular[k].imag())});
  double pp = 0.0;
  for (std::size_t j = 0; j < S.principal.size(); ++j) pp = std::max(pp, std::abs(S.principal[j] - Y.principal[j]));
  json dc = json::array();
  for (std::size_t k = 0; k < S.regular.size(); ++k) dc.push_back(cj(S.regular[k] - Y.regular[k]));
  R.body["principal_delta"] = pp;
  R.body["regular_difference"] = dc;
  R.check("principal_spectral_vs_symbol", pp, tol["principal"]);
  // Poisson summation: spectral sum minus the integral of the smooth extension
  // equals the nonzero-frequency sum, checked where both converge.
  double sigma = m.a_tail ? (m.lambda_tail.degree * z0 - m.a_tail->degree).real() : 0.0;
  if (m.a_tail && sigma > 1.0) {
    PoissonResult P = poisson_correction(m, z0, M);
    cplx Z = multiplier_zeta(m, z0);
    double dp = std::abs((Z - P.integral) - P.value);
    R.body["poisson"] = {{"sum", cj(P.value)}, {"integral", cj(P.integral)}, {"half_delta", std::abs(P.half_delta)},
                         {"tail_bound", P.tail_bound}, {"M_used", P.M_used}, {"spectral_minus_integral", cj(Z - P.integral)},
                         {"delta", dp}};
    R.check("poisson_accounts_for_discrepancy", dp, tol["poisson"]);
  } else {
    R.body["poisson"] = {{"evaluated", false}, {"reason", "requires Re(d z0 - d_a) > 1 and a tail for a"}};
  }
}

void run_verify(const RunConfig& rc, Report& R, int threads) {
  std::string suite = get_str(rc, "suite").value_or("core");
  if (suite != "core") throw schema_error("suite", "only the core suite exists");
  R.params["suite"] = suite;
  auto results = verify::core_suite(threads);
  json crit = json::array();
  R.csv_header = {"criterion", "check", "value", "tolerance", "relation", "pass"};
  for (auto& c : results) {
    json checks = json::array();
    for (auto& k : c.checks) {
      checks.push_back({{"name", k.name}, {"value", k.value}, {"tolerance", k.tolerance}, {"relation", k.relation}, {"pass", k.pass}});
      R.csv_rows.push_back({c.id, k.name, fmt(k.value), fmt(k.tolerance), k.relation, k.pass ? "1" : "0"});
    }
    json cj_{{"id", c.id}, {"title", c.title}, {"pass", c.pass()}, {"checks", checks}};
    if (!c.error.empty()) cj_["error"] = c.error;
    crit.push_back(cj_);
    const verify::Check* w = c.worst();
    R.checks.push_back({{"name", c.id}, {"value", w ? w->value : 0.0}, {"tolerance", w ? w->tolerance : 0.0},
                        {"relation", w ? w->relation : "<="}, {"pass", c.pass()}});
  }
  R.body["criteria"] = crit;
}

std::string utc_timestamp() {
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string o = "\"";
  for (char c : s) o += c == '"' ? std::string("\"\"") : std::string(1, c);
  return o + "\"";
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(out);
  if (!f) throw error(errc::config, "cannot write '" + out + "'");
  f << text;
}

std::string render(const json& doc, const Report& R, const std::string& format) {
  if (format == "json") return doc.dump(2) + "\n";
  std::ostringstream o;
  o << "# engine_version=" << engine_version << " subcommand=" << doc["subcommand"].get<std::string>()
    << " status=" << doc["status"].get<std::string>() << " params=" << doc["params"].dump() << "\n";
  for (std::size_t i = 0; i < R.csv_header.size(); ++i) o << (i ? "," : "") << csv_escape(R.csv_header[i]);
  o << "\n";
  for (auto& row : R.csv_rows) {
    for (std::size_t i = 0; i < row.size(); ++i) o << (i ? "," : "") << csv_escape(row[i]);
    o << "\n";
  }
  return o.str();
}

int exit_code_for(const error& e) {
  switch (e.code()) {
    case errc::config:
    case errc::dimension_unsupported:
    case errc::dimension_mismatch: return exit_config;
    case errc::accuracy: return exit_check;
    default: return exit_other;
  }
}

json error_json(const std::string& sub, const std::string& kind, const std::string& msg, int code) {
  return {{"engine_version", engine_version}, {"subcommand", sub}, {"status", "error"},
          {"error", {{"kind", kind}, {"message", msg}, {"exit_code", code}}}};
}

int run(const std::string& sub, const Options& opt) {
  RunConfig rc;
  rc.subcommand = sub;
  rc.cli = &opt;
  Report R;
  bool parsing = true;  // errors before computation starts are config errors
  try {
    if (opt.report != "json" && opt.report != "csv") throw schema_error("report", "expected json or csv");
    if (opt.threads < 1) throw schema_error("threads", "must be at least 1");
    if (!opt.config_path.empty()) {
      rc.file = load_spec(opt.config_path, "config");
      if (opt.config_path.find_first_not_of(" \t\n") != std::string::npos && opt.config_path[opt.config_path.find_first_not_of(" \t\n")] != '{')
        rc.base = std::filesystem::path(opt.config_path).parent_path();
      if (!rc.file.is_object()) throw schema_error("config", "expected an object");
      if (rc.file.contains("subcommand")) {
        if (config::get_string(rc.file["subcommand"], "config.subcommand") != sub)
          throw schema_error("config.subcommand", "config is for '" + rc.file["subcommand"].get<std::string>() + "'");
        rc.file.erase("subcommand");
      }
      std::set<std::string> allowed = allowed_keys().at(sub);
      allowed.insert("tolerances");
      config::check_keys(rc.file, "config", allowed);
    }
    for (auto& [k, v] : opt.items)
      if (!allowed_keys().at(sub).count(k)) throw schema_error(k, "not used by '" + sub + "'");
    for (auto& k : {"z0", "K", "N", "mu", "transform", "ring_radius", "method", "geometry", "x", "M_max", "suite", "points"})
      if (!rc.flag(k).empty() && !allowed_keys().at(sub).count(k)) throw schema_error(k, "not used by '" + sub + "'");
    std::string overrides = opt.tol_overrides;
    if (rc.file.contains("tolerances")) {
      const json& t = rc.file["tolerances"];
      if (!t.is_object()) throw schema_error("config.tolerances", "expected an object");
      std::string joined;
      for (auto it = t.begin(); it != t.end(); ++it)
        joined += it.key() + "=" + fmt(config::get_number(it.value(), "config.tolerances." + it.key())) + ",";
      overrides = joined + overrides;  // CLI entries come last and win
    }
    Tolerances tol = resolve_tolerances(sub, overrides);
    R.params["threads"] = opt.threads;
    R.params["tolerances"] = tol.t;
    parsing = false;
    // Spec parsing inside the runners still signals schema errors through
    // errc::config, so the exit code stays 2 for those.
    if (sub == "fp") run_fp(rc, tol, R);
    else if (sub == "laurent") run_laurent(rc, tol, R, opt.threads);
    else if (sub == "zeta") run_zeta(rc, tol, R, opt.threads);
    else if (sub == "det") run_det(rc, tol, R, opt.threads);
    else if (sub == "defect") run_defect(rc, tol, R);
    else if (sub == "oracle") run_oracle(rc, tol, R, opt.threads);
    else run_verify(rc, R, opt.threads);
  } catch (const error& e) {
    int code = parsing ? exit_config : exit_code_for(e);
    std::string kind = code == exit_config ? "schema" : (code == exit_check ? "accuracy" : "engine");
    json doc = error_json(sub, kind, e.what(), code);
    std::cerr << doc.dump() << "\n";
    return code;
  }
  json doc{{"engine_version", engine_version}, {"timestamp", utc_timestamp()}, {"subcommand", sub},
           {"params", R.params}, {"results", R.body}, {"checks", R.checks}};
  bool pass = R.pass();
  doc["status"] = pass ? "pass" : "fail";
  emit(render(doc, R, opt.report), opt.out);
  return pass ? exit_ok : exit_check;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"holotrace: finite-part integrals, Laurent data and zeta invariants of log-polyhomogeneous symbols"};
  app.require_subcommand(1, 1);
  app.fallthrough();  // global flags may follow the subcommand
  Options opt;
  app.add_option("--tol-overrides", opt.tol_overrides, "Comma-separated key=value tolerance overrides");
  app.add_option("--threads", opt.threads, "Worker threads for ring evaluations")->capture_default_str();
  app.add_option("--out", opt.out, "Report path (default stdout)");
  app.add_option("--report", opt.report, "Report format: json or csv")->capture_default_str();

  auto add_common = [&](CLI::App* s) {
    s->add_option("--config", opt.config_path, "Run config (JSON file or inline object)");
  };
  auto add_item = [&](CLI::App* s, const std::string& key, const std::string& help) {
    s->add_option("--" + key, opt.items[key], help + " (JSON file or inline object)");
  };
  std::vector<std::pair<std::string, CLI::App*>> subs;

  auto* fp = app.add_subcommand("fp", "Finite-part integral, divergence table and residues of a symbol");
  add_common(fp);
  add_item(fp, "symbol", "Symbol spec");
  fp->add_option("--N", opt.N, "Truncation order (default: smallest admissible)");
  fp->add_option("--mu", opt.mu, "Rescaling factor for the rescaling law");
  fp->add_option("--transform", opt.transform, "Row-major matrix entries for the transformation rule");
  fp->add_option("--geometry", opt.geometry, "point (default) or circle");
  fp->add_option("--x", opt.x, "x at which x-modes are evaluated (geometry point)");
  subs.push_back({"fp", fp});

  auto* la = app.add_subcommand("laurent", "Laurent data of fp int sigma(z) at z0");
  add_common(la);
  add_item(la, "family", "Holomorphic family spec");
  la->add_option("--z0", opt.z0, "Expansion point re[,im]");
  la->add_option("--K", opt.K, "Highest regular coefficient");
  la->add_option("--ring-radius", opt.ring_radius, "Contour radius (default: a quarter of the pole gap)");
  la->add_option("--points", opt.points, "Contour nodes");
  la->add_option("--method", opt.method, "analytic, empirical or both");
  la->add_option("--geometry", opt.geometry, "point (default) or circle");
  la->add_option("--x", opt.x, "x for geometry point");
  subs.push_back({"laurent", la});

  auto* ze = app.add_subcommand("zeta", "Laurent data of TR(A Q^{-z}) at z0");
  add_common(ze);
  add_item(ze, "a", "Symbol spec of A (default identity)");
  add_item(ze, "q", "Model symbol spec of Q");
  ze->add_option("--z0", opt.z0, "Expansion point re[,im]");
  ze->add_option("--K", opt.K, "Highest regular coefficient");
  ze->add_option("--ring-radius", opt.ring_radius, "Contour radius of the oracle");
  ze->add_option("--points", opt.points, "Contour nodes");
  ze->add_option("--geometry", opt.geometry, "point (default) or circle");
  ze->add_option("--x", opt.x, "x for geometry point");
  subs.push_back({"zeta", ze});

  auto* de = app.add_subcommand("det", "Zeta-regularized log determinant of Q");
  add_common(de);
  add_item(de, "q", "Model symbol spec of Q");
  de->add_option("--ring-radius", opt.ring_radius, "Contour radius of the oracle");
  de->add_option("--points", opt.points, "Contour nodes");
  de->add_option("--geometry", opt.geometry, "point (default) or circle");
  de->add_option("--x", opt.x, "x for geometry point");
  subs.push_back({"det", de});

  auto* df = app.add_subcommand("defect", "Commutator and trace defects of A, B with respect to Q");
  add_common(df);
  add_item(df, "a", "Symbol spec of A");
  add_item(df, "b", "Symbol spec of B");
  add_item(df, "q", "Model symbol spec of Q");
  df->add_option("--geometry", opt.geometry, "circle (default) or point");
  df->add_option("--x", opt.x, "x for geometry point");
  subs.push_back({"defect", df});

  auto* orc = app.add_subcommand("oracle", "Spectral vs symbol Laurent tables of a circle multiplier");
  add_common(orc);
  add_item(orc, "model", "Multiplier model spec");
  orc->add_option("--z0", opt.z0, "Expansion point re[,im]");
  orc->add_option("--K", opt.K, "Highest regular coefficient");
  orc->add_option("--ring-radius", opt.ring_radius, "Contour radius");
  orc->add_option("--points", opt.points, "Contour nodes");
  orc->add_option("--M-max", opt.M_max, "Largest Poisson frequency");
  subs.push_back({"oracle", orc});

  auto* ve = app.add_subcommand("verify", "Run a verification suite");
  add_common(ve);
  ve->add_option("--suite", opt.suite, "Suite name (core)");
  subs.push_back({"verify", ve});

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_config;
  }
  // Items not given stay empty strings and fall back to the config file.
  for (auto it = opt.items.begin(); it != opt.items.end();) it = it->second.empty() ? opt.items.erase(it) : std::next(it);
  for (auto& [name, s] : subs)
    if (s->parsed()) {
      try {
        return run(name, opt);
      } catch (const std::exception& e) {
        std::cerr << error_json(name, "engine", e.what(), exit_other).dump() << "\n";
        return exit_other;
      }
    }
  return exit_other;
}
