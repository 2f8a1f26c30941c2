#pragma once

// JSON specs for symbols, order paths, families, model symbols and multiplier
// models. Every object is checked against its key set before use; unknown keys
// are rejected with the JSON path of the offending field.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "holotrace/core.hpp"
#include "holotrace/families.hpp"
#include "holotrace/oracle.hpp"
#include "holotrace/symbols.hpp"
#include "holotrace/zeta.hpp"
#include "json.hpp"

namespace holotrace::config {

using json = nlohmann::json;

class schema_error : public error {
 public:
  schema_error(const std::string& path, const std::string& what) : error(errc::config, path + ": " + what), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

inline void check_keys(const json& j, const std::string& path, const std::set<std::string>& allowed,
                       const std::set<std::string>& required = {}) {
  if (!j.is_object()) throw schema_error(path, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) throw schema_error(path + "." + it.key(), "unknown field");
  for (auto& r : required)
    if (!j.contains(r)) throw schema_error(path + "." + r, "missing required field");
}

inline double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw schema_error(path, "expected a number");
  return j.get<double>();
}

inline int get_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw schema_error(path, "expected an integer");
  return j.get<int>();
}

inline std::string get_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw schema_error(path, "expected a string");
  return j.get<std::string>();
}

// A complex number is a number or a two-element array [re, im].
inline cplx get_complex(const json& j, const std::string& path) {
  if (j.is_number()) return j.get<double>();
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw schema_error(path, "expected a number or [re, im]");
}

inline json complex_json(cplx c) { return json::array({c.real(), c.imag()}); }

inline std::vector<double> get_reals(const json& j, const std::string& path) {
  if (!j.is_array()) throw schema_error(path, "expected an array of numbers");
  std::vector<double> v;
  for (std::size_t i = 0; i < j.size(); ++i) v.push_back(get_number(j[i], path + "[" + std::to_string(i) + "]"));
  return v;
}

inline std::map<int, cplx> get_mode_map(const json& j, const std::string& path) {
  if (!j.is_object()) throw schema_error(path, "expected an object of integer keys");
  std::map<int, cplx> m;
  for (auto it = j.begin(); it != j.end(); ++it) {
    std::size_t used = 0;
    int k = 0;
    try {
      k = std::stoi(it.key(), &used);
    } catch (...) {
      used = 0;
    }
    if (used != it.key().size() || it.key().empty()) throw schema_error(path + "." + it.key(), "key must be an integer");
    m[k] += get_complex(it.value(), path + "." + it.key());
  }
  return m;
}

// { type: constant | pair | fourier | trig | polynomial, ... }
inline AngularProfile parse_profile(const json& j, int n, const std::string& path) {
  if (j.is_number() || j.is_array()) return AngularProfile::constant(n, get_complex(j, path));
  check_keys(j, path, {"type", "value", "value_plus", "value_minus", "modes", "cos_coeffs", "sin_coeffs", "monomials"}, {"type"});
  std::string kind = get_string(j["type"], path + ".type");
  if (kind == "constant") {
    check_keys(j, path, {"type", "value"}, {"value"});
    return AngularProfile::constant(n, get_complex(j["value"], path + ".value"));
  }
  if (kind == "pair") {
    if (n != 1) throw schema_error(path, "pair profiles need n = 1");
    check_keys(j, path, {"type", "value_plus", "value_minus"}, {"value_plus", "value_minus"});
    return AngularProfile::pair(get_complex(j["value_plus"], path + ".value_plus"),
                                get_complex(j["value_minus"], path + ".value_minus"));
  }
  if (kind == "fourier") {
    if (n != 2) throw schema_error(path, "fourier profiles need n = 2");
    check_keys(j, path, {"type", "modes"}, {"modes"});
    return AngularProfile::fourier(get_mode_map(j["modes"], path + ".modes"));
  }
  if (kind == "trig") {
    if (n != 2) throw schema_error(path, "trig profiles need n = 2");
    check_keys(j, path, {"type", "cos_coeffs", "sin_coeffs"});
    std::vector<double> c = j.contains("cos_coeffs") ? get_reals(j["cos_coeffs"], path + ".cos_coeffs") : std::vector<double>{};
    std::vector<double> s = j.contains("sin_coeffs") ? get_reals(j["sin_coeffs"], path + ".sin_coeffs") : std::vector<double>{};
    return AngularProfile::trig(c, s);
  }
  if (kind == "polynomial") {
    // sum coef * w1^p1 w2^p2 w3^p3 restricted to the sphere.
    check_keys(j, path, {"type", "monomials"}, {"monomials"});
    const json& ms = j["monomials"];
    if (!ms.is_array()) throw schema_error(path + ".monomials", "expected an array");
    std::vector<std::pair<std::array<int, 3>, cplx>> mono;
    for (std::size_t i = 0; i < ms.size(); ++i) {
      std::string p = path + ".monomials[" + std::to_string(i) + "]";
      check_keys(ms[i], p, {"powers", "coef"}, {"powers", "coef"});
      const json& pw = ms[i]["powers"];
      if (!pw.is_array() || static_cast<int>(pw.size()) != n) throw schema_error(p + ".powers", "expected n exponents");
      std::array<int, 3> e{0, 0, 0};
      for (int d = 0; d < n; ++d) {
        e[d] = get_int(pw[d], p + ".powers[" + std::to_string(d) + "]");
        if (e[d] < 0) throw schema_error(p + ".powers", "exponents must be nonnegative");
      }
      mono.push_back({e, get_complex(ms[i]["coef"], p + ".coef")});
    }
    return AngularProfile::general(n, [mono](const Vec& w) {
      cplx s = 0.0;
      for (auto& [e, c] : mono) s += c * std::pow(w[0], e[0]) * std::pow(w[1], e[1]) * std::pow(w[2], e[2]);
      return s;
    }, "polynomial");
  }
  throw schema_error(path + ".type", "unknown profile type '" + kind + "'");
}

inline Cutoff parse_cutoff(const json& j, const std::string& path) {
  if (j.is_string()) {
    std::string s = j.get<std::string>();
    if (s == "psi") return Cutoff::psi();
    if (s == "none") return Cutoff::none();
    throw schema_error(path, "cutoff must be psi, none or an object");
  }
  check_keys(j, path, {"kind", "inner"}, {"kind"});
  std::string k = get_string(j["kind"], path + ".kind");
  if (k == "none") return Cutoff::none();
  if (k != "psi") throw schema_error(path + ".kind", "cutoff kind must be psi or none");
  double inner = j.contains("inner") ? get_number(j["inner"], path + ".inner") : default_cutoff_inner;
  if (!(inner > 0.0 && inner < 1.0)) throw schema_error(path + ".inner", "inner radius must lie in (0, 1)");
  return Cutoff::psi(inner);
}

inline int parse_dimension(const json& j, const std::string& path) {
  int n = get_int(j, path);
  if (n < 1 || n > 3) throw error(errc::dimension_unsupported, path + ": n must be 1, 2 or 3");
  return n;
}

inline ModeProfile parse_mode_profile(const json& profile, const json* x_modes, int n, const std::string& path) {
  AngularProfile p = parse_profile(profile, n, path + ".profile");
  std::map<int, cplx> xc{{0, 1.0}};
  if (x_modes) xc = get_mode_map(*x_modes, path + ".x_modes");
  return ModeProfile::with_xcoeff(p, xc);
}

// { n, order?, terms: [{degree, log?, cutoff?, profile, x_modes?}] }
inline SymbolExpansion parse_symbol(const json& j, const std::string& path = "symbol") {
  check_keys(j, path, {"n", "order", "terms"}, {"n", "terms"});
  int n = parse_dimension(j["n"], path + ".n");
  const json& ts = j["terms"];
  if (!ts.is_array() || ts.empty()) throw schema_error(path + ".terms", "expected a nonempty array");
  std::vector<LogHomogeneousTerm> terms;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    std::string p = path + ".terms[" + std::to_string(i) + "]";
    check_keys(ts[i], p, {"degree", "log", "cutoff", "profile", "x_modes"}, {"degree", "profile"});
    LogHomogeneousTerm t;
    t.degree = get_complex(ts[i]["degree"], p + ".degree");
    t.log_power = ts[i].contains("log") ? get_int(ts[i]["log"], p + ".log") : 0;
    if (t.log_power < 0) throw schema_error(p + ".log", "log power must be nonnegative");
    t.cutoff = ts[i].contains("cutoff") ? parse_cutoff(ts[i]["cutoff"], p + ".cutoff") : Cutoff::psi();
    t.coef = parse_mode_profile(ts[i]["profile"], ts[i].contains("x_modes") ? &ts[i]["x_modes"] : nullptr, n, p);
    terms.push_back(std::move(t));
  }
  cplx order = terms[0].degree;
  for (auto& t : terms)
    if (t.degree.real() > order.real()) order = t.degree;
  if (j.contains("order")) order = get_complex(j["order"], path + ".order");
  SymbolExpansion s(n, order);
  for (auto& t : terms) {
    if ((order - t.degree).real() < -1e-12) throw schema_error(path + ".order", "a term exceeds the declared order");
    s.add_term(t);
  }
  return s;
}

// { kind: affine | moebius | polynomial, ..., offset?, factor? }
inline OrderPath parse_order_path(const json& j, const std::string& path) {
  check_keys(j, path, {"kind", "q", "b", "mu", "coeffs", "offset", "factor"}, {"kind"});
  std::string kind = get_string(j["kind"], path + ".kind");
  OrderPath p;
  if (kind == "affine") {
    check_keys(j, path, {"kind", "q", "b", "offset", "factor"}, {"q"});
    p = OrderPath::affine(get_complex(j["q"], path + ".q"), j.contains("b") ? get_complex(j["b"], path + ".b") : 0.0);
  } else if (kind == "moebius") {
    check_keys(j, path, {"kind", "mu", "offset", "factor"}, {"mu"});
    p = OrderPath::moebius(get_complex(j["mu"], path + ".mu"));
  } else if (kind == "polynomial") {
    check_keys(j, path, {"kind", "coeffs", "offset", "factor"}, {"coeffs"});
    const json& c = j["coeffs"];
    if (!c.is_array() || c.empty()) throw schema_error(path + ".coeffs", "expected a nonempty array");
    std::vector<cplx> v;
    for (std::size_t i = 0; i < c.size(); ++i) v.push_back(get_complex(c[i], path + ".coeffs[" + std::to_string(i) + "]"));
    p = OrderPath::polynomial(v);
  } else {
    throw schema_error(path + ".kind", "unknown order path kind '" + kind + "'");
  }
  cplx off = j.contains("offset") ? get_complex(j["offset"], path + ".offset") : 0.0;
  cplx fac = j.contains("factor") ? get_complex(j["factor"], path + ".factor") : 1.0;
  if (fac == 0.0) throw schema_error(path + ".factor", "factor must be nonzero");
  return p.transformed(off, fac);
}

inline std::optional<KernelData> parse_kernel(const json& j, const std::string& path) {
  check_keys(j, path, {"dimension", "kernel_terms"}, {"dimension"});
  KernelData k;
  k.dimension = get_int(j["dimension"], path + ".dimension");
  if (k.dimension < 0) throw schema_error(path + ".dimension", "must be nonnegative");
  if (j.contains("kernel_terms")) {
    const json& t = j["kernel_terms"];
    if (!t.is_array()) throw schema_error(path + ".kernel_terms", "expected an array");
    for (std::size_t i = 0; i < t.size(); ++i) k.kernel_terms.push_back(get_complex(t[i], path + ".kernel_terms[" + std::to_string(i) + "]"));
  }
  return k;
}

// A model symbol is a symbol spec plus optional theta and kernel fields.
inline EllipticModelSymbol parse_model_symbol(const json& j, const std::string& path = "q") {
  if (!j.is_object()) throw schema_error(path, "expected an object");
  json sym = j;
  double theta = pi;
  std::optional<KernelData> kernel;
  if (sym.contains("theta")) {
    theta = get_number(sym["theta"], path + ".theta");
    sym.erase("theta");
  }
  if (sym.contains("kernel")) {
    kernel = parse_kernel(sym["kernel"], path + ".kernel");
    sym.erase("kernel");
  }
  return EllipticModelSymbol(parse_symbol(sym, path), theta, kernel);
}

inline FamilyDomain parse_domain(const json& j, const std::string& path) {
  check_keys(j, path, {"center", "radius"}, {"center", "radius"});
  FamilyDomain d;
  d.center = get_complex(j["center"], path + ".center");
  d.radius = get_number(j["radius"], path + ".radius");
  if (!(d.radius > 0.0)) throw schema_error(path + ".radius", "radius must be positive");
  return d;
}

// { n?, order?, generator: {kind: direct | power_family, ...}, domain? }
inline HolomorphicFamily parse_family(const json& j, const std::string& path = "family") {
  check_keys(j, path, {"n", "order", "generator", "domain"}, {"generator"});
  FamilyDomain dom;
  if (j.contains("domain")) dom = parse_domain(j["domain"], path + ".domain");
  const json& g = j["generator"];
  std::string gp = path + ".generator";
  check_keys(g, gp, {"kind", "components", "a", "q", "exponent", "depth"}, {"kind"});
  std::string kind = get_string(g["kind"], gp + ".kind");
  if (kind == "direct") {
    check_keys(g, gp, {"kind", "components"}, {"components"});
    if (!j.contains("n") || !j.contains("order")) throw schema_error(path, "direct families need n and order");
    int n = parse_dimension(j["n"], path + ".n");
    OrderPath ord = parse_order_path(j["order"], path + ".order");
    const json& cs = g["components"];
    if (!cs.is_array() || cs.empty()) throw schema_error(gp + ".components", "expected a nonempty array");
    std::vector<ModeProfile> comps;
    for (std::size_t i = 0; i < cs.size(); ++i) {
      std::string p = gp + ".components[" + std::to_string(i) + "]";
      check_keys(cs[i], p, {"profile", "x_modes"}, {"profile"});
      comps.push_back(parse_mode_profile(cs[i]["profile"], cs[i].contains("x_modes") ? &cs[i]["x_modes"] : nullptr, n, p));
    }
    return direct_family(n, ord, comps, dom);
  }
  if (kind == "power_family") {
    check_keys(g, gp, {"kind", "a", "q", "exponent", "depth"}, {"q", "exponent"});
    if (j.contains("order")) throw schema_error(path + ".order", "power families derive their order from a, q and the exponent");
    EllipticModelSymbol q = parse_model_symbol(g["q"], gp + ".q");
    SymbolExpansion a = g.contains("a") ? parse_symbol(g["a"], gp + ".a") : identity_symbol(q.dimension());
    if (j.contains("n") && parse_dimension(j["n"], path + ".n") != q.dimension())
      throw error(errc::dimension_mismatch, path + ".n differs from the dimension of q");
    OrderPath e = parse_order_path(g["exponent"], gp + ".exponent");
    int depth = g.contains("depth") ? get_int(g["depth"], gp + ".depth") : 0;
    if (depth < 0) throw schema_error(gp + ".depth", "depth must be nonnegative");
    return power_family(a, q, e, depth, dom);
  }
  throw schema_error(gp + ".kind", "unknown generator kind '" + kind + "'");
}

inline PolyTail parse_tail(const json& j, const std::string& path) {
  check_keys(j, path, {"degree", "coeffs"}, {"degree", "coeffs"});
  PolyTail t;
  t.degree = get_number(j["degree"], path + ".degree");
  t.coeffs = get_reals(j["coeffs"], path + ".coeffs");
  if (t.coeffs.empty()) throw schema_error(path + ".coeffs", "expected at least one coefficient");
  return t;
}

// { builtin } or { name?, k0, a_small, lambda_small, a_tail?, lambda_tail, bracket? }
inline MultiplierModel parse_model(const json& j, const std::string& path = "model") {
  check_keys(j, path, {"builtin", "name", "k0", "a_small", "lambda_small", "a_tail", "lambda_tail", "bracket"});
  if (j.contains("builtin")) {
    check_keys(j, path, {"builtin"});
    std::string b = get_string(j["builtin"], path + ".builtin");
    if (b == "harmonic") return harmonic_model();
    if (b == "shifted_laplacian") return shifted_laplacian_model();
    if (b == "finite_support") return finite_support_model();
    throw schema_error(path + ".builtin", "unknown builtin model '" + b + "'");
  }
  check_keys(j, path, {"name", "k0", "a_small", "lambda_small", "a_tail", "lambda_tail", "bracket"},
             {"k0", "a_small", "lambda_small", "lambda_tail"});
  MultiplierModel m;
  if (j.contains("name")) m.name = get_string(j["name"], path + ".name");
  m.k0 = get_int(j["k0"], path + ".k0");
  m.a_small = get_reals(j["a_small"], path + ".a_small");
  m.lambda_small = get_reals(j["lambda_small"], path + ".lambda_small");
  if (j.contains("a_tail") && !j["a_tail"].is_null()) m.a_tail = parse_tail(j["a_tail"], path + ".a_tail");
  m.lambda_tail = parse_tail(j["lambda_tail"], path + ".lambda_tail");
  if (j.contains("bracket")) m.bracket = get_string(j["bracket"], path + ".bracket");
  try {
    validate_model(m);
  } catch (const error& e) {
    throw schema_error(path, e.what());
  }
  return m;
}

}  // namespace holotrace::config
