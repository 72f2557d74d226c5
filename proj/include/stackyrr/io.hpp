#pragma once

// JSON input and output for groups, G-sets, bundles, representations, curves,
// divisors and weights. Parsing is strict: unknown keys are rejected and
// every error names the JSON path where it occurred.

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "character.hpp"
#include "cyclotomic.hpp"
#include "errors.hpp"
#include "euler.hpp"
#include "group.hpp"
#include "gset.hpp"
#include "orbicurve.hpp"
#include "rational.hpp"

namespace stackyrr::io {

using Json = nlohmann::ordered_json;

/// A validation error already carrying its JSON path.
class LocatedError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// A JSON value together with its path, for error messages.
class Node {
 public:
  Node(const Json& j, std::string path) : j_(&j), path_(std::move(path)) {}

  const Json& json() const { return *j_; }
  const std::string& path() const { return path_; }

  [[noreturn]] void fail(const std::string& msg) const { throw LocatedError(path_ + ": " + msg); }

  bool is_object() const { return j_->is_object(); }
  bool is_array() const { return j_->is_array(); }
  bool is_string() const { return j_->is_string(); }

  /// Rejects keys outside the allowed set.
  const Node& keys(std::initializer_list<const char*> allowed) const {
    if (!j_->is_object()) fail("expected an object");
    for (auto it = j_->begin(); it != j_->end(); ++it) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || it.key() == a;
      if (!ok) fail("unknown key '" + it.key() + "'");
    }
    return *this;
  }

  bool has(const char* key) const { return j_->is_object() && j_->contains(key); }

  Node at(const char* key) const {
    if (!has(key)) fail(std::string("missing key '") + key + "'");
    return Node((*j_)[key], path_ + "." + key);
  }

  Node at(std::size_t i) const {
    if (!j_->is_array() || i >= j_->size()) fail("missing element " + std::to_string(i));
    return Node((*j_)[i], path_ + "[" + std::to_string(i) + "]");
  }

  std::size_t size() const {
    if (!j_->is_array()) fail("expected an array");
    return j_->size();
  }

  long integer() const {
    if (!j_->is_number_integer()) fail("expected an integer");
    return j_->get<long>();
  }

  int index(long lo, long hi) const {
    long v = integer();
    if (v < lo || v > hi) fail("value " + std::to_string(v) + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return static_cast<int>(v);
  }

  /// An integer, or a decimal string for values beyond 64 bits.
  BigInt big_integer() const {
    if (j_->is_number_integer()) return BigInt(j_->get<long>());
    if (j_->is_string()) {
      BigInt z;
      const std::string text = j_->get<std::string>();
      if (text.empty() || z.set_str(text, 10) != 0) fail("expected a decimal integer, got '" + text + "'");
      return z;
    }
    fail("expected an integer");
  }

  std::string string() const {
    if (!j_->is_string()) fail("expected a string");
    return j_->get<std::string>();
  }

  bool boolean() const {
    if (!j_->is_boolean()) fail("expected true or false");
    return j_->get<bool>();
  }

  std::vector<int> int_list(long lo, long hi) const {
    std::vector<int> out;
    for (std::size_t i = 0; i < size(); ++i) out.push_back(at(i).index(lo, hi));
    return out;
  }

 private:
  const Json* j_;
  std::string path_;
};

/// Runs body, attaching n's path to validation errors raised by the library.
template <class F>
auto located(const Node& n, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const LocatedError&) {
    throw;
  } catch (const ValidationError& e) {
    n.fail(e.what());
  } catch (const DomainError& e) {
    n.fail(e.what());
  }
}

// ---------------------------------------------------------------------------
// Numbers

/// An integer, a "n/d" string, or a ["n", "d"] pair.
inline Rational parse_rational(const Node& n) {
  if (n.json().is_number_integer()) return Rational(n.json().get<long>());
  if (n.is_string()) return located(n, [&] { return stackyrr::parse_rational(n.string()); });
  if (n.is_array() && n.size() == 2) {
    const BigInt num = n.at(std::size_t{0}).big_integer();
    const BigInt den = n.at(std::size_t{1}).big_integer();
    if (den == 0) n.fail("zero denominator");
    return make_rational(num, den);
  }
  n.fail("expected a rational (integer, \"n/d\" or [\"n\", \"d\"])");
}

inline Json rational_json(const Rational& q) {
  Rational c = q;
  c.canonicalize();
  return Json::array({c.get_num().get_str(), c.get_den().get_str()});
}

/// A rational in any of the forms above, or
/// {"conductor": N, "coeffs": [c_0, c_1, ...]} meaning sum c_j zeta_N^j.
inline Cyclo parse_cyclo(const Node& n) {
  if (!n.is_object()) return Cyclo(parse_rational(n));
  n.keys({"conductor", "coeffs"});
  const Node cn = n.at("conductor");
  const int cond = cn.index(1, 1 << 30);
  if (cond > conductor_cap()) throw ResourceError(cn.path() + ": conductor " + std::to_string(cond) + " exceeds the cap");
  const Node c = n.at("coeffs");
  if (c.size() > static_cast<std::size_t>(cond)) c.fail("more coefficients than the conductor");
  std::vector<Rational> coeffs;
  for (std::size_t i = 0; i < c.size(); ++i) coeffs.push_back(parse_rational(c.at(i)));
  return Cyclo::from_power_basis(cond, coeffs);
}

/// The canonical {"conductor": N, "coeffs": [...]} form with phi(N)
/// power-basis coefficients, rationals included.
inline Json cyclo_canonical_json(const Cyclo& z) {
  Json coeffs = Json::array();
  for (const auto& c : z.coeffs()) coeffs.push_back(rational_json(c));
  Json out = Json::object();
  out["conductor"] = z.conductor();
  out["coeffs"] = std::move(coeffs);
  return out;
}

/// Rationals as ["num", "den"], anything else in canonical form.
inline Json cyclo_json(const Cyclo& z) {
  return z.is_rational() ? rational_json(z.rational_value()) : cyclo_canonical_json(z);
}

// ---------------------------------------------------------------------------
// Groups and G-sets

/// "S3", {"preset": "S3"}, {"permutations": [[...], ...]} or
/// {"table": [[...], ...]}.
inline GroupPtr parse_group(const Node& n) {
  if (n.is_string()) return located(n, [&] { return preset_group(n.string()); });
  n.keys({"preset", "permutations", "table"});
  const int forms = n.has("preset") + n.has("permutations") + n.has("table");
  if (forms != 1) n.fail("give exactly one of 'preset', 'permutations', 'table'");
  if (n.has("preset")) {
    const Node p = n.at("preset");
    return located(p, [&] { return preset_group(p.string()); });
  }
  const bool perms = n.has("permutations");
  const Node rows = n.at(perms ? "permutations" : "table");
  std::vector<std::vector<int>> lists;
  for (std::size_t i = 0; i < rows.size(); ++i) lists.push_back(rows.at(i).int_list(0, 1 << 20));
  return located(rows, [&] { return perms ? group_from_permutations(lists) : group_from_table(lists); });
}

/// Named actions: "pt-<group>" (one fixed point), "free-<group>" (left
/// translation), "natural-<group>" (a permutation group on its letters).
inline FiniteGSet preset_gset(const std::string& name) {
  const auto dash = name.find('-');
  const std::string kind = dash == std::string::npos ? "" : name.substr(0, dash);
  if (kind != "pt" && kind != "free" && kind != "natural") throw ValidationError("unknown G-set preset '" + name + "'");
  GroupPtr g = preset_group(name.substr(dash + 1));
  if (kind == "pt") return trivial_action(g, 1);
  if (kind == "free") return coset_action(Subgroup{g, {0}});
  return natural_action(g);
}

/// A preset name, {"preset": name},
/// {"group": ..., "points": s, "action": [[...] per point]} or
/// {"group": ..., "points": s, "generator_action": [[...] per generator]}.
inline FiniteGSet parse_gset(const Node& n) {
  if (n.is_string()) return located(n, [&] { return preset_gset(n.string()); });
  if (n.has("preset")) {
    n.keys({"preset"});
    const Node p = n.at("preset");
    return located(p, [&] { return preset_gset(p.string()); });
  }
  n.keys({"group", "points", "action", "generator_action"});
  GroupPtr g = parse_group(n.at("group"));
  const int s = n.at("points").index(0, 1 << 20);
  if (n.has("action") == n.has("generator_action")) n.fail("give exactly one of 'action', 'generator_action'");
  if (n.has("action")) {
    const Node a = n.at("action");
    if (a.size() != static_cast<std::size_t>(s)) a.fail("expected " + std::to_string(s) + " rows");
    std::vector<int> table;
    for (std::size_t x = 0; x < a.size(); ++x) {
      auto row = a.at(x).int_list(0, s - 1);
      if (static_cast<int>(row.size()) != g->order()) a.at(x).fail("expected " + std::to_string(g->order()) + " entries");
      table.insert(table.end(), row.begin(), row.end());
    }
    return located(a, [&] { return FiniteGSet::make(g, s, table); });
  }
  const Node a = n.at("generator_action");
  std::vector<std::vector<int>> images;
  for (std::size_t i = 0; i < a.size(); ++i) images.push_back(a.at(i).int_list(0, s - 1));
  return located(a, [&] { return FiniteGSet::from_generator_images(g, s, images); });
}

// ---------------------------------------------------------------------------
// Bundles and representations

/// {"gset": ..., "orbit_characters": [{"orbit": i, "values_on_stab_classes": [...]}],
///  "genuine": bool}. Orbits are numbered by their smallest point; the
/// stabilizer is that point's, with classes ordered by smallest element.
inline VirtualEqBundle parse_bundle(const Node& n) {
  n.keys({"gset", "orbit_characters", "genuine"});
  const FiniteGSet x = parse_gset(n.at("gset"));
  const OrbitDecomposition o = orbits(x);
  auto stabs = orbit_stabilizers(x, o);
  const bool genuine = n.has("genuine") && n.at("genuine").boolean();
  std::vector<std::optional<ClassFunction>> chars(o.size());
  const Node list = n.at("orbit_characters");
  for (std::size_t i = 0; i < list.size(); ++i) {
    const Node e = list.at(i);
    e.keys({"orbit", "values_on_stab_classes"});
    const int k = e.at("orbit").index(0, static_cast<long>(o.size()) - 1);
    if (chars[k]) e.at("orbit").fail("orbit " + std::to_string(k) + " given twice");
    const Node vals = e.at("values_on_stab_classes");
    const std::size_t want = stabs[k].group->classes().size();
    if (vals.size() != want) vals.fail("stabilizer of orbit " + std::to_string(k) + " has " + std::to_string(want) + " classes");
    std::vector<Cyclo> v;
    for (std::size_t c = 0; c < want; ++c) v.push_back(parse_cyclo(vals.at(c)));
    chars[k] = ClassFunction{stabs[k].group, std::move(v), genuine};
  }
  std::vector<ClassFunction> out;
  for (std::size_t k = 0; k < chars.size(); ++k) {
    if (!chars[k]) list.fail("no character for orbit " + std::to_string(k));
    out.push_back(std::move(*chars[k]));
  }
  return located(n, [&] { return make_bundle(x, std::move(out)); });
}

inline Matrix<Cyclo> parse_matrix(const Node& n) {
  const std::size_t rows = n.size();
  if (rows == 0) n.fail("empty matrix");
  for (std::size_t i = 0; i < rows; ++i)
    if (n.at(i).size() != rows) n.at(i).fail("matrix must be square with " + std::to_string(rows) + " columns");
  Matrix<Cyclo> m(rows, rows);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < rows; ++j) m(i, j) = parse_cyclo(n.at(i).at(j));
  return m;
}

/// {"group": ..., "generators": [matrix, ...]} with one matrix per group
/// generator.
inline MatrixRep parse_rep(const Node& n) {
  n.keys({"group", "generators"});
  GroupPtr g = parse_group(n.at("group"));
  const Node gens = n.at("generators");
  std::vector<Matrix<Cyclo>> mats;
  for (std::size_t i = 0; i < gens.size(); ++i) mats.push_back(parse_matrix(gens.at(i)));
  return located(gens, [&] { return MatrixRep::from_generators(g, mats); });
}

// ---------------------------------------------------------------------------
// Curves, divisors, weights

/// {"genus": g, "stacky": [{"label": "p1", "order": 2}, ...]}
inline OrbifoldCurve parse_curve(const Node& n) {
  n.keys({"genus", "stacky"});
  const int g = n.at("genus").index(0, 1 << 20);
  std::vector<StackyPoint> pts;
  if (n.has("stacky")) {
    const Node s = n.at("stacky");
    for (std::size_t i = 0; i < s.size(); ++i) {
      const Node p = s.at(i);
      p.keys({"label", "order"});
      pts.push_back({p.at("label").string(), p.at("order").index(2, 1 << 20)});
    }
  }
  return located(n, [&] { return OrbifoldCurve::make(g, pts); });
}

inline Json curve_json(const OrbifoldCurve& c) {
  Json pts = Json::array();
  for (const auto& p : c.stacky()) pts.push_back(Json{{"label", p.label}, {"order", p.order}});
  return Json{{"genus", c.genus()}, {"stacky", std::move(pts)}};
}

/// [{"label": "p1", "num": 1, "den": 2}, ...]; den defaults to 1.
inline FracDivisor parse_divisor(const Node& n, const OrbifoldCurve& c) {
  std::map<std::string, Rational> coeffs;
  for (std::size_t i = 0; i < n.size(); ++i) {
    const Node e = n.at(i);
    e.keys({"label", "num", "den"});
    const std::string label = e.at("label").string();
    if (coeffs.count(label)) e.at("label").fail("label '" + label + "' given twice");
    const BigInt num = e.at("num").big_integer();
    const BigInt den = e.has("den") ? e.at("den").big_integer() : BigInt(1);
    if (den <= 0) e.at("den").fail("denominator must be positive");
    coeffs[label] = make_rational(num, den);
  }
  return located(n, [&] { return FracDivisor::make(c, coeffs); });
}

inline Json divisor_json(const FracDivisor& d) {
  auto number = [](const BigInt& z) { return z.fits_slong_p() ? Json(z.get_si()) : Json(z.get_str()); };
  Json out = Json::array();
  for (const auto& [label, q] : d.coeffs()) {
    out.push_back(Json{{"label", label}, {"num", number(q.get_num())}, {"den", number(q.get_den())}});
  }
  return out;
}

/// Weights over a G-set or a curve: the stratification as given, and the
/// finest stratification carrying the same weight function.
struct WeightsInput {
  std::optional<FiniteGSet> gset;
  std::optional<OrbifoldCurve> curve;
  WeightedStrata strata;
  WeightedStrata finest;
};

inline std::vector<Rational> parse_rational_list(const Node& n) {
  std::vector<Rational> out;
  for (std::size_t i = 0; i < n.size(); ++i) out.push_back(parse_rational(n.at(i)));
  return out;
}

/// G-set form: {"gset": ..., "strata": [[points], ...], "point_weights": [...]}
/// or {"gset": ..., "orbit_weights": [...]}.
/// Curve form: {"curve": ..., "point_strata": [[labels], ...],
/// "point_weights": {label: w}, "open_weight": w}.
inline WeightsInput parse_weights(const Node& n) {
  if (!n.is_object()) n.fail("expected an object");
  WeightsInput out;
  if (n.has("gset")) {
    n.keys({"gset", "strata", "point_weights", "orbit_weights"});
    out.gset = parse_gset(n.at("gset"));
    const FiniteGSet& x = *out.gset;
    if (n.has("orbit_weights")) {
      if (n.has("strata") || n.has("point_weights")) n.fail("'orbit_weights' excludes 'strata' and 'point_weights'");
      const auto weights = parse_rational_list(n.at("orbit_weights"));
      out.strata = located(n, [&] { return gset_orbit_strata(x, weights); });
      out.finest = out.strata;
      return out;
    }
    const auto weights = parse_rational_list(n.at("point_weights"));
    const Node s = n.at("strata");
    std::vector<std::vector<int>> parts;
    for (std::size_t i = 0; i < s.size(); ++i) parts.push_back(s.at(i).int_list(0, x.size() - 1));
    out.strata = located(n, [&] { return gset_strata(x, parts, weights); });
    out.finest = located(n, [&] { return gset_strata(x, orbits(x).orbits, weights); });
    return out;
  }
  n.keys({"curve", "point_strata", "point_weights", "open_weight"});
  out.curve = parse_curve(n.at("curve"));
  std::vector<std::vector<std::string>> parts;
  if (n.has("point_strata")) {
    const Node s = n.at("point_strata");
    for (std::size_t i = 0; i < s.size(); ++i) {
      std::vector<std::string> labels;
      for (std::size_t j = 0; j < s.at(i).size(); ++j) labels.push_back(s.at(i).at(j).string());
      parts.push_back(std::move(labels));
    }
  }
  std::map<std::string, Rational> weights;
  if (n.has("point_weights")) {
    const Node w = n.at("point_weights");
    if (!w.is_object()) w.fail("expected an object mapping labels to weights");
    for (auto it = w.json().begin(); it != w.json().end(); ++it) {
      weights[it.key()] = parse_rational(Node(it.value(), w.path() + "." + it.key()));
    }
  }
  const Rational open = parse_rational(n.at("open_weight"));
  out.strata = located(n, [&] { return curve_strata(*out.curve, parts, weights, open); });
  std::vector<std::vector<std::string>> singletons;
  for (const auto& p : parts)
    for (const auto& l : p) singletons.push_back({l});
  out.finest = located(n, [&] { return curve_strata(*out.curve, singletons, weights, open); });
  return out;
}

}  // namespace stackyrr::io
