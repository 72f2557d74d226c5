#pragma once

// Orbifold curves: a coarse curve of genus g with stacky points of orders
// r_i, and fractional divisors with coefficients in (1/r_i)Z at those points.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cyclotomic.hpp"
#include "errors.hpp"
#include "rational.hpp"

namespace stackyrr {

struct StackyPoint {
  std::string label;
  int order = 2;

  friend bool operator==(const StackyPoint&, const StackyPoint&) = default;
};

class OrbifoldCurve {
 public:
  /// Label of the ordinary point carrying the integral part of the canonical
  /// divisor; reserved, so it can never name a stacky point.
  static constexpr const char* kAnchor = "@anchor";

  static OrbifoldCurve make(int genus, std::vector<StackyPoint> stacky) {
    if (genus < 0) throw ValidationError("genus must be non-negative, got " + std::to_string(genus));
    std::set<std::string> labels;
    for (const auto& p : stacky) {
      if (p.order < 2) throw ValidationError("stacky point '" + p.label + "' has order " + std::to_string(p.order) + " < 2");
      if (p.label.empty() || p.label == kAnchor) throw ValidationError("invalid stacky label '" + p.label + "'");
      if (!labels.insert(p.label).second) throw ValidationError("duplicate stacky label '" + p.label + "'");
    }
    OrbifoldCurve c;
    c.genus_ = genus;
    c.stacky_ = std::move(stacky);
    return c;
  }

  int genus() const { return genus_; }
  const std::vector<StackyPoint>& stacky() const { return stacky_; }

  /// Order of the stacky point with this label, or nullopt for ordinary points.
  std::optional<int> order_of(const std::string& label) const {
    for (const auto& p : stacky_)
      if (p.label == label) return p.order;
    return std::nullopt;
  }

  friend bool operator==(const OrbifoldCurve&, const OrbifoldCurve&) = default;

 private:
  int genus_ = 0;
  std::vector<StackyPoint> stacky_;
};

class FracDivisor {
 public:
  /// Checks that the coefficient at a stacky point of order r lies in (1/r)Z
  /// and every other coefficient is an integer. Zero coefficients are dropped.
  static FracDivisor make(const OrbifoldCurve& curve, const std::map<std::string, Rational>& coeffs) {
    FracDivisor d(curve);
    for (const auto& [label, c] : coeffs) {
      if (label.empty()) throw ValidationError("empty divisor label");
      auto r = curve.order_of(label);
      Rational q = c;
      q.canonicalize();
      if (r) {
        if (*r % q.get_den() != 0) {
          throw ValidationError("coefficient " + to_string(q) + " at '" + label + "' is not in (1/" + std::to_string(*r) + ")Z");
        }
      } else if (q.get_den() != 1) {
        throw ValidationError("coefficient " + to_string(q) + " at ordinary point '" + label + "' is not an integer");
      }
      if (q != 0) d.coeffs_[label] = q;
    }
    return d;
  }

  static FracDivisor zero(const OrbifoldCurve& curve) { return FracDivisor(curve); }

  const OrbifoldCurve& curve() const { return curve_; }
  const std::map<std::string, Rational>& coeffs() const { return coeffs_; }

  Rational coeff(const std::string& label) const {
    auto it = coeffs_.find(label);
    return it == coeffs_.end() ? Rational(0) : it->second;
  }

  friend FracDivisor operator+(const FracDivisor& a, const FracDivisor& b) {
    a.require_same_curve(b);
    auto out = a.coeffs_;
    for (const auto& [l, c] : b.coeffs_) out[l] += c;
    return make(a.curve_, out);
  }

  friend FracDivisor operator-(const FracDivisor& a, const FracDivisor& b) {
    a.require_same_curve(b);
    auto out = a.coeffs_;
    for (const auto& [l, c] : b.coeffs_) out[l] -= c;
    return make(a.curve_, out);
  }

  friend FracDivisor operator*(long n, const FracDivisor& a) {
    auto out = a.coeffs_;
    for (auto& [l, c] : out) c *= n;
    return make(a.curve_, out);
  }

  friend bool operator==(const FracDivisor& a, const FracDivisor& b) {
    return a.curve_ == b.curve_ && a.coeffs_ == b.coeffs_;
  }

 private:
  explicit FracDivisor(OrbifoldCurve curve) : curve_(std::move(curve)) {}

  void require_same_curve(const FracDivisor& other) const {
    if (!(curve_ == other.curve_)) throw DomainError("divisors live on different curves");
  }

  OrbifoldCurve curve_;
  std::map<std::string, Rational> coeffs_;
};

/// The k in [0, r-1] with k = r * coeff mod r.
inline int multiplicity(const FracDivisor& d, const std::string& label) {
  auto r = d.curve().order_of(label);
  if (!r) throw DomainError("'" + label + "' is not a stacky point");
  Rational scaled = d.coeff(label) * *r;
  BigInt k = scaled.get_num() % *r;
  if (k < 0) k += *r;
  return static_cast<int>(k.get_si());
}

inline Rational degree(const FracDivisor& d) {
  Rational total;
  for (const auto& [l, c] : d.coeffs()) total += c;
  return total;
}

namespace curve_detail {

inline long require_integer(const Rational& q, const char* what) {
  if (!is_integer(q)) throw ConsistencyError(std::string(what) + " is not an integer: " + to_string(q));
  return q.get_num().get_si();
}

}  // namespace curve_detail

/// chi(D) = deg D + 1 - g - sum_i k_i / r_i.
inline long euler_char_rr(const FracDivisor& d) {
  Rational chi = degree(d) + 1 - d.curve().genus();
  for (const auto& p : d.curve().stacky()) chi -= make_rational(multiplicity(d, p.label), p.order);
  return curve_detail::require_integer(chi, "orbifold Riemann-Roch value");
}

/// The same value assembled from the Todd terms at each stacky point:
///   deg D + 1 - g - sum_i (r_i - 1)/(2 r_i) + sum_i (1/r_i) T(r_i, k_i),
/// with T the cyclotomic sum of stacky_todd_sum.
inline long euler_char_todd(const FracDivisor& d) {
  Rational chi = degree(d) + 1 - d.curve().genus();
  for (const auto& p : d.curve().stacky()) {
    chi -= make_rational(p.order - 1, 2 * p.order);
    chi += stacky_todd_sum(p.order, multiplicity(d, p.label)) / p.order;
  }
  return curve_detail::require_integer(chi, "Todd-route Riemann-Roch value");
}

/// Classical Riemann-Roch for the round-down of D on the coarse curve.
inline long coarse_rr_oracle(const FracDivisor& d) {
  BigInt deg = 0;
  for (const auto& [l, c] : d.coeffs()) deg += floor_of(c);
  return deg.get_si() + 1 - d.curve().genus();
}

/// K = (2g - 2) anchor + sum_i ((r_i - 1)/r_i) x_i. Only the degree and the
/// multiplicities enter any formula here, so the anchor is a bookkeeping
/// label.
inline FracDivisor canonical_divisor(const OrbifoldCurve& c) {
  std::map<std::string, Rational> coeffs;
  coeffs[OrbifoldCurve::kAnchor] = 2 * c.genus() - 2;
  for (const auto& p : c.stacky()) coeffs[p.label] = make_rational(p.order - 1, p.order);
  return FracDivisor::make(c, coeffs);
}

/// chi^orb from the stratification: the open complement of the s stacky
/// points (chi^top = 2 - 2g - s, trivial isotropy) plus each point with
/// weight 1/r_i. Checked against -deg K.
inline Rational chi_orb_curve(const OrbifoldCurve& c) {
  Rational chi = 2 - 2 * c.genus() - static_cast<long>(c.stacky().size());
  for (const auto& p : c.stacky()) chi += make_rational(1, p.order);
  if (chi != -degree(canonical_divisor(c))) {
    throw ConsistencyError("stratified chi^orb " + to_string(chi) + " differs from -deg K");
  }
  return chi;
}

inline long chi_top_curve(const OrbifoldCurve& c) { return 2 - 2L * c.genus(); }

/// chi^top of the coarse space of the inertia: the curve plus r_i - 1
/// twisted points over each stacky point.
inline long chi_phy_curve(const OrbifoldCurve& c) {
  long chi = chi_top_curve(c);
  for (const auto& p : c.stacky()) chi += p.order - 1;
  return chi;
}

/// The inertia-side integral: chi^orb of the untwisted sector plus, for each
/// stacky point, r_i - 1 twisted sectors each a point with isotropy Z/r_i.
/// Checked equal to 2 - 2g.
inline long chi_top_via_inertia(const OrbifoldCurve& c) {
  Rational total = chi_orb_curve(c);
  for (const auto& p : c.stacky()) total += make_rational(p.order - 1, p.order);
  if (total != chi_top_curve(c)) throw ConsistencyError("inertia integral " + to_string(total) + " differs from 2 - 2g");
  return chi_top_curve(c);
}

/// chi(D) = -chi(K - D).
inline bool serre_duality_check(const FracDivisor& d) {
  return euler_char_rr(d) == -euler_char_rr(canonical_divisor(d.curve()) - d);
}

// The (2,3) orbifold carrying modular forms of level one: genus 0, stacky
// points i and rho, and the ordinary point "cusp".

inline OrbifoldCurve modular_curve() { return OrbifoldCurve::make(0, {{"i", 2}, {"rho", 3}}); }

/// Divisor whose chi is the dimension of weight-k forms (k even, k >= 0):
/// ((k/2) mod 2)/2 at i, (k mod 3)/3 at rho, and the integer k/12 minus those
/// at the cusp, so deg D_k = k/12.
inline FracDivisor modular_weight_divisor(int k) {
  if (k < 0 || k % 2 != 0) throw DomainError("weight must be even and non-negative, got " + std::to_string(k));
  Rational at_i = make_rational((k / 2) % 2, 2);
  Rational at_rho = make_rational(k % 3, 3);
  Rational at_cusp = make_rational(k, 12) - at_i - at_rho;
  return FracDivisor::make(modular_curve(), {{"i", at_i}, {"rho", at_rho}, {"cusp", at_cusp}});
}

}  // namespace stackyrr
