#pragma once

// The Euler characteristic ladder top / orb / phy, higher orbifold Euler
// characteristics chi_m with their series, and weighted Euler characteristics
// and Euler determinants over stratifications.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "group.hpp"
#include "gset.hpp"
#include "orbicurve.hpp"
#include "rational.hpp"

namespace stackyrr {

inline long chi_top_gset(const FiniteGSet& x) { return static_cast<long>(orbit_count(x)); }

/// sum over orbits of 1/|Stab|, checked against |X|/|G|.
inline Rational chi_orb_gset(const FiniteGSet& x) {
  Rational total;
  for (int s : orbits(x).stabilizer_orders) total += make_rational(1, s);
  if (total != make_rational(x.size(), x.group()->order())) {
    throw ConsistencyError("orbit sum " + to_string(total) + " differs from |X|/|G|");
  }
  return total;
}

inline long chi_phy_gset(const FiniteGSet& x) { return chi_top_gset(inertia(x).gset); }

struct ChiM {
  Rational direct;     // sum over points of #commuting m-tuples in Stab(x), over |G|
  Rational recursive;  // sum over orbits of N_m(Stab) / |Stab| by centralizer recursion
};

/// chi_m = |X^(m)| / |G|, computed both ways; they must agree.
inline ChiM chi_m_both(const FiniteGSet& x, int m) {
  if (m < 0) throw DomainError("m must be non-negative, got " + std::to_string(m));
  const OrbitDecomposition o = orbits(x);
  BigInt points = 0;
  for (int p = 0; p < x.size(); ++p) points += count_commuting_tuples(stabilizer(x, p), m, TupleAlgorithm::brute);
  ChiM out;
  out.direct = Rational(points) / x.group()->order();
  out.direct.canonicalize();
  for (std::size_t k = 0; k < o.size(); ++k) {
    const Subgroup s = stabilizer(x, o.representatives[k]);
    out.recursive += Rational(count_commuting_tuples(s, m, TupleAlgorithm::centralizer_recursive)) / s.order();
  }
  out.recursive.canonicalize();
  if (out.direct != out.recursive) {
    throw ConsistencyError("chi_" + std::to_string(m) + ": enumeration gives " + to_string(out.direct) +
                           ", recursion gives " + to_string(out.recursive));
  }
  return out;
}

inline Rational chi_m(const FiniteGSet& x, int m) { return chi_m_both(x, m).direct; }

/// chi_m without brute enumeration, for depths beyond the tuple cap.
inline Rational chi_m_recursive(const FiniteGSet& x, int m) {
  if (m < 0) throw DomainError("m must be non-negative, got " + std::to_string(m));
  const OrbitDecomposition o = orbits(x);
  Rational total;
  for (std::size_t k = 0; k < o.size(); ++k) {
    const Subgroup s = stabilizer(x, o.representatives[k]);
    total += Rational(count_commuting_tuples(s, m, TupleAlgorithm::centralizer_recursive)) / s.order();
  }
  total.canonicalize();
  return total;
}

struct LadderResult {
  int m = 0;
  long phy = 0;      // chi^phy(I^m)
  long top = 0;      // chi^top(I^(m+1))
  Rational orb;      // chi_(m+2)
  bool ok = false;
};

/// chi^phy(I^m) = chi^top(I^(m+1)) = chi_(m+2), with the iterates built from
/// commuting tuples.
inline LadderResult ladder(const FiniteGSet& x, int m) {
  if (m < 0) throw DomainError("m must be non-negative, got " + std::to_string(m));
  LadderResult r;
  r.m = m;
  r.phy = chi_phy_gset(iterated_inertia(x, m).gset);
  r.top = chi_top_gset(iterated_inertia(x, m + 1).gset);
  r.orb = chi_m(x, m + 2);
  r.ok = r.phy == r.top && Rational(r.top) == r.orb;
  return r;
}

inline bool ladder_check(const FiniteGSet& x, int m) { return ladder(x, m).ok; }

/// ladder(x, m) for every m in [0, m_max], building each iterate once.
inline std::vector<LadderResult> ladder_upto(const FiniteGSet& x, int m_max) {
  if (m_max < 0) throw DomainError("m must be non-negative, got " + std::to_string(m_max));
  std::vector<LadderResult> out;
  IteratedInertia current = iterated_inertia(x, 0);
  for (int m = 0; m <= m_max; ++m) {
    IteratedInertia next = iterated_inertia(x, m + 1);
    LadderResult r;
    r.m = m;
    r.phy = chi_phy_gset(current.gset);
    r.top = chi_top_gset(next.gset);
    r.orb = chi_m(x, m + 2);
    r.ok = r.phy == r.top && Rational(r.top) == r.orb;
    out.push_back(std::move(r));
    current = std::move(next);
  }
  return out;
}

/// [chi_0, ..., chi_m_max], chi_0 = chi^orb.
inline std::vector<Rational> euler_series(const FiniteGSet& x, int m_max) {
  if (m_max < 0) throw DomainError("m_max must be non-negative, got " + std::to_string(m_max));
  std::vector<Rational> out;
  for (int m = 0; m <= m_max; ++m) out.push_back(chi_m(x, m));
  if (out[0] != chi_orb_gset(x)) throw ConsistencyError("chi_0 differs from chi^orb");
  return out;
}

struct EulerReport {
  long chi_top = 0;
  Rational chi_orb;
  long chi_phy = 0;
  std::vector<Rational> series;
  int ladder_m = 0;  // ladder checked for every m in [0, ladder_m]
  bool ladder_verified = false;
  std::vector<LadderResult> rungs;
};

inline EulerReport euler_report(const FiniteGSet& x, int m_max) {
  EulerReport r;
  r.chi_top = chi_top_gset(x);
  r.chi_orb = chi_orb_gset(x);
  r.chi_phy = chi_phy_gset(x);
  r.series = euler_series(x, std::max(m_max, 2));
  r.ladder_m = std::max(0, m_max - 2);
  r.rungs = ladder_upto(x, r.ladder_m);
  r.ladder_verified = true;
  for (const auto& l : r.rungs)
    r.ladder_verified = r.ladder_verified && l.ok && l.orb == r.series[static_cast<std::size_t>(l.m + 2)];
  r.series.resize(static_cast<std::size_t>(m_max) + 1);
  return r;
}

// ---------------------------------------------------------------------------
// Weighted Euler characteristics

struct Stratum {
  std::string name;
  Rational weight;
  long chi_top = 0;
  Rational chi_orb;
};

/// A stratification of a G-set or an orbifold curve with one weight per
/// stratum, carrying the Euler characteristics of each stratum.
struct WeightedStrata {
  std::vector<Stratum> strata;
};

/// Strata of a G-set given as point lists covering X, with a weight for every
/// point. Each stratum must be G-stable and the weights constant on it.
inline WeightedStrata gset_strata(const FiniteGSet& x, const std::vector<std::vector<int>>& parts,
                                  const std::vector<Rational>& point_weights) {
  if (static_cast<int>(point_weights.size()) != x.size()) throw ValidationError("need one weight per point");
  std::vector<int> owner(x.size(), -1);
  for (std::size_t s = 0; s < parts.size(); ++s) {
    if (parts[s].empty()) throw ValidationError("stratum " + std::to_string(s) + " is empty");
    for (int p : parts[s]) {
      if (p < 0 || p >= x.size()) throw ValidationError("stratum " + std::to_string(s) + " lists point " + std::to_string(p) + " out of range");
      if (owner[p] != -1) throw ValidationError("point " + std::to_string(p) + " lies in two strata");
      owner[p] = static_cast<int>(s);
    }
  }
  for (int p = 0; p < x.size(); ++p)
    if (owner[p] == -1) throw ValidationError("point " + std::to_string(p) + " lies in no stratum");
  const OrbitDecomposition o = orbits(x);
  WeightedStrata out;
  for (std::size_t s = 0; s < parts.size(); ++s) {
    Stratum st;
    st.name = "stratum " + std::to_string(s);
    st.weight = point_weights[parts[s][0]];
    std::set<int> seen;
    for (int p : parts[s]) {
      if (point_weights[p] != st.weight) {
        throw ValidationError("weight is not constant on stratum " + std::to_string(s) + " (point " + std::to_string(p) + ")");
      }
      for (int g : x.group()->generators())
        if (owner[x.act(p, g)] != static_cast<int>(s)) {
          throw ValidationError("stratum " + std::to_string(s) + " is not stable under the group (point " + std::to_string(p) + ")");
        }
      const int k = o.orbit_of[p];
      if (seen.insert(k).second) {
        st.chi_top += 1;
        st.chi_orb += make_rational(1, o.stabilizer_orders[k]);
      }
    }
    out.strata.push_back(std::move(st));
  }
  return out;
}

/// One stratum per orbit.
inline WeightedStrata gset_orbit_strata(const FiniteGSet& x, const std::vector<Rational>& orbit_weights) {
  const OrbitDecomposition o = orbits(x);
  if (orbit_weights.size() != o.size()) throw ValidationError("need one weight per orbit");
  std::vector<Rational> point_weights(x.size());
  for (int p = 0; p < x.size(); ++p) point_weights[p] = orbit_weights[o.orbit_of[p]];
  return gset_strata(x, o.orbits, point_weights);
}

/// Strata of a curve: finite point sets (stacky labels or ordinary labels),
/// and the open complement of all listed points. Every stacky point must be
/// listed so the open stratum has trivial isotropy.
inline WeightedStrata curve_strata(const OrbifoldCurve& c, const std::vector<std::vector<std::string>>& point_parts,
                                   const std::map<std::string, Rational>& point_weights, const Rational& open_weight) {
  std::set<std::string> listed;
  WeightedStrata out;
  for (std::size_t s = 0; s < point_parts.size(); ++s) {
    if (point_parts[s].empty()) throw ValidationError("point stratum " + std::to_string(s) + " is empty");
    Stratum st;
    st.name = "points " + std::to_string(s);
    for (std::size_t i = 0; i < point_parts[s].size(); ++i) {
      const std::string& label = point_parts[s][i];
      if (!listed.insert(label).second) throw ValidationError("point '" + label + "' lies in two strata");
      auto w = point_weights.find(label);
      if (w == point_weights.end()) throw ValidationError("no weight for point '" + label + "'");
      if (i == 0) st.weight = w->second;
      if (w->second != st.weight) throw ValidationError("weight is not constant on point stratum " + std::to_string(s));
      st.chi_top += 1;
      st.chi_orb += make_rational(1, c.order_of(label).value_or(1));
    }
    out.strata.push_back(std::move(st));
  }
  for (const auto& p : c.stacky())
    if (!listed.count(p.label)) throw ValidationError("stacky point '" + p.label + "' must lie in a point stratum");
  for (const auto& [label, w] : point_weights)
    if (!listed.count(label)) throw ValidationError("weight given for unlisted point '" + label + "'");
  Stratum open;
  open.name = "open";
  open.weight = open_weight;
  open.chi_top = 2 - 2L * c.genus() - static_cast<long>(listed.size());
  open.chi_orb = open.chi_top;
  out.strata.push_back(std::move(open));
  return out;
}

enum class EulerVariant { top, orb };

/// sum_i sigma_i chi(stratum_i); weights must be integers.
inline Rational weighted_chi(const WeightedStrata& w, EulerVariant variant) {
  Rational total;
  for (const auto& s : w.strata) {
    if (!is_integer(s.weight)) throw ValidationError("weighted chi needs integer weights, got " + to_string(s.weight) + " on " + s.name);
    total += s.weight * (variant == EulerVariant::top ? Rational(s.chi_top) : s.chi_orb);
  }
  return total;
}

/// prod_i sigma_i ^ chi(stratum_i), kept as (base, exponent) pairs with bases
/// merged; zero exponents and the base 1 are dropped. value is set when every exponent is an
/// integer.
struct EulerDeterminant {
  std::vector<std::pair<Rational, Rational>> factors;  // sorted by base
  std::optional<Rational> value;
};

inline EulerDeterminant euler_determinant(const WeightedStrata& w, EulerVariant variant) {
  std::map<Rational, Rational> merged;
  for (const auto& s : w.strata) {
    if (s.weight == 0) throw DomainError("determinant weight on " + s.name + " is zero");
    merged[s.weight] += variant == EulerVariant::top ? Rational(s.chi_top) : s.chi_orb;
  }
  EulerDeterminant out;
  Rational value = 1;
  bool evaluable = true;
  for (const auto& [base, exp] : merged) {
    if (exp == 0 || base == 1) continue;
    out.factors.emplace_back(base, exp);
    if (!is_integer(exp)) {
      evaluable = false;
      continue;
    }
    long e = exp.get_num().get_si();
    Rational b = e < 0 ? Rational(1) / base : base;
    for (long i = 0; i < (e < 0 ? -e : e); ++i) value *= b;
  }
  if (evaluable) out.value = value;
  return out;
}

}  // namespace stackyrr
