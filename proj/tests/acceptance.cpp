// Acceptance suite: one PASS/FAIL line per criterion, exact arithmetic
// throughout. Runtime limits are part of each pass condition.
//
// Usage: acceptance [path-to-stackyrr-tool]
// With a tool path, criterion 11 also runs the executable twice per fixture.

#include <array>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "group_zoo.hpp"
#include "random_inputs.hpp"
#include "stackyrr/character.hpp"
#include "stackyrr/cli.hpp"
#include "stackyrr/euler.hpp"
#include "stackyrr/orbicurve.hpp"

using namespace stackyrr;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double limit_seconds;
  std::function<Outcome()> body;
};

// ---------------------------------------------------------------------------
// Grids of G-sets

/// Every subgroup, by closing cyclic subgroups under joins.
std::vector<Subgroup> all_subgroups(const GroupPtr& g) {
  std::set<std::vector<int>> seen;
  std::vector<Subgroup> out;
  auto add = [&](Subgroup h) {
    if (seen.insert(h.elements).second) out.push_back(std::move(h));
  };
  for (int a = 0; a < g->order(); ++a) add(generated_subgroup(g, {a}));
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) {
      std::vector<int> gens = out[i].elements;
      gens.insert(gens.end(), out[j].elements.begin(), out[j].elements.end());
      add(generated_subgroup(g, gens));
    }
  return out;
}

/// One subgroup per conjugacy class.
std::vector<Subgroup> subgroup_classes(const GroupPtr& g) {
  std::set<std::vector<int>> keys;
  std::vector<Subgroup> out;
  for (auto& h : all_subgroups(g)) {
    std::vector<int> key = h.elements;
    for (int a = 0; a < g->order(); ++a) {
      std::vector<int> c;
      for (int e : h.elements) c.push_back(g->conj(a, e));
      std::sort(c.begin(), c.end());
      key = std::min(key, c);
    }
    if (keys.insert(key).second) out.push_back(h);
  }
  return out;
}

/// Every G-set with at most max_orbits orbits and at most max_points points,
/// one per isomorphism class: multisets of transitive pieces G/H.
std::vector<FiniteGSet> gsets_upto(const GroupPtr& g, int max_points, int max_orbits) {
  std::vector<FiniteGSet> pieces;
  for (const auto& h : subgroup_classes(g))
    if (g->order() / h.order() <= max_points) pieces.push_back(coset_action(h));
  std::vector<FiniteGSet> out;
  std::function<void(std::size_t, int, int, const FiniteGSet*)> grow = [&](std::size_t from, int size, int count,
                                                                           const FiniteGSet* acc) {
    for (std::size_t i = from; i < pieces.size(); ++i) {
      if (size + pieces[i].size() > max_points) continue;
      FiniteGSet next = acc ? disjoint_union(*acc, pieces[i]) : pieces[i];
      out.push_back(next);
      if (count + 1 < max_orbits) grow(i, size + pieces[i].size(), count + 1, &next);
    }
  };
  grow(0, 0, 0, nullptr);
  return out;
}

struct GridGroup {
  std::string name;
  GroupPtr group;
};

std::vector<GridGroup> devissage_groups() {
  std::vector<GridGroup> out;
  for (int n = 1; n <= 8; ++n) out.push_back({"Z" + std::to_string(n), cyclic_group(n)});
  for (const char* name : {"S3", "S4", "D4", "Q8", "A4"}) out.push_back({name, preset_group(name)});
  return out;
}

// ---------------------------------------------------------------------------
// Criteria

Outcome devissage_isomorphism() {
  Outcome o;
  std::size_t count = 0;
  for (const auto& [name, g] : devissage_groups()) {
    for (const auto& x : gsets_upto(g, 8, 3)) {
      ++count;
      const DevissageMatrix dm = devissage_matrix(x);
      std::size_t expected_source = 0;
      for (int rep : orbits(x).representatives) expected_source += as_group(stabilizer(x, rep))->classes().size();
      const std::size_t inertia_orbits = orbits(inertia(x).gset).size();
      const bool ok = dm.is_isomorphism() && dm.source_dim == expected_source && dm.target_dim == inertia_orbits;
      if (!ok && o.pass) {
        o.pass = false;
        o.detail = "first failure on " + name + " acting on " + std::to_string(x.size()) + " points; ";
      }
    }
  }
  o.detail += std::to_string(count) + " actions, square and full rank";
  return o;
}

ClassFunction random_genuine(std::mt19937& rng, const GroupPtr& g) {
  std::uniform_int_distribution<int> elem(0, g->order() - 1), coef(0, 2);
  ClassFunction chi = trivial_character(g);
  for (int t = 0; t < 3; ++t) {
    const int c = elem(rng);
    const int j = std::uniform_int_distribution<int>(0, g->element_order(c) - 1)(rng);
    chi = chi + scale(induced_cyclic_character(g, c, j), Cyclo(coef(rng)));
  }
  chi.genuine = true;
  return chi;
}

Outcome lefschetz_invariants() {
  std::vector<FiniteGSet> grid;
  for (const auto& [name, g] : devissage_groups())
    for (auto& x : gsets_upto(g, 8, 3)) grid.push_back(std::move(x));
  std::mt19937 rng(20261017);
  Outcome o;
  int agree = 0;
  const int trials = 200;
  for (int t = 0; t < trials; ++t) {
    const FiniteGSet& x = grid[std::uniform_int_distribution<std::size_t>(0, grid.size() - 1)(rng)];
    std::vector<ClassFunction> chars;
    for (const auto& s : orbit_stabilizers(x, orbits(x))) chars.push_back(random_genuine(rng, s.group));
    const VirtualEqBundle v = make_bundle(x, std::move(chars));
    // source side: sum of invariant dimensions; inertia side: (1/|G|) sum of traces
    Cyclo source;
    for (const auto& chi : v.characters) source += invariants_dim(chi);
    Cyclo traces;
    for (auto [p, h] : inertia(x).pairs) traces += v.at(p, h);
    const Cyclo inertia_side = traces / Cyclo(x.group()->order());
    bool ok = source == inertia_side && source.is_rational() && is_integer(source.rational_value()) &&
              source.rational_value() >= 0;
    try {
      const PointPushforward p = pushforward_to_point(v);
      ok = ok && p.source_side == source && p.inertia_side == inertia_side;
    } catch (const ConsistencyError&) {
      ok = false;
    }
    agree += ok;
  }
  o.pass = agree == trials;
  o.detail = std::to_string(agree) + "/" + std::to_string(trials) + " genuine bundles agree exactly";
  return o;
}

Outcome euler_ladder() {
  Outcome o;
  std::size_t count = 0, checks = 0;
  for (const auto& [name, g] : testing::groups_upto_16()) {
    for (const auto& x : gsets_upto(g, 6, 6)) {
      ++count;
      // inertia applied repeatedly, independent of the commuting-tuple build
      FiniteGSet repeated = inertia(x).gset;
      const std::vector<LadderResult> rungs = ladder_upto(x, 3);
      for (int m = 0; m <= 3; ++m) {
        const LadderResult& l = rungs[static_cast<std::size_t>(m)];
        const long top_oracle = static_cast<long>(orbit_count(repeated));
        const Rational orb_oracle = chi_m_recursive(x, m + 2);
        const bool ok = l.ok && l.phy == top_oracle && l.top == top_oracle && l.orb == orb_oracle;
        ++checks;
        if (!ok && o.pass) {
          o.pass = false;
          o.detail = "first failure on " + name + ", " + std::to_string(x.size()) + " points, m=" + std::to_string(m) + "; ";
        }
        if (m < 3) repeated = inertia(repeated).gset;
      }
    }
  }
  o.detail += std::to_string(count) + " G-sets, " + std::to_string(checks) + " ladder rungs";
  return o;
}

Outcome series_spot_values() {
  const GroupPtr s3 = symmetric_group(3);
  const FiniteGSet pt = trivial_action(s3, 1);
  const std::array<long, 3> counts{6, 18, 48};
  const std::array<long, 3> values{1, 3, 8};
  Outcome o;
  for (int m = 1; m <= 3; ++m) {
    const BigInt brute = count_commuting_tuples(s3, m, TupleAlgorithm::brute);
    const Rational chi = chi_m(pt, m);
    o.pass = o.pass && brute == counts[m - 1] && chi == values[m - 1] && chi == Rational(brute) / 6;
    o.detail += (m > 1 ? ", " : "") + std::string("chi_") + std::to_string(m) + " = " + to_string(chi) + " (" +
                brute.get_str() + "/6)";
  }
  return o;
}

Outcome curve_riemann_roch() {
  std::mt19937 rng(41);
  const int trials = 300;
  int agree = 0;
  for (int t = 0; t < trials; ++t) {
    const auto c = testing::random_curve(rng, 5, 6, 12);
    const auto d = testing::random_divisor(rng, c);
    agree += euler_char_rr(d) == coarse_rr_oracle(d);
  }
  return Outcome{agree == trials, std::to_string(agree) + "/" + std::to_string(trials) + " random divisors match the round-down oracle"};
}

// Second path: 1/(1 - z^a) = -(1/r) sum_j j z^(a j), so the whole sum is one
// exponent vector, with no field inversion.
Rational todd_by_exponents(long r, long k, long sign) {
  std::vector<Rational> exps(static_cast<std::size_t>(r));
  for (long a = 1; a < r; ++a)
    for (long j = 1; j < r; ++j) {
      const long e = (((a * j + sign * a * k) % r) + r) % r;
      exps[static_cast<std::size_t>(e)] -= make_rational(j, r);
    }
  const Cyclo z = Cyclo::from_power_basis(static_cast<int>(r), exps);
  if (!z.is_rational()) throw ConsistencyError("Todd sum by exponents is not rational");
  return z.rational_value();
}

Outcome todd_identity() {
  int cases = 0, agree = 0, opposite_mismatch = 0;
  for (long r = 2; r <= 30; ++r)
    for (long k = 0; k < r; ++k) {
      ++cases;
      const Rational expected = make_rational(r - 1, 2) - k;
      const Rational by_inverse = stacky_todd_sum(r, k);
      const Rational by_exponents = todd_by_exponents(r, k, -1);
      agree += by_inverse == expected && by_exponents == expected;
      opposite_mismatch += todd_by_exponents(r, k, +1) != expected;
    }
  std::ostringstream d;
  d << agree << "/" << cases << " (r, k) pairs agree on both paths with the pairing zeta^(-ak); the opposite pairing "
    << "zeta^(+ak) differs on " << opposite_mismatch << " pairs (all k >= 1)";
  return Outcome{agree == cases, d.str()};
}

Outcome gauss_bonnet() {
  std::mt19937 rng(43);
  int agree = 0;
  const int trials = 300;
  for (int t = 0; t < trials; ++t) {
    const auto c = testing::random_curve(rng, 5, 6, 12);
    // stratified chi^orb written out: open part plus 1/r per stacky point
    Rational strat = 2 - 2 * c.genus() - static_cast<long>(c.stacky().size());
    Rational twisted;
    for (const auto& p : c.stacky()) {
      strat += make_rational(1, p.order);
      twisted += make_rational(p.order - 1, p.order);
    }
    agree += -degree(canonical_divisor(c)) == strat && chi_orb_curve(c) == strat &&
             strat + twisted == 2 - 2 * c.genus() && chi_top_via_inertia(c) == 2 - 2 * c.genus();
  }
  const auto c237 = OrbifoldCurve::make(0, {{"a", 2}, {"b", 3}, {"c", 7}});
  Rational total237 = chi_orb_curve(c237);
  for (const auto& p : c237.stacky()) total237 += make_rational(p.order - 1, p.order);
  const bool spot = chi_orb_curve(c237) == make_rational(-1, 42) && total237 == 2 && chi_top_via_inertia(c237) == 2;
  std::ostringstream d;
  d << agree << "/" << trials << " random curves; (2,3,7): chi_orb = " << to_string(chi_orb_curve(c237))
    << ", inertia total = " << to_string(total237);
  return Outcome{agree == trials && spot, d.str()};
}

Outcome serre_duality() {
  std::mt19937 rng(41);  // the criterion 5 instances
  const int trials = 300;
  int agree = 0;
  for (int t = 0; t < trials; ++t) {
    const auto c = testing::random_curve(rng, 5, 6, 12);
    const auto d = testing::random_divisor(rng, c);
    agree += euler_char_rr(d) == -euler_char_rr(canonical_divisor(c) - d);
  }
  return Outcome{agree == trials, std::to_string(agree) + "/" + std::to_string(trials) + " divisors satisfy chi(D) = -chi(K - D)"};
}

Outcome modular_forms() {
  const std::array<int, 7> weights{0, 4, 6, 8, 10, 12, 14};
  const std::array<long, 7> expected{1, 1, 1, 1, 1, 2, 1};
  Outcome o;
  std::ostringstream d;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const int k = weights[i];
    long monomials = 0;  // E4^a E6^b with 4a + 6b = k
    for (int a = 0; 4 * a <= k; ++a) monomials += (k - 4 * a) % 6 == 0;
    const long chi = euler_char_rr(modular_weight_divisor(k));
    o.pass = o.pass && chi == monomials && chi == expected[i];
    d << (i ? ", " : "") << "k=" << k << ":" << chi;
  }
  o.detail = d.str();
  return o;
}

Rational power(const Rational& base, long e) {
  Rational out = 1;
  for (long i = 0; i < std::abs(e); ++i) out *= base;
  return e < 0 ? 1 / out : out;
}

Outcome weighted_euler() {
  std::mt19937 rng(47);
  std::uniform_int_distribution<int> wdist(-5, 5);
  int cases = 0, agree = 0;
  // curves: refine the open stratum by ordinary points, split point strata
  for (int t = 0; t < 150; ++t) {
    const auto c = testing::random_curve(rng, 4, 5, 8);
    std::vector<std::vector<std::string>> singles, merged;
    std::map<std::string, Rational> w1, w2, sum;
    const Rational shared = wdist(rng);
    for (const auto& p : c.stacky()) {
      singles.push_back({p.label});
      w1[p.label] = shared;
      w2[p.label] = wdist(rng);
      sum[p.label] = w1[p.label] + w2[p.label];
    }
    if (!c.stacky().empty()) {
      merged.emplace_back();
      for (const auto& p : c.stacky()) merged.back().push_back(p.label);
    }
    const Rational open1 = wdist(rng), open2 = wdist(rng);
    auto refined_parts = singles;
    refined_parts.push_back({"o1"});
    refined_parts.push_back({"o2", "o3"});
    auto refined_w = w1;
    for (const char* l : {"o1", "o2", "o3"}) refined_w[l] = open1;
    const auto base = curve_strata(c, singles, w1, open1);
    const auto coarse = curve_strata(c, merged, w1, open1);
    const auto refined = curve_strata(c, refined_parts, refined_w, open1);
    const auto other = curve_strata(c, singles, w2, open2);
    const auto both = curve_strata(c, singles, sum, open1 + open2);
    bool ok = true;
    for (auto v : {EulerVariant::top, EulerVariant::orb}) {
      ok = ok && weighted_chi(base, v) == weighted_chi(coarse, v) && weighted_chi(base, v) == weighted_chi(refined, v);
      ok = ok && weighted_chi(both, v) == weighted_chi(base, v) + weighted_chi(other, v);
    }
    // refinement leaves the determinant unchanged
    if (shared != 0 && open1 != 0) {
      for (auto v : {EulerVariant::top, EulerVariant::orb}) {
        const auto a = euler_determinant(base, v), b = euler_determinant(refined, v);
        ok = ok && a.factors == b.factors && a.value == b.value;
      }
    }
    // constant weight
    const Rational cst = make_rational(std::uniform_int_distribution<int>(1, 7)(rng), std::uniform_int_distribution<int>(1, 5)(rng));
    std::map<std::string, Rational> constant;
    for (const auto& p : c.stacky()) constant[p.label] = cst;
    const auto det = euler_determinant(curve_strata(c, singles, constant, cst), EulerVariant::top);
    ok = ok && det.value && *det.value == power(cst, 2 - 2L * c.genus());
    ++cases;
    agree += ok;
  }
  // G-sets: merging orbits of equal weight, additivity, constant determinant
  for (const auto& [name, g] : devissage_groups()) {
    for (const auto& x : gsets_upto(g, 6, 3)) {
      const auto o = orbits(x);
      std::vector<Rational> w(o.size()), w2(o.size()), sum(o.size());
      for (std::size_t k = 0; k < o.size(); ++k) {
        w[k] = wdist(rng) % 2;
        w2[k] = wdist(rng);
        sum[k] = w[k] + w2[k];
      }
      std::map<Rational, std::vector<int>> by_weight;
      std::vector<Rational> point_w(x.size());
      for (int p = 0; p < x.size(); ++p) {
        point_w[p] = w[o.orbit_of[p]];
        by_weight[point_w[p]].push_back(p);
      }
      std::vector<std::vector<int>> parts;
      for (auto& [k, v] : by_weight) parts.push_back(v);
      const auto fine = gset_orbit_strata(x, w);
      const auto merged = gset_strata(x, parts, point_w);
      bool ok = true;
      for (auto v : {EulerVariant::top, EulerVariant::orb}) {
        ok = ok && weighted_chi(fine, v) == weighted_chi(merged, v);
        ok = ok && weighted_chi(gset_orbit_strata(x, sum), v) ==
                       weighted_chi(fine, v) + weighted_chi(gset_orbit_strata(x, w2), v);
      }
      const Rational cst = make_rational(3, 2);
      const auto det = euler_determinant(gset_orbit_strata(x, std::vector<Rational>(o.size(), cst)), EulerVariant::top);
      ok = ok && det.value && *det.value == power(cst, static_cast<long>(o.size()));
      ++cases;
      agree += ok;
    }
  }
  return Outcome{agree == cases, std::to_string(agree) + "/" + std::to_string(cases) + " random stratifications"};
}

std::string run_tool(const std::string& tool, const std::string& args, int& status) {
  const std::string cmd = "\"" + tool + "\" " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  std::string out;
  if (!pipe) {
    status = -1;
    return out;
  }
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  status = pclose(pipe);
  return out;
}

Outcome determinism(const std::string& tool) {
  int identical = 0, total = 0;
  std::string failures;
  for (const auto& f : cli::fixtures()) {
    const cli::RawJob job = cli::fixture_job(f);
    const cli::RunResult a = cli::run(job);
    const cli::RunResult b = cli::run(job);
    bool ok = a.status == cli::status::ok && a.output == b.output && !a.output.empty();
    if (!tool.empty()) {
      std::string args = "report --oracle";
      if (job.gset) args += " --gset " + *job.gset;
      if (job.bundle) args += " --bundle " + *job.bundle;
      if (job.curve) args += " --curve " + *job.curve;
      if (job.divisor) args += " --divisor " + *job.divisor;
      if (job.weights) args += " --weights " + *job.weights;
      int s1 = 0, s2 = 0;
      const std::string p = run_tool(tool, args, s1);
      const std::string q = run_tool(tool, args, s2);
      ok = ok && s1 == 0 && s2 == 0 && p == q && p == a.output;
    }
    ++total;
    identical += ok;
    if (!ok) failures += " " + f.name;
  }
  std::string d = std::to_string(identical) + "/" + std::to_string(total) + " fixture reports byte-identical" +
                  (tool.empty() ? " (in process)" : " (in process and via the executable)");
  if (!failures.empty()) d += "; differing:" + failures;
  return Outcome{identical == total, d};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string tool = argc > 1 ? argv[1] : "";
  const std::vector<Criterion> criteria = {
      {1, "devissage isomorphism", 10, devissage_isomorphism},
      {2, "Lefschetz invariants formula", 10, lefschetz_invariants},
      {3, "Euler ladder", 60, euler_ladder},
      {4, "Euler series of [pt/S3]", 1, series_spot_values},
      {5, "orbifold Riemann-Roch", 5, curve_riemann_roch},
      {6, "cyclotomic Todd identity", 10, todd_identity},
      {7, "Gauss-Bonnet", 1, gauss_bonnet},
      {8, "Serre duality", 5, serre_duality},
      {9, "modular form dimensions", 1, modular_forms},
      {10, "weighted Euler characteristics", 10, weighted_euler},
      {11, "report determinism", 10, [&] { return determinism(tool); }},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = Outcome{false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.limit_seconds;
    const bool pass = o.pass && in_time;
    failed += !pass;
    char timing[64];
    std::snprintf(timing, sizeof timing, "%.2f s, limit %.0f s", secs, c.limit_seconds);
    std::cout << (pass ? "PASS" : "FAIL") << "  criterion " << c.id << " (" << c.name << "): " << o.detail << " [" << timing
              << (in_time ? "" : ", over time") << "]" << std::endl;
  }
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : "all 11 criteria passed") << std::endl;
  return failed ? 1 : 0;
}
