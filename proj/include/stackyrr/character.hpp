#pragma once

// Class functions and matrix representations over cyclotomic fields, the
// devissage map to functions on the inertia set, and pushforwards computed
// on the source side and on the inertia side.

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cyclotomic.hpp"
#include "errors.hpp"
#include "group.hpp"
#include "gset.hpp"
#include "matrix.hpp"

namespace stackyrr {

inline bool same_group(const GroupPtr& a, const GroupPtr& b) {
  return a == b || (a->order() == b->order() && a->table() == b->table());
}

struct ClassFunction {
  GroupPtr group;
  std::vector<Cyclo> values;  // indexed by conjugacy class
  bool genuine = false;

  Cyclo operator()(int element) const { return values[group->class_of(element)]; }
  int classes() const { return static_cast<int>(values.size()); }

  friend bool operator==(const ClassFunction& a, const ClassFunction& b) {
    return same_group(a.group, b.group) && a.values == b.values;
  }
  friend bool operator!=(const ClassFunction& a, const ClassFunction& b) { return !(a == b); }
};

inline ClassFunction class_function(const GroupPtr& g, std::vector<Cyclo> values, bool genuine = false) {
  if (values.size() != g->classes().size()) {
    throw ValidationError("class function needs " + std::to_string(g->classes().size()) + " values, got " +
                          std::to_string(values.size()));
  }
  return ClassFunction{g, std::move(values), genuine};
}

inline ClassFunction trivial_character(const GroupPtr& g) {
  return ClassFunction{g, std::vector<Cyclo>(g->classes().size(), Cyclo(1)), true};
}

/// Indicator of one conjugacy class.
inline ClassFunction class_delta(const GroupPtr& g, int cls) {
  std::vector<Cyclo> v(g->classes().size());
  v.at(static_cast<std::size_t>(cls)) = 1;
  return ClassFunction{g, std::move(v), false};
}

namespace char_detail {

inline void require_same(const ClassFunction& a, const ClassFunction& b, const char* what) {
  if (!same_group(a.group, b.group)) throw DomainError(std::string("class functions on different groups in ") + what);
}

}  // namespace char_detail

inline ClassFunction operator+(const ClassFunction& a, const ClassFunction& b) {
  char_detail::require_same(a, b, "sum");
  ClassFunction out = a;
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += b.values[i];
  out.genuine = a.genuine && b.genuine;
  return out;
}

inline ClassFunction operator-(const ClassFunction& a, const ClassFunction& b) {
  char_detail::require_same(a, b, "difference");
  ClassFunction out = a;
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] -= b.values[i];
  out.genuine = false;
  return out;
}

/// Pointwise product; the character of the tensor product.
inline ClassFunction operator*(const ClassFunction& a, const ClassFunction& b) {
  char_detail::require_same(a, b, "product");
  ClassFunction out = a;
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] *= b.values[i];
  out.genuine = a.genuine && b.genuine;
  return out;
}

inline ClassFunction scale(const ClassFunction& a, const Cyclo& c) {
  ClassFunction out = a;
  for (auto& v : out.values) v *= c;
  out.genuine = a.genuine && c.is_rational() && is_integer(c.rational_value()) && c.rational_value() >= 0;
  return out;
}

/// <a, b> = (1/|G|) sum_g a(g) conj(b(g)).
inline Cyclo inner_product(const ClassFunction& a, const ClassFunction& b) {
  char_detail::require_same(a, b, "inner product");
  const auto& cls = a.group->classes();
  Cyclo total;
  for (std::size_t i = 0; i < cls.size(); ++i) {
    const Cyclo& bv = b.values[i];
    total += a.values[i] * bv.conjugate(-1) * Cyclo(cls.class_sizes[i]);
  }
  return total / Cyclo(a.group->order());
}

/// Dimension of the invariant subspace: (1/|G|) sum over classes of
/// class_size * chi. Checked to be a non-negative integer for genuine input.
inline Cyclo invariants_dim(const ClassFunction& chi) {
  const auto& cls = chi.group->classes();
  Cyclo total;
  for (std::size_t i = 0; i < cls.size(); ++i) total += chi.values[i] * Cyclo(cls.class_sizes[i]);
  total /= Cyclo(chi.group->order());
  if (chi.genuine && !(total.is_rational() && is_integer(total.rational_value()) && total.rational_value() >= 0)) {
    throw ConsistencyError("invariants of a genuine character came out as " + total.to_string());
  }
  return total;
}

/// The group structure of a subgroup, with local index i standing for
/// h.elements[i].
struct SubgroupView {
  Subgroup sub;
  GroupPtr group;
};

inline SubgroupView view(const Subgroup& h) { return SubgroupView{h, as_group(h)}; }

/// Frobenius induction from H to G:
///   chi^G(g) = (1/|H|) sum_{x in G, x^-1 g x in H} chi(x^-1 g x),
/// multiplied by [G:H] when scaled is set.
inline ClassFunction induce(const SubgroupView& h, const ClassFunction& chi, bool scaled = false) {
  if (!same_group(h.group, chi.group)) throw DomainError("character is not defined on the given subgroup");
  const GroupPtr& g = h.sub.parent;
  const auto& cls = g->classes();
  std::vector<Cyclo> values(cls.size());
  for (std::size_t c = 0; c < cls.size(); ++c) {
    const int rep = cls.representatives[c];
    Cyclo total;
    for (int x = 0; x < g->order(); ++x) {
      const int y = g->mul(g->mul(g->inv(x), rep), x);
      const int local = h.sub.local_index(y);
      if (local >= 0) total += chi(local);
    }
    total /= Cyclo(h.sub.order());
    if (scaled) total *= Cyclo(g->order() / h.sub.order());
    values[c] = std::move(total);
  }
  return ClassFunction{g, std::move(values), chi.genuine};
}

/// Restriction along the class fusion H -> G.
inline ClassFunction restrict(const ClassFunction& chi, const SubgroupView& h) {
  if (!same_group(h.sub.parent, chi.group)) throw DomainError("restriction to a subgroup of a different group");
  const auto& cls = h.group->classes();
  std::vector<Cyclo> values(cls.size());
  for (std::size_t c = 0; c < cls.size(); ++c) values[c] = chi(h.sub.elements[cls.representatives[c]]);
  return ClassFunction{h.group, std::move(values), chi.genuine};
}

/// Characters lambda_j(c^a) = zeta_r^(j a) of the cyclic subgroup <c>,
/// induced to G.
inline ClassFunction induced_cyclic_character(const GroupPtr& g, int c, int j) {
  const int r = g->element_order(c);
  std::vector<int> log(g->order(), -1);
  for (int a = 0, x = 0; a < r; ++a, x = g->mul(c, x)) log[x] = a;
  const auto& cls = g->classes();
  std::vector<Cyclo> values(cls.size());
  for (std::size_t k = 0; k < cls.size(); ++k) {
    const int rep = cls.representatives[k];
    Cyclo total;
    for (int x = 0; x < g->order(); ++x) {
      const int y = g->mul(g->mul(g->inv(x), rep), x);
      if (log[y] >= 0) total += root_of_unity(r, static_cast<long>(j) * log[y]);
    }
    values[k] = total / Cyclo(r);
  }
  return ClassFunction{g, std::move(values), true};
}

/// A basis of the class functions of G made of characters induced from
/// cyclic subgroups. Cyclic subgroups are scanned by decreasing order (ties by
/// smallest generator), characters by j, and a candidate is kept when it
/// raises the rank. For a cyclic group this is its character table.
inline std::vector<ClassFunction> induced_cyclic_basis(const GroupPtr& g) {
  const std::size_t target = g->classes().size();
  std::vector<std::pair<int, int>> cyclic;  // (-order, generator), one per subgroup
  std::vector<std::vector<int>> seen;
  for (int c = 0; c < g->order(); ++c) {
    auto members = generated_subgroup(g, {c}).elements;
    if (std::find(seen.begin(), seen.end(), members) != seen.end()) continue;
    seen.push_back(std::move(members));
    cyclic.emplace_back(-g->element_order(c), c);
  }
  std::sort(cyclic.begin(), cyclic.end());
  std::vector<ClassFunction> basis;
  // reduced copies of the accepted vectors: pivot entry 1, zero at earlier pivots
  std::vector<std::vector<Cyclo>> reduced;
  std::vector<std::size_t> pivots;
  for (auto [neg_order, c] : cyclic) {
    for (int j = 0; j < -neg_order && basis.size() < target; ++j) {
      ClassFunction cand = induced_cyclic_character(g, c, j);
      std::vector<Cyclo> v = cand.values;
      for (std::size_t r = 0; r < reduced.size(); ++r) {
        if (v[pivots[r]].is_zero()) continue;
        const Cyclo f = v[pivots[r]];
        for (std::size_t i = 0; i < target; ++i)
          if (!reduced[r][i].is_zero()) v[i] -= f * reduced[r][i];
      }
      std::size_t p = 0;
      while (p < target && v[p].is_zero()) ++p;
      if (p == target) continue;
      const Cyclo inv = v[p].inverse();
      for (auto& e : v) e *= inv;
      reduced.push_back(std::move(v));
      pivots.push_back(p);
      basis.push_back(std::move(cand));
    }
    if (basis.size() == target) break;
  }
  if (basis.size() != target) throw ConsistencyError("induced cyclic characters do not span the class functions");
  return basis;
}

// ---------------------------------------------------------------------------
// Matrix representations

class MatrixRep {
 public:
  /// Builds rho from the images of the group's generators and checks
  /// rho(s) rho(g) = rho(s g) for every generator s and element g.
  static MatrixRep from_generators(GroupPtr group, const std::vector<Matrix<Cyclo>>& images) {
    if (images.size() != group->generators().size()) {
      throw ValidationError("expected " + std::to_string(group->generators().size()) + " generator matrices, got " +
                            std::to_string(images.size()));
    }
    std::size_t dim = images.empty() ? 1 : images[0].rows();
    for (std::size_t s = 0; s < images.size(); ++s) {
      if (images[s].rows() != dim || images[s].cols() != dim) {
        throw ValidationError("generator matrix " + std::to_string(s) + " is not " + std::to_string(dim) + "x" +
                              std::to_string(dim));
      }
    }
    std::vector<Matrix<Cyclo>> mats(static_cast<std::size_t>(group->order()));
    mats[0] = Matrix<Cyclo>::identity(dim);
    for (int e : group->bfs_order()) {
      if (e == 0) continue;
      mats[e] = images[group->word_generator(e)] * mats[group->word_parent(e)];
    }
    MatrixRep rep(std::move(group), dim, std::move(mats));
    rep.validate();
    return rep;
  }

  /// One matrix per group element; checked on every pair.
  static MatrixRep from_matrices(GroupPtr group, std::vector<Matrix<Cyclo>> mats) {
    if (static_cast<int>(mats.size()) != group->order()) throw ValidationError("need one matrix per group element");
    const std::size_t dim = mats.empty() ? 0 : mats[0].rows();
    for (const auto& m : mats)
      if (m.rows() != dim || m.cols() != dim) throw ValidationError("representation matrices must share a square shape");
    if (mats[0] != Matrix<Cyclo>::identity(dim)) throw ValidationError("identity element must act as the identity matrix");
    MatrixRep rep(std::move(group), dim, std::move(mats));
    const GroupPtr& g = rep.group_;
    for (int a = 0; a < g->order(); ++a)
      for (int b = 0; b < g->order(); ++b)
        if (rep.mats_[a] * rep.mats_[b] != rep.mats_[g->mul(a, b)]) {
          throw ValidationError("not a homomorphism at (" + std::to_string(a) + ", " + std::to_string(b) + ")");
        }
    return rep;
  }

  const GroupPtr& group() const { return group_; }
  std::size_t dim() const { return dim_; }
  const Matrix<Cyclo>& operator()(int g) const { return mats_[g]; }

 private:
  MatrixRep(GroupPtr group, std::size_t dim, std::vector<Matrix<Cyclo>> mats)
      : group_(std::move(group)), dim_(dim), mats_(std::move(mats)) {}

  void validate() const {
    for (int s : group_->generators())
      for (int g = 0; g < group_->order(); ++g)
        if (mats_[s] * mats_[g] != mats_[group_->mul(s, g)]) {
          throw ValidationError("generator images violate a relation at (" + std::to_string(s) + ", " +
                                std::to_string(g) + ")");
        }
  }

  GroupPtr group_;
  std::size_t dim_ = 0;
  std::vector<Matrix<Cyclo>> mats_;
};

inline MatrixRep trivial_rep(const GroupPtr& g) {
  std::vector<Matrix<Cyclo>> gens(g->generators().size(), Matrix<Cyclo>::identity(1));
  return MatrixRep::from_generators(g, gens);
}

/// rho(g) e_x = e_{g.x}.
inline MatrixRep permutation_rep(const FiniteGSet& x) {
  const GroupPtr& g = x.group();
  const auto n = static_cast<std::size_t>(x.size());
  std::vector<Matrix<Cyclo>> gens;
  for (int s : g->generators()) {
    Matrix<Cyclo> m(n, n);
    for (int p = 0; p < x.size(); ++p) m(static_cast<std::size_t>(x.act(p, s)), static_cast<std::size_t>(p)) = 1;
    gens.push_back(std::move(m));
  }
  return MatrixRep::from_generators(g, gens);
}

inline MatrixRep regular_rep(const GroupPtr& g) { return permutation_rep(coset_action(Subgroup{g, {0}})); }

/// Sign of the defining permutations; needs a permutation group.
inline MatrixRep sign_rep(const GroupPtr& g) {
  if (!g->permutations()) throw DomainError("sign representation needs a permutation group");
  const auto& perms = *g->permutations();
  std::vector<Matrix<Cyclo>> gens;
  for (int s : g->generators()) {
    const auto& p = perms[s];
    std::vector<char> seen(p.size(), 0);
    int sign = 1;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (seen[i]) continue;
      std::size_t len = 0;
      for (std::size_t j = i; !seen[j]; j = static_cast<std::size_t>(p[j])) {
        seen[j] = 1;
        ++len;
      }
      if (len % 2 == 0) sign = -sign;
    }
    gens.push_back(Matrix<Cyclo>(1, 1, Cyclo(sign)));
  }
  return MatrixRep::from_generators(g, gens);
}

/// One-dimensional rep of a cyclic group of order r sending the generator to
/// zeta_r^j.
inline MatrixRep cyclic_character_rep(const GroupPtr& g, int j) {
  if (g->generators().size() != 1) throw DomainError("cyclic_character_rep needs a group with a single generator");
  const int r = g->element_order(g->generators()[0]);
  if (r != g->order()) throw DomainError("the generator does not generate the group");
  return MatrixRep::from_generators(g, {Matrix<Cyclo>(1, 1, root_of_unity(r, j))});
}

inline MatrixRep tensor_product(const MatrixRep& a, const MatrixRep& b) {
  if (!same_group(a.group(), b.group())) throw DomainError("tensor product of reps of different groups");
  std::vector<Matrix<Cyclo>> gens;
  for (int s : a.group()->generators()) gens.push_back(kronecker(a(s), b(s)));
  return MatrixRep::from_generators(a.group(), gens);
}

inline MatrixRep direct_sum(const MatrixRep& a, const MatrixRep& b) {
  if (!same_group(a.group(), b.group())) throw DomainError("direct sum of reps of different groups");
  const std::size_t n = a.dim() + b.dim();
  std::vector<Matrix<Cyclo>> gens;
  for (int s : a.group()->generators()) {
    Matrix<Cyclo> m(n, n);
    for (std::size_t i = 0; i < a.dim(); ++i)
      for (std::size_t j = 0; j < a.dim(); ++j) m(i, j) = a(s)(i, j);
    for (std::size_t i = 0; i < b.dim(); ++i)
      for (std::size_t j = 0; j < b.dim(); ++j) m(a.dim() + i, a.dim() + j) = b(s)(i, j);
    gens.push_back(std::move(m));
  }
  return MatrixRep::from_generators(a.group(), gens);
}

inline ClassFunction character_of(const MatrixRep& rep) {
  const auto& cls = rep.group()->classes();
  std::vector<Cyclo> values;
  values.reserve(cls.size());
  for (int r : cls.representatives) values.push_back(rep(r).trace());
  return ClassFunction{rep.group(), std::move(values), true};
}

/// dim of the subspace where h acts by zeta: the rank of
/// (1/r) sum_{a<r} zeta^-a rho(h)^a, r the order of h.
inline std::size_t eigencomponent_dim(const MatrixRep& rep, int h, const Cyclo& zeta) {
  const GroupPtr& g = rep.group();
  if (h < 0 || h >= g->order()) throw DomainError("element index out of range");
  const int r = g->element_order(h);
  if (zeta.pow(r) != Cyclo(1)) throw DomainError(zeta.to_string() + " is not a root of unity of order dividing " + std::to_string(r));
  const Cyclo zinv = zeta.inverse();
  Matrix<Cyclo> proj(rep.dim(), rep.dim());
  Cyclo coef(1);
  for (int a = 0, x = 0; a < r; ++a, x = g->mul(h, x)) {
    proj = proj + rep(x).scaled(coef);
    coef *= zinv;
  }
  return exact_rank(proj.scaled(Cyclo(make_rational(1, r))));
}

/// sum over the r-th roots zeta of zeta * dim V^(h, zeta).
inline Cyclo eigen_trace(const MatrixRep& rep, int h) {
  const int r = rep.group()->element_order(h);
  Cyclo total;
  for (int j = 0; j < r; ++j) {
    Cyclo z = root_of_unity(r, j);
    total += z * Cyclo(static_cast<long>(eigencomponent_dim(rep, h, z)));
  }
  return total;
}

// ---------------------------------------------------------------------------
// Equivariant bundles on [X/G] and functions on the inertia

/// A class in K0([X/G]) = sum over orbits of R(Stab): one virtual character
/// per orbit, on the stabilizer of the orbit representative.
struct VirtualEqBundle {
  FiniteGSet base;
  OrbitDecomposition orbits;
  std::vector<SubgroupView> stabilizers;
  std::vector<ClassFunction> characters;

  bool genuine() const {
    return std::all_of(characters.begin(), characters.end(), [](const ClassFunction& c) { return c.genuine; });
  }

  /// Character of the fibre at x evaluated at h in Stab(x), transported to the
  /// orbit representative by the element carrying it to x.
  Cyclo at(int x, int h) const {
    const GroupPtr& g = base.group();
    const int o = orbits.orbit_of[x];
    const int t = orbits.from_rep[x];
    const int local = stabilizers[o].sub.local_index(g->mul(g->mul(g->inv(t), h), t));
    if (local < 0) throw DomainError("element " + std::to_string(h) + " does not fix point " + std::to_string(x));
    return characters[o](local);
  }
};

inline std::vector<SubgroupView> orbit_stabilizers(const FiniteGSet& x, const OrbitDecomposition& o) {
  std::vector<SubgroupView> out;
  for (int rep : o.representatives) out.push_back(view(stabilizer(x, rep)));
  return out;
}

inline VirtualEqBundle make_bundle(const FiniteGSet& x, std::vector<ClassFunction> chars) {
  VirtualEqBundle b{x, orbits(x), {}, {}};
  b.stabilizers = orbit_stabilizers(x, b.orbits);
  if (chars.size() != b.stabilizers.size()) {
    throw ValidationError("bundle needs one character per orbit (" + std::to_string(b.stabilizers.size()) + "), got " +
                          std::to_string(chars.size()));
  }
  for (std::size_t o = 0; o < chars.size(); ++o) {
    if (!same_group(chars[o].group, b.stabilizers[o].group) || chars[o].values.size() != b.stabilizers[o].group->classes().size()) {
      throw ValidationError("character for orbit " + std::to_string(o) + " is not a class function on its stabilizer");
    }
    chars[o].group = b.stabilizers[o].group;
  }
  b.characters = std::move(chars);
  return b;
}

/// Builds a bundle from raw class values, one list per orbit.
inline VirtualEqBundle make_bundle(const FiniteGSet& x, const std::vector<std::vector<Cyclo>>& values, bool genuine = false) {
  auto stabs = orbit_stabilizers(x, orbits(x));
  if (values.size() != stabs.size()) {
    throw ValidationError("bundle needs one character per orbit (" + std::to_string(stabs.size()) + "), got " +
                          std::to_string(values.size()));
  }
  std::vector<ClassFunction> chars;
  for (std::size_t o = 0; o < values.size(); ++o) chars.push_back(class_function(stabs[o].group, values[o], genuine));
  return make_bundle(x, std::move(chars));
}

inline VirtualEqBundle structure_sheaf(const FiniteGSet& x) {
  auto stabs = orbit_stabilizers(x, orbits(x));
  std::vector<ClassFunction> chars;
  for (const auto& s : stabs) chars.push_back(trivial_character(s.group));
  return make_bundle(x, std::move(chars));
}

inline VirtualEqBundle tensor(const VirtualEqBundle& a, const VirtualEqBundle& b) {
  if (!(a.base == b.base)) throw DomainError("tensor product of bundles on different bases");
  std::vector<ClassFunction> chars;
  for (std::size_t o = 0; o < a.characters.size(); ++o) chars.push_back(a.characters[o] * b.characters[o]);
  return make_bundle(a.base, std::move(chars));
}

/// A function on the inertia points constant on G-orbits.
struct InertiaFunction {
  InertiaSet base;
  OrbitDecomposition orbits;
  std::vector<Cyclo> values;  // one per inertia orbit

  Cyclo at_point(int i) const { return values[orbits.orbit_of[i]]; }
  Cyclo at(int x, int h) const { return at_point(base.index_of(x, h)); }

  friend bool operator==(const InertiaFunction& a, const InertiaFunction& b) {
    return a.base.gset == b.base.gset && a.values == b.values;
  }
};

/// Builds an inertia function from per-point values, checking that they are
/// constant on orbits.
inline InertiaFunction inertia_function(InertiaSet in, const std::vector<Cyclo>& point_values) {
  OrbitDecomposition o = orbits(in.gset);
  std::vector<Cyclo> values(o.size());
  for (std::size_t k = 0; k < o.size(); ++k) values[k] = point_values[o.representatives[k]];
  for (int i = 0; i < in.gset.size(); ++i) {
    if (point_values[i] != values[o.orbit_of[i]]) {
      auto [x, h] = in.pairs[i];
      throw ConsistencyError("value at inertia point (" + std::to_string(x) + ", " + std::to_string(h) +
                             ") differs from its orbit representative");
    }
  }
  return InertiaFunction{std::move(in), std::move(o), std::move(values)};
}

/// phi(V)(x, h) = trace of h on the fibre V_x.
inline InertiaFunction devissage_phi(const VirtualEqBundle& bundle) {
  InertiaSet in = inertia(bundle.base);
  std::vector<Cyclo> values;
  values.reserve(in.pairs.size());
  for (auto [x, h] : in.pairs) values.push_back(bundle.at(x, h));
  return inertia_function(std::move(in), values);
}

enum class DevissageBasis { induced_cyclic, class_delta };

struct DevissageMatrix {
  Matrix<Cyclo> matrix;  // rows: inertia orbits; columns: source basis
  std::size_t source_dim = 0;
  std::size_t target_dim = 0;
  std::size_t rank = 0;
  std::vector<int> column_orbit;  // orbit of X each column lives on

  bool is_isomorphism() const { return source_dim == target_dim && rank == target_dim; }
};

/// Matrix of phi from per-orbit class-function bases to the inertia orbits.
inline DevissageMatrix devissage_matrix(const FiniteGSet& x, DevissageBasis basis = DevissageBasis::induced_cyclic) {
  OrbitDecomposition ox = orbits(x);
  auto stabs = orbit_stabilizers(x, ox);
  InertiaSet in = inertia(x);
  OrbitDecomposition oi = orbits(in.gset);
  std::vector<std::vector<ClassFunction>> per_orbit;
  for (const auto& s : stabs) {
    if (basis == DevissageBasis::induced_cyclic) {
      per_orbit.push_back(induced_cyclic_basis(s.group));
    } else {
      std::vector<ClassFunction> deltas;
      for (std::size_t c = 0; c < s.group->classes().size(); ++c) deltas.push_back(class_delta(s.group, static_cast<int>(c)));
      per_orbit.push_back(std::move(deltas));
    }
  }
  DevissageMatrix out;
  out.target_dim = oi.size();
  for (const auto& b : per_orbit) out.source_dim += b.size();
  out.matrix = Matrix<Cyclo>(out.target_dim, out.source_dim);
  const GroupPtr& g = x.group();
  std::size_t col = 0;
  for (std::size_t o = 0; o < per_orbit.size(); ++o) {
    for (const auto& chi : per_orbit[o]) {
      out.column_orbit.push_back(static_cast<int>(o));
      for (std::size_t row = 0; row < oi.size(); ++row) {
        auto [p, h] = in.pairs[oi.representatives[row]];
        if (ox.orbit_of[p] != static_cast<int>(o)) continue;
        const int t = ox.from_rep[p];
        out.matrix(row, col) = chi(stabs[o].sub.local_index(g->mul(g->mul(g->inv(t), h), t)));
      }
      ++col;
    }
  }
  out.rank = exact_rank(out.matrix);
  return out;
}

// ---------------------------------------------------------------------------
// Pushforwards

/// Pushforward along [X/G] -> [Y/G'] computed structurally. Over y in Y the
/// fibre is sum over the orbits of G x Stab(y) on
///   P_y = {(x, g') : g' f(x) = y},   (g, s).(x, g') = (g x, s g' rho(g)^-1),
/// of Ind_{g' rho(Stab x) g'^-1}^{Stab y} of V_x^(Stab x cap ker rho).
inline VirtualEqBundle pushforward(const EquivariantMap& f, const VirtualEqBundle& v) {
  if (!(f.source == v.base)) throw DomainError("bundle base differs from the source of the map");
  const FiniteGSet& x = f.source;
  const FiniteGSet& y = f.target;
  const GroupPtr& g = x.group();
  const GroupPtr& gp = y.group();
  OrbitDecomposition oy = orbits(y);
  auto stabs = orbit_stabilizers(y, oy);
  std::vector<ClassFunction> out;
  for (std::size_t o = 0; o < oy.size(); ++o) {
    const int yrep = oy.representatives[o];
    const SubgroupView& sy = stabs[o];
    ClassFunction total{sy.group, std::vector<Cyclo>(sy.group->classes().size()), v.genuine()};
    // orbits of G x Stab(y) on P_y, visited in (x, g') order
    std::vector<char> done(static_cast<std::size_t>(x.size()) * gp->order(), 0);
    for (int p = 0; p < x.size(); ++p) {
      for (int gq = 0; gq < gp->order(); ++gq) {
        if (y.act(f.point_map[p], gq) != yrep || done[static_cast<std::size_t>(p) * gp->order() + gq]) continue;
        for (int a = 0; a < g->order(); ++a)
          for (int s : sy.sub.elements) {
            const int q = x.act(p, a);
            const int gq2 = gp->mul(gp->mul(s, gq), gp->inv(f.hom[a]));
            done[static_cast<std::size_t>(q) * gp->order() + gq2] = 1;
          }
        // invariants of Stab(p) cap ker rho, as a rep of the transported image
        const Subgroup stab_p = stabilizer(x, p);
        int kernel = 0;
        for (int a : stab_p.elements) kernel += f.hom[a] == 0;
        std::vector<int> image_elems;
        for (int a : stab_p.elements) image_elems.push_back(gp->conj(gq, f.hom[a]));
        const SubgroupView img_in_y = view(make_subgroup(gp, image_elems));
        std::vector<int> local_img;
        for (int e : img_in_y.sub.elements) {
          const int l = sy.sub.local_index(e);
          if (l < 0) throw ConsistencyError("transported image leaves the target stabilizer");
          local_img.push_back(l);
        }
        const SubgroupView img = view(make_subgroup(sy.group, local_img));
        std::vector<Cyclo> vals(img.group->classes().size());
        for (std::size_t c = 0; c < vals.size(); ++c) {
          const int target = img.sub.elements[img.group->classes().representatives[c]];
          const int in_gp = sy.sub.elements[target];
          Cyclo sum;
          for (int a : stab_p.elements)
            if (gp->conj(gq, f.hom[a]) == in_gp) sum += v.at(p, a);
          vals[c] = sum / Cyclo(kernel);
        }
        total = total + induce(img, ClassFunction{img.group, std::move(vals), v.genuine()});
      }
    }
    out.push_back(std::move(total));
  }
  return make_bundle(y, std::move(out));
}

/// The inertia-side pushforward of a function on the inertia of X:
///   (f_* u)(y, s) = (1/|G|) sum_{x, g' : g' f(x) = y} sum_{h in Stab x, rho(h) = g'^-1 s g'} u(x, h).
inline InertiaFunction pushforward_inertia(const EquivariantMap& f, const InertiaFunction& u) {
  if (!(u.base.gset.group() == f.source.group()) || u.base.pairs.size() != inertia(f.source).pairs.size()) {
    throw DomainError("inertia function does not live on the source of the map");
  }
  const FiniteGSet& x = f.source;
  const FiniteGSet& y = f.target;
  const GroupPtr& g = x.group();
  const GroupPtr& gp = y.group();
  InertiaSet target = inertia(y);
  std::vector<Cyclo> values;
  for (auto [yy, s] : target.pairs) {
    Cyclo total;
    for (int p = 0; p < x.size(); ++p)
      for (int gq = 0; gq < gp->order(); ++gq) {
        if (y.act(f.point_map[p], gq) != yy) continue;
        const int want = gp->mul(gp->mul(gp->inv(gq), s), gq);
        for (int h = 0; h < g->order(); ++h)
          if (x.act(p, h) == p && f.hom[h] == want) total += u.at(p, h);
      }
    values.push_back(total / Cyclo(g->order()));
  }
  return inertia_function(std::move(target), values);
}

struct CheckedPushforward {
  VirtualEqBundle bundle;
  InertiaFunction inertia_side;
};

/// Pushforward with the Lefschetz check phi(f_* V) = f_*(phi V).
inline CheckedPushforward pushforward_checked(const EquivariantMap& f, const VirtualEqBundle& v) {
  VirtualEqBundle w = pushforward(f, v);
  InertiaFunction lhs = devissage_phi(w);
  InertiaFunction rhs = pushforward_inertia(f, devissage_phi(v));
  if (lhs.values != rhs.values) throw ConsistencyError("structural and inertia-side pushforwards disagree");
  return CheckedPushforward{std::move(w), std::move(rhs)};
}

struct PointPushforward {
  Cyclo source_side;   // sum over orbits of invariants of the local character
  Cyclo inertia_side;  // (1/|G|) sum over inertia points of phi
};

/// chi([X/G], V), computed on both sides; they must agree.
inline PointPushforward pushforward_to_point(const VirtualEqBundle& v) {
  PointPushforward out;
  for (const auto& chi : v.characters) out.source_side += invariants_dim(chi);
  InertiaFunction phi = devissage_phi(v);
  for (int i = 0; i < phi.base.gset.size(); ++i) out.inertia_side += phi.at_point(i);
  out.inertia_side /= Cyclo(v.base.group()->order());
  if (out.source_side != out.inertia_side) {
    throw ConsistencyError("pushforward to a point: source side " + out.source_side.to_string() + " but inertia side " +
                           out.inertia_side.to_string());
  }
  if (v.genuine()) {
    const Cyclo& r = out.source_side;
    if (!(r.is_rational() && is_integer(r.rational_value()) && r.rational_value() >= 0)) {
      throw ConsistencyError("genuine bundle pushed to a non-integer " + r.to_string());
    }
  }
  return out;
}

}  // namespace stackyrr
