#pragma once

// Finite G-sets as zero-dimensional quotient stacks [X/G].
//
// Left actions throughout: act(act(x, h), g) == act(x, g*h). The inertia of
// [X/G] is presented by the G-set of pairs (x, h) with h.x = x, on which g
// acts by (g.x, g h g^-1); iterated inertia uses tuples of pairwise commuting
// elements fixing x.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "config.hpp"
#include "errors.hpp"
#include "group.hpp"

namespace stackyrr {

class FiniteGSet {
 public:
  /// Validates the action table, indexed [point][group element].
  static FiniteGSet make(GroupPtr group, int points, std::vector<int> table) {
    FiniteGSet x(std::move(group), points, std::move(table));
    x.validate();
    return x;
  }

  /// Closes an action given only on the group's generators.
  static FiniteGSet from_generator_images(GroupPtr group, int points, const std::vector<std::vector<int>>& images) {
    if (images.size() != group->generators().size()) {
      throw ValidationError("expected images for " + std::to_string(group->generators().size()) + " generators, got " +
                            std::to_string(images.size()));
    }
    for (std::size_t s = 0; s < images.size(); ++s) {
      if (static_cast<int>(images[s].size()) != points) {
        throw ValidationError("generator image " + std::to_string(s) + " has wrong length");
      }
      for (int v : images[s])
        if (v < 0 || v >= points) throw ValidationError("generator image " + std::to_string(s) + " out of range");
    }
    std::vector<int> table = close_table(*group, points, images);
    return make(std::move(group), points, std::move(table));
  }

  /// No validation; for constructions whose action laws hold by design.
  static FiniteGSet trusted(GroupPtr group, int points, std::vector<int> table) {
    return FiniteGSet(std::move(group), points, std::move(table));
  }

  /// Unvalidated closure of generator images.
  static FiniteGSet trusted_from_generator_images(GroupPtr group, int points, const std::vector<std::vector<int>>& images) {
    std::vector<int> table = close_table(*group, points, images);
    return trusted(std::move(group), points, std::move(table));
  }

  const GroupPtr& group() const { return group_; }
  int size() const { return points_; }
  int act(int x, int g) const { return table_[static_cast<std::size_t>(x) * group_->order() + g]; }
  const std::vector<int>& table() const { return table_; }

  friend bool operator==(const FiniteGSet& a, const FiniteGSet& b) {
    return a.group_ == b.group_ && a.points_ == b.points_ && a.table_ == b.table_;
  }

  /// Checks act(x, e) = x and act(x, s*h) = act(act(x, h), s) for every
  /// generator s, which implies the law for all pairs.
  void validate() const {
    const int n = group_->order();
    if (points_ < 0 || table_.size() != static_cast<std::size_t>(points_) * n) {
      throw ValidationError("action table must have " + std::to_string(points_) + " rows of " + std::to_string(n) + " entries");
    }
    for (int v : table_)
      if (v < 0 || v >= points_) throw ValidationError("action table entry out of range");
    for (int x = 0; x < points_; ++x) {
      if (act(x, 0) != x) throw ValidationError("identity does not fix point " + std::to_string(x));
      for (int s : group_->generators())
        for (int h = 0; h < n; ++h)
          if (act(x, group_->mul(s, h)) != act(act(x, h), s)) {
            throw ValidationError("action law fails at point " + std::to_string(x) + " for (g, h) = (" + std::to_string(s) +
                                  ", " + std::to_string(h) + ")");
          }
    }
  }

 private:
  // g = s * parent(g) along the BFS words, so each row follows from its parent
  static std::vector<int> close_table(const FiniteGroup& group, int points, const std::vector<std::vector<int>>& images) {
    const std::size_t n = static_cast<std::size_t>(group.order());
    std::vector<int> table(static_cast<std::size_t>(points) * n);
    for (int x = 0; x < points; ++x) {
      int* row = &table[static_cast<std::size_t>(x) * n];
      row[0] = x;
      for (int e : group.bfs_order())
        if (e != 0) row[e] = images[group.word_generator(e)][row[group.word_parent(e)]];
    }
    return table;
  }

  FiniteGSet(GroupPtr group, int points, std::vector<int> table)
      : group_(std::move(group)), points_(points), table_(std::move(table)) {}

  GroupPtr group_;
  int points_ = 0;
  std::vector<int> table_;
};

inline FiniteGSet trivial_action(const GroupPtr& g, int points) {
  std::vector<int> table(static_cast<std::size_t>(points) * g->order());
  for (int x = 0; x < points; ++x)
    std::fill(table.begin() + static_cast<std::ptrdiff_t>(x) * g->order(),
              table.begin() + static_cast<std::ptrdiff_t>(x + 1) * g->order(), x);
  return FiniteGSet::trusted(g, points, std::move(table));
}

/// Left translation on the left cosets aH, numbered by their minimal element.
inline FiniteGSet coset_action(const Subgroup& h) {
  const GroupPtr& g = h.parent;
  const int n = g->order();
  std::vector<int> coset_of(n, -1);
  int count = 0;
  for (int a = 0; a < n; ++a) {
    if (coset_of[a] != -1) continue;
    for (int x : h.elements) coset_of[g->mul(a, x)] = count;
    ++count;
  }
  std::vector<int> rep(count);
  for (int a = n - 1; a >= 0; --a) rep[coset_of[a]] = a;
  std::vector<int> table(static_cast<std::size_t>(count) * n);
  for (int c = 0; c < count; ++c)
    for (int x = 0; x < n; ++x) table[static_cast<std::size_t>(c) * n + x] = coset_of[g->mul(x, rep[c])];
  return FiniteGSet::trusted(g, count, std::move(table));
}

/// Natural action of a permutation group on its underlying set.
inline FiniteGSet natural_action(const GroupPtr& g) {
  if (!g->permutations()) throw DomainError("group has no permutation dictionary");
  const auto& perms = *g->permutations();
  const int d = perms.empty() ? 0 : static_cast<int>(perms.front().size());
  const int n = g->order();
  std::vector<int> table(static_cast<std::size_t>(d) * n);
  for (int x = 0; x < d; ++x)
    for (int e = 0; e < n; ++e) table[static_cast<std::size_t>(x) * n + e] = perms[e][x];
  return FiniteGSet::trusted(g, d, std::move(table));
}

inline FiniteGSet disjoint_union(const FiniteGSet& a, const FiniteGSet& b) {
  if (a.group() != b.group()) throw DomainError("disjoint union needs a common group");
  std::vector<int> table = a.table();
  for (int v : b.table()) table.push_back(v + a.size());
  return FiniteGSet::trusted(a.group(), a.size() + b.size(), std::move(table));
}

struct OrbitDecomposition {
  std::vector<std::vector<int>> orbits;  // sorted members; ordered by representative
  std::vector<int> representatives;      // minimal point of each orbit
  std::vector<int> stabilizer_orders;
  std::vector<int> orbit_of;   // point -> orbit
  std::vector<int> from_rep;   // point x -> some g with g.rep = x

  std::size_t size() const { return orbits.size(); }
};

inline OrbitDecomposition orbits(const FiniteGSet& x) {
  const GroupPtr& g = x.group();
  OrbitDecomposition out;
  out.orbit_of.assign(x.size(), -1);
  out.from_rep.assign(x.size(), -1);
  for (int p = 0; p < x.size(); ++p) {
    if (out.orbit_of[p] != -1) continue;
    const int id = static_cast<int>(out.orbits.size());
    std::vector<int> members{p};
    out.orbit_of[p] = id;
    out.from_rep[p] = 0;
    for (std::size_t head = 0; head < members.size(); ++head) {
      const int y = members[head];
      for (int s : g->generators()) {
        const int z = x.act(y, s);
        if (out.orbit_of[z] != -1) continue;
        out.orbit_of[z] = id;
        out.from_rep[z] = g->mul(s, out.from_rep[y]);
        members.push_back(z);
      }
    }
    std::sort(members.begin(), members.end());
    out.representatives.push_back(p);
    out.stabilizer_orders.push_back(g->order() / static_cast<int>(members.size()));
    out.orbits.push_back(std::move(members));
  }
  return out;
}

/// Number of orbits, without building them.
inline std::size_t orbit_count(const FiniteGSet& x) {
  std::vector<char> seen(x.size(), 0);
  std::vector<int> stack;
  std::size_t count = 0;
  for (int p = 0; p < x.size(); ++p) {
    if (seen[p]) continue;
    ++count;
    seen[p] = 1;
    stack.assign(1, p);
    while (!stack.empty()) {
      const int y = stack.back();
      stack.pop_back();
      for (int s : x.group()->generators()) {
        const int z = x.act(y, s);
        if (!seen[z]) {
          seen[z] = 1;
          stack.push_back(z);
        }
      }
    }
  }
  return count;
}

inline Subgroup stabilizer(const FiniteGSet& x, int point) {
  std::vector<int> elems;
  for (int g = 0; g < x.group()->order(); ++g)
    if (x.act(point, g) == point) elems.push_back(g);
  return Subgroup{x.group(), std::move(elems)};
}

/// Points (x, h) with h.x = x, in lexicographic order.
struct InertiaSet {
  FiniteGSet gset;
  std::vector<std::pair<int, int>> pairs;

  int index_of(int point, int element) const {
    auto it = std::lower_bound(pairs.begin(), pairs.end(), std::make_pair(point, element));
    if (it == pairs.end() || *it != std::make_pair(point, element)) return -1;
    return static_cast<int>(it - pairs.begin());
  }
};

inline InertiaSet inertia(const FiniteGSet& x) {
  const GroupPtr& g = x.group();
  const std::size_t n = static_cast<std::size_t>(g->order());
  // pairs sorted by point then element; (p, h) sits at offset[p] + local[p][h]
  std::vector<std::pair<int, int>> pairs;
  std::vector<int> offset(x.size());
  std::vector<int> local(x.size() * n, -1);
  for (int p = 0; p < x.size(); ++p) {
    offset[p] = static_cast<int>(pairs.size());
    for (int h = 0; h < static_cast<int>(n); ++h)
      if (x.act(p, h) == p) {
        local[p * n + h] = static_cast<int>(pairs.size()) - offset[p];
        pairs.emplace_back(p, h);
      }
    if (static_cast<std::int64_t>(pairs.size()) > tuple_cap()) throw ResourceError("inertia set exceeds point cap");
  }
  // (x, h) -> (s.x, s h s^-1) for each generator s
  std::vector<std::vector<int>> images(g->generators().size(), std::vector<int>(pairs.size()));
  for (std::size_t k = 0; k < images.size(); ++k) {
    const int s = g->generators()[k];
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const int q = x.act(pairs[i].first, s);
      images[k][i] = offset[q] + local[q * n + g->conj(s, pairs[i].second)];
    }
  }
  const int count = static_cast<int>(pairs.size());
  return InertiaSet{FiniteGSet::trusted_from_generator_images(g, count, images), std::move(pairs)};
}

/// Points (x, h_1, ..., h_m): the h_i pairwise commute and fix x. Tuples are
/// stored flat with stride depth + 1 in lexicographic order.
struct IteratedInertia {
  FiniteGSet gset;
  int depth = 0;
  std::vector<int> tuples;

  std::size_t stride() const { return static_cast<std::size_t>(depth) + 1; }
  std::vector<int> tuple(int point) const {
    auto first = tuples.begin() + static_cast<std::ptrdiff_t>(point * stride());
    return {first, first + static_cast<std::ptrdiff_t>(stride())};
  }
};

namespace gset_detail {

/// Prefix trie over tuples (point, h_1, ..., h_m): the first level is keyed
/// by point, later levels by group element, and the last level holds the
/// tuple's index.
class TupleTrie {
 public:
  TupleTrie(int points, int order, int depth) : n_(static_cast<std::size_t>(order)), depth_(depth), root_(points, -1) {}

  void insert(const int* tuple, int index) {
    if (depth_ == 0) {
      root_[tuple[0]] = index;
      return;
    }
    if (root_[tuple[0]] < 0) root_[tuple[0]] = grow();
    std::size_t node = static_cast<std::size_t>(root_[tuple[0]]);
    for (int j = 1; j < depth_; ++j) {
      const std::size_t at = node * n_ + tuple[j];
      if (nodes_[at] < 0) {
        const int child = grow();
        nodes_[at] = child;
      }
      node = static_cast<std::size_t>(nodes_[at]);
    }
    nodes_[node * n_ + tuple[depth_]] = index;
  }

  int find(const int* tuple) const {
    int node = root_[tuple[0]];
    for (int j = 1; j <= depth_ && node >= 0; ++j) node = nodes_[static_cast<std::size_t>(node) * n_ + tuple[j]];
    return node;
  }

 private:
  int grow() {
    nodes_.resize(nodes_.size() + n_, -1);
    return static_cast<int>(nodes_.size() / n_) - 1;
  }

  std::size_t n_;
  int depth_;
  std::vector<int> root_;
  std::vector<int> nodes_;
};

inline void extend(const FiniteGroup& g, const std::vector<int>& stab, int depth, std::vector<int>& prefix,
                   std::vector<int>& out, std::int64_t cap) {
  if (depth == 0) {
    out.insert(out.end(), prefix.begin(), prefix.end());
    if (static_cast<std::int64_t>(out.size() / prefix.size()) > cap) {
      throw ResourceError("iterated inertia exceeds point cap " + std::to_string(cap));
    }
    return;
  }
  for (int h : stab) {
    bool ok = true;
    for (std::size_t i = 1; i < prefix.size() && ok; ++i) ok = g.commute(prefix[i], h);
    if (!ok) continue;
    prefix.push_back(h);
    extend(g, stab, depth - 1, prefix, out, cap);
    prefix.pop_back();
  }
}

}  // namespace gset_detail

inline IteratedInertia iterated_inertia(const FiniteGSet& x, int m) {
  if (m < 0) throw DomainError("inertia depth must be non-negative");
  const GroupPtr& g = x.group();
  const int n = g->order();
  const std::size_t stride = static_cast<std::size_t>(m) + 1;
  std::vector<int> tuples;
  std::vector<int> prefix;
  for (int p = 0; p < x.size(); ++p) {
    std::vector<int> stab;
    for (int h = 0; h < n; ++h)
      if (x.act(p, h) == p) stab.push_back(h);
    prefix.assign(1, p);
    gset_detail::extend(*g, stab, m, prefix, tuples, tuple_cap());
  }
  const std::size_t count = tuples.size() / stride;
  gset_detail::TupleTrie trie(x.size(), n, m);
  for (std::size_t i = 0; i < count; ++i) trie.insert(&tuples[i * stride], static_cast<int>(i));
  std::vector<std::vector<int>> images(g->generators().size(), std::vector<int>(count));
  std::vector<int> image(stride);
  for (std::size_t k = 0; k < images.size(); ++k) {
    const int s = g->generators()[k];
    for (std::size_t i = 0; i < count; ++i) {
      const int* t = &tuples[i * stride];
      image[0] = x.act(t[0], s);
      for (std::size_t j = 1; j < stride; ++j) image[j] = g->conj(s, t[j]);
      images[k][i] = trie.find(image.data());
    }
  }
  return IteratedInertia{FiniteGSet::trusted_from_generator_images(g, static_cast<int>(count), images), m, std::move(tuples)};
}

/// True when `map` is a bijection from a's points to b's points commuting with
/// the actions of the shared group.
inline bool is_gset_isomorphism(const FiniteGSet& a, const FiniteGSet& b, const std::vector<int>& map) {
  if (a.group() != b.group() || a.size() != b.size() || static_cast<int>(map.size()) != a.size()) return false;
  std::vector<char> hit(b.size(), 0);
  for (int v : map) {
    if (v < 0 || v >= b.size() || hit[v]) return false;
    hit[v] = 1;
  }
  for (int x = 0; x < a.size(); ++x)
    for (int g = 0; g < a.group()->order(); ++g)
      if (map[a.act(x, g)] != b.act(map[x], g)) return false;
  return true;
}

/// The natural bijection inertia(I^m X) -> I^{m+1} X sending ((x, h..), h')
/// to (x, h.., h'). Throws ConsistencyError unless it is an isomorphism of
/// G-sets.
inline std::vector<int> inertia_relabeling(const IteratedInertia& base, const InertiaSet& outer, const IteratedInertia& next) {
  if (next.depth != base.depth + 1) throw DomainError("relabeling needs consecutive inertia depths");
  std::vector<int> map(outer.pairs.size(), -1);
  std::vector<int> key;
  for (std::size_t i = 0; i < outer.pairs.size(); ++i) {
    const auto [y, h] = outer.pairs[i];
    key = base.tuple(y);
    key.push_back(h);
    // next.tuples is sorted lexicographically by tuple
    int lo = 0, hi = next.gset.size();
    while (lo < hi) {
      int mid = (lo + hi) / 2;
      auto first = next.tuples.begin() + static_cast<std::ptrdiff_t>(mid * next.stride());
      if (std::lexicographical_compare(first, first + static_cast<std::ptrdiff_t>(next.stride()), key.begin(), key.end()))
        lo = mid + 1;
      else
        hi = mid;
    }
    if (lo < next.gset.size() && next.tuple(lo) == key) map[i] = lo;
  }
  if (!is_gset_isomorphism(outer.gset, next.gset, map)) {
    throw ConsistencyError("inertia of iterated inertia is not isomorphic to the next iterate");
  }
  return map;
}

/// A validated morphism [X/G] -> [Y/G'] given by a point map and a group
/// homomorphism.
struct EquivariantMap {
  FiniteGSet source;
  FiniteGSet target;
  std::vector<int> point_map;  // X -> Y
  std::vector<int> hom;        // G -> G'
};

inline EquivariantMap equivariant_map(const FiniteGSet& x, const FiniteGSet& y, std::vector<int> f, std::vector<int> rho) {
  const GroupPtr& g = x.group();
  const GroupPtr& h = y.group();
  if (static_cast<int>(rho.size()) != g->order()) throw ValidationError("homomorphism must list one image per element");
  if (static_cast<int>(f.size()) != x.size()) throw ValidationError("point map must list one image per point");
  for (int v : rho)
    if (v < 0 || v >= h->order()) throw ValidationError("homomorphism image out of range");
  for (int v : f)
    if (v < 0 || v >= y.size()) throw ValidationError("point map image out of range");
  for (int a = 0; a < g->order(); ++a)
    for (int b = 0; b < g->order(); ++b)
      if (rho[g->mul(a, b)] != h->mul(rho[a], rho[b])) {
        throw ValidationError("not a homomorphism: witness (" + std::to_string(a) + ", " + std::to_string(b) + ")");
      }
  for (int p = 0; p < x.size(); ++p)
    for (int a = 0; a < g->order(); ++a)
      if (f[x.act(p, a)] != y.act(f[p], rho[a])) {
        throw ValidationError("map is not equivariant: witness (g, x) = (" + std::to_string(a) + ", " + std::to_string(p) + ")");
      }
  return EquivariantMap{x, y, std::move(f), std::move(rho)};
}

/// The structure map [X/G] -> [pt/1].
inline EquivariantMap map_to_point(const FiniteGSet& x) {
  FiniteGSet pt = trivial_action(trivial_group(), 1);
  return equivariant_map(x, pt, std::vector<int>(x.size(), 0), std::vector<int>(x.group()->order(), 0));
}

}  // namespace stackyrr
