#pragma once

// Finite groups as Cayley tables.
//
// Elements are indices 0..n-1 with the identity at 0. Groups built from
// permutations are enumerated breadth-first from the identity, multiplying on
// the left by the generators in input order, so element numbering is
// reproducible. Permutation products compose right to left:
// (g*h)(i) = g(h(i)).

#include <algorithm>
#include <bit>
#include <cctype>
#include <deque>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "errors.hpp"
#include "rational.hpp"

namespace stackyrr {

using Permutation = std::vector<int>;

struct ConjClassTable {
  std::vector<std::vector<int>> classes;  // sorted; ordered by representative
  std::vector<int> representatives;       // minimal index of each class
  std::vector<int> class_sizes;
  std::vector<int> centralizer_orders;
  std::vector<int> class_of;  // element -> class index

  std::size_t size() const { return classes.size(); }
};

class FiniteGroup;
using GroupPtr = std::shared_ptr<const FiniteGroup>;

class FiniteGroup {
 public:
  int order() const { return n_; }
  static constexpr int identity() { return 0; }

  int mul(int a, int b) const { return table_[static_cast<std::size_t>(a) * n_ + b]; }
  int inv(int a) const { return inv_[a]; }
  int conj(int g, int h) const { return mul(mul(g, h), inv_[g]); }  // g h g^-1
  bool commute(int a, int b) const { return mul(a, b) == mul(b, a); }

  int element_order(int a) const {
    int k = 1;
    for (int x = a; x != 0; x = mul(x, a)) ++k;
    return k;
  }

  int power(int a, long e) const {
    const long r = element_order(a);
    e = ((e % r) + r) % r;
    int x = 0;
    for (long i = 0; i < e; ++i) x = mul(x, a);
    return x;
  }

  bool is_abelian() const {
    for (int g : generators_)
      for (int h : generators_)
        if (!commute(g, h)) return false;
    return true;
  }

  /// Generating set. For permutation input these are the images of the input
  /// generators, in input order.
  const std::vector<int>& generators() const { return generators_; }

  /// Breadth-first order from the identity; every element other than the
  /// identity equals generators()[word_generator(e)] * word_parent(e), and the
  /// parent precedes it in this order.
  const std::vector<int>& bfs_order() const { return bfs_order_; }
  int word_generator(int e) const { return word_gen_[e]; }
  int word_parent(int e) const { return word_parent_[e]; }

  const ConjClassTable& classes() const { return classes_; }
  int class_of(int e) const { return classes_.class_of[e]; }

  /// Permutation dictionary when the group was built from permutations.
  const std::optional<std::vector<Permutation>>& permutations() const { return perms_; }

  const std::vector<int>& table() const { return table_; }

  /// Trusted constructor: the table must already satisfy the group axioms.
  /// Use group_from_table for untrusted input.
  static GroupPtr from_valid_table(int n, std::vector<int> table, std::vector<int> generators = {},
                                   std::optional<std::vector<Permutation>> perms = std::nullopt) {
    auto g = std::shared_ptr<FiniteGroup>(new FiniteGroup());
    g->n_ = n;
    g->table_ = std::move(table);
    g->perms_ = std::move(perms);
    g->inv_.assign(n, -1);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        if (g->mul(a, b) == 0) {
          g->inv_[a] = b;
          break;
        }
    if (generators.empty()) generators = greedy_generators(*g);
    g->generators_ = std::move(generators);
    g->build_words();
    g->build_classes();
    return g;
  }

 private:
  FiniteGroup() = default;

  static std::vector<int> greedy_generators(const FiniteGroup& g) {
    std::vector<int> gens;
    std::vector<char> in(g.n_, 0);
    in[0] = 1;
    std::vector<int> members{0};
    for (int x = 1; x < g.n_; ++x) {
      if (in[x]) continue;
      gens.push_back(x);
      // closure of the current members under left multiplication by gens
      std::deque<int> queue(members.begin(), members.end());
      while (!queue.empty()) {
        int y = queue.front();
        queue.pop_front();
        for (int s : gens) {
          int z = g.mul(s, y);
          if (!in[z]) {
            in[z] = 1;
            members.push_back(z);
            queue.push_back(z);
          }
        }
      }
    }
    return gens;
  }

  void build_words() {
    word_gen_.assign(n_, -1);
    word_parent_.assign(n_, -1);
    std::vector<char> seen(n_, 0);
    seen[0] = 1;
    bfs_order_ = {0};
    for (std::size_t head = 0; head < bfs_order_.size(); ++head) {
      int e = bfs_order_[head];
      for (std::size_t s = 0; s < generators_.size(); ++s) {
        int x = mul(generators_[s], e);
        if (seen[x]) continue;
        seen[x] = 1;
        word_gen_[x] = static_cast<int>(s);
        word_parent_[x] = e;
        bfs_order_.push_back(x);
      }
    }
  }

  void build_classes() {
    classes_.class_of.assign(n_, -1);
    for (int x = 0; x < n_; ++x) {
      if (classes_.class_of[x] != -1) continue;
      const int c = static_cast<int>(classes_.classes.size());
      std::vector<int> members{x};
      classes_.class_of[x] = c;
      for (std::size_t head = 0; head < members.size(); ++head) {
        for (int s : generators_) {
          int y = conj(s, members[head]);
          if (classes_.class_of[y] == -1) {
            classes_.class_of[y] = c;
            members.push_back(y);
          }
        }
      }
      std::sort(members.begin(), members.end());
      classes_.representatives.push_back(x);
      classes_.class_sizes.push_back(static_cast<int>(members.size()));
      classes_.centralizer_orders.push_back(n_ / static_cast<int>(members.size()));
      classes_.classes.push_back(std::move(members));
    }
  }

  int n_ = 1;
  std::vector<int> table_{0};
  std::vector<int> inv_{0};
  std::vector<int> generators_;
  std::vector<int> bfs_order_;
  std::vector<int> word_gen_;
  std::vector<int> word_parent_;
  ConjClassTable classes_;
  std::optional<std::vector<Permutation>> perms_;
};

/// Closure of permutation generators, all acting on the same set {0..d-1}.
inline GroupPtr group_from_permutations(const std::vector<Permutation>& gens) {
  std::size_t degree = gens.empty() ? 0 : gens.front().size();
  for (std::size_t i = 0; i < gens.size(); ++i) {
    const auto& p = gens[i];
    if (p.size() != degree) {
      throw ValidationError("generator " + std::to_string(i) + " acts on " + std::to_string(p.size()) +
                            " points, expected " + std::to_string(degree));
    }
    std::vector<char> hit(degree, 0);
    for (int v : p) {
      if (v < 0 || static_cast<std::size_t>(v) >= degree || hit[v]) {
        throw ValidationError("generator " + std::to_string(i) + " is not a bijection");
      }
      hit[v] = 1;
    }
  }
  Permutation id(degree);
  std::iota(id.begin(), id.end(), 0);
  std::vector<Permutation> elems{id};
  std::map<Permutation, int> index{{id, 0}};
  // left[s][x] = index of gens[s] * elems[x]
  std::vector<std::vector<int>> left(gens.size());
  const std::int64_t cap = group_order_cap();
  for (std::size_t head = 0; head < elems.size(); ++head) {
    for (std::size_t s = 0; s < gens.size(); ++s) {
      Permutation q(degree);
      for (std::size_t i = 0; i < degree; ++i) q[i] = gens[s][elems[head][i]];
      auto [it, fresh] = index.emplace(q, static_cast<int>(elems.size()));
      if (fresh) {
        if (static_cast<std::int64_t>(elems.size()) + 1 > cap) {
          throw ResourceError("group closure exceeds order cap " + std::to_string(cap));
        }
        elems.push_back(std::move(q));
      }
      left[s].push_back(it->second);
    }
  }
  const int n = static_cast<int>(elems.size());
  std::vector<int> gen_idx(gens.size());
  for (std::size_t s = 0; s < gens.size(); ++s) gen_idx[s] = left[s][0];
  // Row of x = s * p is left[s] applied to the row of p; BFS order is index order.
  std::vector<int> table(static_cast<std::size_t>(n) * n);
  std::vector<int> word_gen(n, -1), word_parent(n, -1);
  std::vector<char> seen(n, 0);
  seen[0] = 1;
  for (int e = 0; e < n; ++e) {
    for (std::size_t s = 0; s < gens.size(); ++s) {
      int x = left[s][e];
      if (!seen[x]) {
        seen[x] = 1;
        word_gen[x] = static_cast<int>(s);
        word_parent[x] = e;
      }
    }
  }
  std::iota(table.begin(), table.begin() + n, 0);
  for (int x = 1; x < n; ++x) {
    const auto& lrow = left[word_gen[x]];
    const int* prow = &table[static_cast<std::size_t>(word_parent[x]) * n];
    int* row = &table[static_cast<std::size_t>(x) * n];
    for (int b = 0; b < n; ++b) row[b] = lrow[prow[b]];
  }
  return FiniteGroup::from_valid_table(n, std::move(table), gen_idx, std::move(elems));
}

/// Validates a Cayley table (identity at index 0) and builds the group.
inline GroupPtr group_from_table(const std::vector<std::vector<int>>& rows) {
  const int n = static_cast<int>(rows.size());
  if (n == 0) throw ValidationError("empty multiplication table");
  if (n > group_order_cap()) throw ResourceError("table order exceeds cap");
  std::vector<int> table(static_cast<std::size_t>(n) * n);
  for (int a = 0; a < n; ++a) {
    if (static_cast<int>(rows[a].size()) != n) {
      throw ValidationError("row " + std::to_string(a) + " has " + std::to_string(rows[a].size()) + " entries, expected " +
                            std::to_string(n));
    }
    for (int b = 0; b < n; ++b) {
      int v = rows[a][b];
      if (v < 0 || v >= n) throw ValidationError("entry (" + std::to_string(a) + "," + std::to_string(b) + ") out of range");
      table[static_cast<std::size_t>(a) * n + b] = v;
    }
  }
  auto at = [&](int a, int b) { return table[static_cast<std::size_t>(a) * n + b]; };
  for (int a = 0; a < n; ++a) {
    if (at(0, a) != a || at(a, 0) != a) {
      throw ValidationError("identity law fails at element " + std::to_string(a) + " (identity must be index 0)");
    }
  }
  for (int a = 0; a < n; ++a) {
    bool has_inverse = false;
    for (int b = 0; b < n && !has_inverse; ++b) has_inverse = at(a, b) == 0 && at(b, a) == 0;
    if (!has_inverse) throw ValidationError("inverse law fails: element " + std::to_string(a) + " has no two-sided inverse");
  }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        if (at(at(a, b), c) != at(a, at(b, c))) {
          throw ValidationError("associativity fails for triple (" + std::to_string(a) + "," + std::to_string(b) + "," +
                                std::to_string(c) + ")");
        }
  return FiniteGroup::from_valid_table(n, std::move(table));
}

/// Subgroup stored as an explicit sorted element set of its parent.
struct Subgroup {
  GroupPtr parent;
  std::vector<int> elements;  // sorted, contains 0

  int order() const { return static_cast<int>(elements.size()); }
  bool contains(int g) const { return std::binary_search(elements.begin(), elements.end(), g); }
  int local_index(int g) const {
    auto it = std::lower_bound(elements.begin(), elements.end(), g);
    if (it == elements.end() || *it != g) return -1;
    return static_cast<int>(it - elements.begin());
  }
};

inline Subgroup make_subgroup(const GroupPtr& g, std::vector<int> elems) {
  std::sort(elems.begin(), elems.end());
  elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
  Subgroup h{g, std::move(elems)};
  if (h.elements.empty() || h.elements.front() != 0) throw ValidationError("subgroup must contain the identity");
  for (int a : h.elements) {
    if (a < 0 || a >= g->order()) throw ValidationError("subgroup element out of range");
    if (!h.contains(g->inv(a))) throw ValidationError("subgroup not closed under inverses at " + std::to_string(a));
    for (int b : h.elements)
      if (!h.contains(g->mul(a, b))) {
        throw ValidationError("subgroup not closed under products (" + std::to_string(a) + "," + std::to_string(b) + ")");
      }
  }
  return h;
}

inline Subgroup whole_group(const GroupPtr& g) {
  std::vector<int> all(g->order());
  std::iota(all.begin(), all.end(), 0);
  return Subgroup{g, std::move(all)};
}

inline Subgroup generated_subgroup(const GroupPtr& g, const std::vector<int>& gens) {
  std::vector<char> in(g->order(), 0);
  std::vector<int> members{0};
  in[0] = 1;
  for (std::size_t head = 0; head < members.size(); ++head) {
    for (int s : gens) {
      int z = g->mul(s, members[head]);
      if (!in[z]) {
        in[z] = 1;
        members.push_back(z);
      }
    }
  }
  std::sort(members.begin(), members.end());
  return Subgroup{g, std::move(members)};
}

/// Elements commuting with every listed element.
inline Subgroup centralizer(const GroupPtr& g, const std::vector<int>& elems) {
  if (elems.empty()) throw DomainError("centralizer needs a nonempty element list");
  for (int h : elems)
    if (h < 0 || h >= g->order()) throw DomainError("element index " + std::to_string(h) + " out of range");
  std::vector<int> out;
  for (int x = 0; x < g->order(); ++x) {
    if (std::all_of(elems.begin(), elems.end(), [&](int h) { return g->commute(x, h); })) out.push_back(x);
  }
  return Subgroup{g, std::move(out)};
}

/// The subgroup as a group in its own right; local index i is
/// h.elements[i] in the parent.
inline GroupPtr as_group(const Subgroup& h) {
  const int n = h.order();
  std::vector<int> local(h.parent->order(), -1);
  for (int i = 0; i < n; ++i) local[h.elements[i]] = i;
  std::vector<int> table(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) table[static_cast<std::size_t>(i) * n + j] = local[h.parent->mul(h.elements[i], h.elements[j])];
  return FiniteGroup::from_valid_table(n, std::move(table));
}

inline ConjClassTable conjugacy_classes(const GroupPtr& g) { return g->classes(); }

/// G x H with (a, b) at index a * |H| + b.
inline GroupPtr direct_product(const GroupPtr& g, const GroupPtr& h) {
  const int m = h->order();
  const int n = g->order() * m;
  std::vector<int> table(static_cast<std::size_t>(n) * n);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      table[static_cast<std::size_t>(x) * n + y] = g->mul(x / m, y / m) * m + h->mul(x % m, y % m);
  return FiniteGroup::from_valid_table(n, std::move(table));
}

enum class TupleAlgorithm { brute, centralizer_recursive };

namespace group_detail {

using Mask = std::vector<std::uint64_t>;

// masks[h] marks the elements commuting with h; `allowed` marks those
// commuting with the whole prefix.
inline void brute_tuples(const std::vector<Mask>& masks, const Mask& allowed, int depth, std::int64_t& count,
                         std::int64_t& visited, std::int64_t cap) {
  const std::int64_t n = static_cast<std::int64_t>(masks.size());
  visited += n;
  if (visited > cap) throw ResourceError("brute tuple enumeration exceeds cap " + std::to_string(cap));
  if (depth == 1) {
    for (std::uint64_t w : allowed) count += std::popcount(w);
    return;
  }
  Mask next(allowed.size());
  for (std::size_t word = 0; word < allowed.size(); ++word)
    for (std::uint64_t bits = allowed[word]; bits; bits &= bits - 1) {
      const std::size_t h = word * 64 + static_cast<std::size_t>(std::countr_zero(bits));
      for (std::size_t i = 0; i < next.size(); ++i) next[i] = allowed[i] & masks[h][i];
      brute_tuples(masks, next, depth - 1, count, visited, cap);
    }
}

class TupleCounter {
 public:
  explicit TupleCounter(const FiniteGroup& g) : g_(g) {}

  // Commuting m-tuples drawn from the subgroup with the given sorted elements.
  BigInt count(const std::vector<int>& elems, int m) {
    if (m == 0) return 1;
    if (m == 1) return static_cast<long>(elems.size());
    auto key = std::make_pair(elems, m);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    BigInt total = 0;
    std::vector<char> done(g_.order(), 0);
    for (int x : elems) {
      if (done[x]) continue;
      long class_size = 0;
      for (int s : elems) {
        int y = g_.conj(s, x);
        if (!done[y]) {
          done[y] = 1;
          ++class_size;
        }
      }
      std::vector<int> cent;
      for (int s : elems)
        if (g_.commute(s, x)) cent.push_back(s);
      total += class_size * count(cent, m - 1);
    }
    memo_.emplace(std::move(key), total);
    return total;
  }

 private:
  const FiniteGroup& g_;
  std::map<std::pair<std::vector<int>, int>, BigInt> memo_;
};

}  // namespace group_detail

/// Number of m-tuples of pairwise commuting elements of the subgroup.
inline BigInt count_commuting_tuples(const Subgroup& h, int m, TupleAlgorithm algorithm) {
  if (m < 0) throw DomainError("tuple length must be non-negative");
  if (algorithm == TupleAlgorithm::centralizer_recursive) {
    group_detail::TupleCounter counter(*h.parent);
    return counter.count(h.elements, m);
  }
  GroupPtr local = as_group(h);
  if (m == 0) return 1;
  const int n = local->order();
  const std::size_t words = (static_cast<std::size_t>(n) + 63) / 64;
  std::vector<group_detail::Mask> masks(n, group_detail::Mask(words));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (local->commute(a, b)) masks[a][b / 64] |= std::uint64_t{1} << (b % 64);
  group_detail::Mask all(words);
  for (int a = 0; a < n; ++a) all[a / 64] |= std::uint64_t{1} << (a % 64);
  // every counted tuple was visited, so the count is bounded by the cap
  std::int64_t count = 0;
  std::int64_t visited = 0;
  group_detail::brute_tuples(masks, all, m, count, visited, tuple_cap());
  return BigInt(std::to_string(count));
}

inline BigInt count_commuting_tuples(const GroupPtr& g, int m, TupleAlgorithm algorithm) {
  return count_commuting_tuples(whole_group(g), m, algorithm);
}

// ---------------------------------------------------------------------------
// Standard groups

inline Permutation cycle_permutation(int degree, const std::vector<int>& cycle) {
  Permutation p(degree);
  std::iota(p.begin(), p.end(), 0);
  for (std::size_t i = 0; i < cycle.size(); ++i) p[cycle[i]] = cycle[(i + 1) % cycle.size()];
  return p;
}

inline GroupPtr trivial_group() { return group_from_permutations({}); }

inline GroupPtr cyclic_group(int n) {
  if (n < 1) throw DomainError("cyclic group order must be positive");
  if (n == 1) return trivial_group();
  std::vector<int> c(n);
  std::iota(c.begin(), c.end(), 0);
  return group_from_permutations({cycle_permutation(n, c)});
}

/// Dihedral group of order 2n acting on the vertices of an n-gon (n >= 3).
inline GroupPtr dihedral_group(int n) {
  if (n < 3) throw DomainError("dihedral group needs n >= 3");
  std::vector<int> c(n);
  std::iota(c.begin(), c.end(), 0);
  Permutation flip(n);
  for (int i = 0; i < n; ++i) flip[i] = (n - i) % n;
  return group_from_permutations({cycle_permutation(n, c), flip});
}

inline GroupPtr symmetric_group(int n) {
  if (n < 1) throw DomainError("symmetric group degree must be positive");
  if (n == 1) return trivial_group();
  if (n == 2) return cyclic_group(2);
  std::vector<int> c(n);
  std::iota(c.begin(), c.end(), 0);
  return group_from_permutations({cycle_permutation(n, {0, 1}), cycle_permutation(n, c)});
}

inline GroupPtr alternating_group_4() {
  Permutation a = cycle_permutation(4, {0, 1, 2});
  Permutation b{1, 0, 3, 2};
  return group_from_permutations({a, b});
}

inline GroupPtr klein_four_group() { return group_from_permutations({{1, 0, 3, 2}, {2, 3, 0, 1}}); }

/// Quaternion group in its regular permutation representation.
inline GroupPtr quaternion_group() {
  // i = (0 1 3 6)(2 5 7 4), j = (0 2 3 7)(1 4 6 5)
  Permutation i(8), j(8);
  auto apply_cycles = [](Permutation& p, const std::vector<std::vector<int>>& cycles) {
    std::iota(p.begin(), p.end(), 0);
    for (const auto& c : cycles)
      for (std::size_t k = 0; k < c.size(); ++k) p[c[k]] = c[(k + 1) % c.size()];
  };
  apply_cycles(i, {{0, 1, 3, 6}, {2, 5, 7, 4}});
  apply_cycles(j, {{0, 2, 3, 7}, {1, 4, 6, 5}});
  return group_from_permutations({i, j});
}

/// Named presets: trivial, Z<n>, D<n>, S<n> (n <= 5), A4, V4, Q8.
inline GroupPtr preset_group(const std::string& name) {
  auto number = [&](std::size_t from) -> int {
    const std::string digits = name.substr(from);
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](unsigned char c) { return std::isdigit(c); }) ||
        digits.size() > 4) {
      throw ValidationError("unknown group preset '" + name + "'");
    }
    return std::stoi(digits);
  };
  if (name == "trivial") return trivial_group();
  if (name == "A4") return alternating_group_4();
  if (name == "V4") return klein_four_group();
  if (name == "Q8") return quaternion_group();
  if (name.size() >= 2 && name[0] == 'Z') return cyclic_group(number(1));
  if (name.size() >= 2 && name[0] == 'D') return dihedral_group(number(1));
  if (name.size() >= 2 && name[0] == 'S') {
    int n = number(1);
    if (n > 5) throw ValidationError("symmetric group preset limited to S5");
    return symmetric_group(n);
  }
  throw ValidationError("unknown group preset '" + name + "'");
}

}  // namespace stackyrr
