#include <gtest/gtest.h>

#include <random>

#include "group_zoo.hpp"
#include "stackyrr/character.hpp"

namespace stackyrr {
namespace {

FiniteGSet pt(const GroupPtr& g) { return trivial_action(g, 1); }

// value of a class function on the class containing an element of the given order
Cyclo on_order(const ClassFunction& chi, int order) {
  const GroupPtr& g = chi.group;
  for (int a = 0; a < g->order(); ++a)
    if (g->element_order(a) == order) return chi(a);
  throw std::logic_error("no element of that order");
}

Matrix<Cyclo> mat(std::initializer_list<std::initializer_list<long>> rows) {
  Matrix<Cyclo> m(rows.size(), rows.begin()->size());
  std::size_t i = 0;
  for (auto r : rows) {
    std::size_t j = 0;
    for (long v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

// random non-negative combination of characters induced from cyclic subgroups
ClassFunction random_genuine(std::mt19937& rng, const GroupPtr& g) {
  std::uniform_int_distribution<int> elem(0, g->order() - 1), coef(0, 2);
  ClassFunction chi{g, std::vector<Cyclo>(g->classes().size()), true};
  for (int t = 0; t < 3; ++t) {
    int c = elem(rng);
    int j = std::uniform_int_distribution<int>(0, g->element_order(c) - 1)(rng);
    chi = chi + scale(induced_cyclic_character(g, c, j), Cyclo(coef(rng)));
  }
  return chi;
}

VirtualEqBundle random_bundle(std::mt19937& rng, const FiniteGSet& x) {
  auto o = orbits(x);
  std::vector<ClassFunction> chars;
  for (const auto& s : orbit_stabilizers(x, o)) chars.push_back(random_genuine(rng, s.group));
  return make_bundle(x, std::move(chars));
}

TEST(CharacterOf, Examples) {
  auto s3 = symmetric_group(3);
  auto triv = character_of(trivial_rep(s3));
  for (const auto& v : triv.values) EXPECT_EQ(v, Cyclo(1));
  auto reg = character_of(regular_rep(s3));
  EXPECT_EQ(on_order(reg, 1), Cyclo(6));
  EXPECT_EQ(on_order(reg, 2), Cyclo(0));
  EXPECT_EQ(on_order(reg, 3), Cyclo(0));
  auto sign = character_of(sign_rep(s3));
  EXPECT_EQ(on_order(sign, 1), Cyclo(1));
  EXPECT_EQ(on_order(sign, 2), Cyclo(-1));
  EXPECT_EQ(on_order(sign, 3), Cyclo(1));
  EXPECT_TRUE(sign.genuine);
}

TEST(MatrixRep, RejectsBrokenGeneratorImages) {
  auto z2 = cyclic_group(2);
  EXPECT_NO_THROW(MatrixRep::from_generators(z2, {mat({{0, 1}, {1, 0}})}));
  EXPECT_THROW(MatrixRep::from_generators(z2, {mat({{1, 1}, {0, 1}})}), ValidationError);
  EXPECT_THROW(MatrixRep::from_generators(z2, {}), ValidationError);
  auto s3 = symmetric_group(3);
  // both generators to -1 breaks the relation for the 3-cycle
  EXPECT_THROW(MatrixRep::from_generators(s3, {mat({{-1}}), mat({{-1}})}), ValidationError);
}

TEST(Eigencomponents, Examples) {
  auto s3 = symmetric_group(3);
  auto reg = regular_rep(s3);
  EXPECT_EQ(eigencomponent_dim(reg, 0, Cyclo(1)), 6u);
  auto z3 = cyclic_group(3);
  auto r3 = regular_rep(z3);
  for (int j = 0; j < 3; ++j) EXPECT_EQ(eigencomponent_dim(r3, 1, root_of_unity(3, j)), 1u);
  EXPECT_THROW(eigencomponent_dim(r3, 1, root_of_unity(4, 1)), DomainError);
  EXPECT_THROW(eigencomponent_dim(r3, 1, Cyclo(2)), DomainError);
}

TEST(Eigencomponents, CompleteAndTraceCompatible) {
  for (const auto& [name, g] : testing::groups_upto_16()) {
    if (g->order() > 8) continue;
    std::vector<MatrixRep> reps{regular_rep(g)};
    for (const auto& x : testing::transitive_actions(g, 4)) reps.push_back(permutation_rep(x));
    if (g->permutations()) reps.push_back(tensor_product(sign_rep(g), permutation_rep(natural_action(g))));
    for (const auto& rep : reps) {
      for (int h = 0; h < g->order(); ++h) {
        const int r = g->element_order(h);
        std::size_t dims = 0;
        for (int j = 0; j < r; ++j) dims += eigencomponent_dim(rep, h, root_of_unity(r, j));
        EXPECT_EQ(dims, rep.dim()) << name;
        EXPECT_EQ(eigen_trace(rep, h), rep(h).trace()) << name;
      }
    }
  }
}

TEST(InvariantsDim, Examples) {
  for (const char* n : {"Z5", "S4", "Q8"}) EXPECT_EQ(invariants_dim(trivial_character(preset_group(n))), Cyclo(1));
  auto z3 = cyclic_group(3);
  EXPECT_EQ(invariants_dim(character_of(cyclic_character_rep(z3, 1))), Cyclo(0));
  EXPECT_EQ(invariants_dim(character_of(regular_rep(symmetric_group(3)))), Cyclo(1));
  // a flagged character with fractional invariants is caught
  auto bogus = class_function(cyclic_group(2), {Cyclo(1), Cyclo(0)}, true);
  EXPECT_THROW(invariants_dim(bogus), ConsistencyError);
}

TEST(InnerProduct, SignAndTrivialAreOrthogonal) {
  auto s4 = symmetric_group(4);
  auto sign = character_of(sign_rep(s4));
  EXPECT_EQ(inner_product(sign, sign), Cyclo(1));
  EXPECT_EQ(inner_product(sign, trivial_character(s4)), Cyclo(0));
  auto z5 = cyclic_group(5);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      auto a = character_of(cyclic_character_rep(z5, i));
      auto b = character_of(cyclic_character_rep(z5, j));
      EXPECT_EQ(inner_product(a, b), Cyclo(i == j ? 1 : 0));
    }
}

TEST(Induce, Examples) {
  auto s3 = symmetric_group(3);
  auto whole = view(whole_group(s3));
  auto sign = character_of(sign_rep(s3));
  // H = G: induction is the identity on class values
  EXPECT_EQ(induce(whole, restrict(sign, whole)).values, sign.values);
  auto z2 = view(generated_subgroup(s3, {1}));
  auto perm = induce(z2, trivial_character(z2.group));
  EXPECT_EQ(on_order(perm, 1), Cyclo(3));
  EXPECT_EQ(on_order(perm, 2), Cyclo(1));
  EXPECT_EQ(on_order(perm, 3), Cyclo(0));
  EXPECT_EQ(perm, character_of(permutation_rep(natural_action(s3))));
  auto scaled = induce(z2, trivial_character(z2.group), true);
  EXPECT_EQ(scaled.values[0], Cyclo(9));
}

TEST(Induce, FrobeniusAtIdentityAndReciprocity) {
  for (const auto& [name, g] : testing::groups_upto_16()) {
    std::mt19937 rng(static_cast<unsigned>(g->order()));
    for (const auto& h : testing::small_subgroups(g)) {
      auto hv = view(h);
      auto psi = random_genuine(rng, g);
      auto back = induce(hv, restrict(psi, hv));
      EXPECT_EQ(back(0), psi(0) * Cyclo(g->order() / h.order())) << name;
      auto chi = random_genuine(rng, hv.group);
      EXPECT_EQ(invariants_dim(induce(hv, chi)), invariants_dim(chi)) << name;
      // full reciprocity against the restricted character as well
      EXPECT_EQ(inner_product(induce(hv, chi), psi), inner_product(chi, restrict(psi, hv))) << name;
    }
  }
}

TEST(Restrict, Examples) {
  auto s3 = symmetric_group(3);
  auto perm = character_of(permutation_rep(natural_action(s3)));
  auto triv = view(Subgroup{s3, {0}});
  EXPECT_EQ(restrict(perm, triv).values, (std::vector<Cyclo>{Cyclo(3)}));
  int c = -1;
  for (int a = 0; a < 6; ++a)
    if (s3->element_order(a) == 3) c = a;
  auto z3 = view(generated_subgroup(s3, {c}));
  auto r = restrict(perm, z3);
  EXPECT_EQ(r(0), Cyclo(3));
  EXPECT_EQ(r(1), Cyclo(0));
  EXPECT_EQ(r(2), Cyclo(0));
  auto t = trivial_character(s3);
  EXPECT_EQ(invariants_dim(restrict(t, z3)), invariants_dim(t));
}

TEST(Devissage, PhiExamples) {
  auto x = natural_action(symmetric_group(3));
  auto phi = devissage_phi(structure_sheaf(x));
  for (const auto& v : phi.values) EXPECT_EQ(v, Cyclo(1));

  auto z2pt = pt(cyclic_group(2));
  auto sign = make_bundle(z2pt, std::vector<std::vector<Cyclo>>{{Cyclo(1), Cyclo(-1)}}, true);
  auto p2 = devissage_phi(sign);
  EXPECT_EQ(p2.at(0, 0), Cyclo(1));
  EXPECT_EQ(p2.at(0, 1), Cyclo(-1));

  auto local_sign = make_bundle(x, std::vector<std::vector<Cyclo>>{{Cyclo(1), Cyclo(-1)}}, true);
  auto p3 = devissage_phi(local_sign);
  ASSERT_EQ(p3.base.pairs.size(), 6u);
  for (auto [pnt, h] : p3.base.pairs) EXPECT_EQ(p3.at(pnt, h), Cyclo(h == 0 ? 1 : -1));
}

TEST(Devissage, PhiIsMultiplicativeOnTensorProducts) {
  for (const char* name : {"S3", "D4", "Q8", "Z6", "A4"}) {
    auto g = preset_group(name);
    for (const auto& x : testing::transitive_actions(g, 6)) {
      auto o = orbits(x);
      auto s = orbit_stabilizers(x, o)[0];
      std::vector<MatrixRep> reps{regular_rep(s.group)};
      for (const auto& y : testing::transitive_actions(s.group, 4)) reps.push_back(permutation_rep(y));
      for (const auto& a : reps) {
        for (const auto& b : reps) {
          if (a.dim() * b.dim() > 16) continue;
          auto va = make_bundle(x, {character_of(a)});
          auto vb = make_bundle(x, {character_of(b)});
          auto vab = make_bundle(x, {character_of(tensor_product(a, b))});
          auto pa = devissage_phi(va), pb = devissage_phi(vb), pab = devissage_phi(vab);
          for (std::size_t i = 0; i < pab.values.size(); ++i) EXPECT_EQ(pab.values[i], pa.values[i] * pb.values[i]) << name;
          EXPECT_EQ(devissage_phi(tensor(va, vb)).values, pab.values);
        }
      }
    }
  }
}

TEST(Devissage, MatrixExamples) {
  auto free = devissage_matrix(coset_action(Subgroup{cyclic_group(2), {0}}));
  EXPECT_EQ(free.matrix, Matrix<Cyclo>::identity(1));
  auto z2 = devissage_matrix(pt(cyclic_group(2)));
  Matrix<Cyclo> expect(2, 2);
  expect(0, 0) = 1; expect(0, 1) = 1; expect(1, 0) = 1; expect(1, 1) = -1;
  EXPECT_EQ(z2.matrix, expect);
  EXPECT_EQ(z2.rank, 2u);
  auto s3 = devissage_matrix(natural_action(symmetric_group(3)));
  EXPECT_EQ(s3.matrix.rows(), 2u);
  EXPECT_EQ(s3.matrix.cols(), 2u);
  EXPECT_TRUE(s3.is_isomorphism());
  // the delta basis gives a 0/1 matrix with one entry per row and column
  auto delta = devissage_matrix(pt(symmetric_group(3)), DevissageBasis::class_delta);
  EXPECT_TRUE(delta.is_isomorphism());
  for (std::size_t i = 0; i < delta.matrix.rows(); ++i) {
    int ones = 0;
    for (std::size_t j = 0; j < delta.matrix.cols(); ++j) ones += delta.matrix(i, j) == Cyclo(1);
    EXPECT_EQ(ones, 1);
  }
}

TEST(Devissage, CyclicPointGivesCharacterTable) {
  for (int n = 2; n <= 8; ++n) {
    auto d = devissage_matrix(pt(cyclic_group(n)));
    ASSERT_TRUE(d.is_isomorphism());
    // columns are the n characters; the row of the generator holds all n-th roots
    std::vector<std::string> row;
    for (std::size_t j = 0; j < d.matrix.cols(); ++j) row.push_back(d.matrix(1, j).to_string());
    std::sort(row.begin(), row.end());
    std::vector<std::string> roots;
    for (int k = 0; k < n; ++k) roots.push_back(root_of_unity(n, k).to_string());
    std::sort(roots.begin(), roots.end());
    EXPECT_EQ(row, roots);
  }
}

TEST(Devissage, FullRankOnZoo) {
  for (const auto& [name, g] : testing::groups_upto_24()) {
    auto actions = testing::transitive_actions(g, 8);
    for (std::size_t i = 0; i < actions.size(); ++i) {
      auto d = devissage_matrix(actions[i]);
      EXPECT_TRUE(d.is_isomorphism()) << name;
      auto inert = orbits(inertia(actions[i]).gset).size();
      auto stab = view(stabilizer(actions[i], 0));
      EXPECT_EQ(inert, stab.group->classes().size()) << name;
    }
    // a two-orbit action
    if (actions.size() >= 2 && actions[0].size() + actions.back().size() <= 8) {
      EXPECT_TRUE(devissage_matrix(disjoint_union(actions[0], actions.back())).is_isomorphism()) << name;
    }
  }
}

TEST(Pushforward, PointExamples) {
  auto x = natural_action(symmetric_group(3));
  EXPECT_EQ(pushforward_to_point(structure_sheaf(x)).source_side, Cyclo(1));
  auto sign = make_bundle(pt(cyclic_group(2)), std::vector<std::vector<Cyclo>>{{Cyclo(1), Cyclo(-1)}}, true);
  auto ps = pushforward_to_point(sign);
  EXPECT_EQ(ps.source_side, Cyclo(0));
  EXPECT_EQ(ps.inertia_side, Cyclo(0));
  auto stab = orbit_stabilizers(x, orbits(x))[0];
  auto reg = make_bundle(x, {character_of(regular_rep(stab.group))});
  auto pr = pushforward_to_point(reg);
  EXPECT_EQ(pr.source_side, Cyclo(1));
  EXPECT_EQ(pr.inertia_side, Cyclo(1));
}

TEST(Pushforward, StructureSheafCountsOrbits) {
  auto s3 = symmetric_group(3);
  auto nat = natural_action(s3);
  auto x = disjoint_union(nat, disjoint_union(trivial_action(s3, 2), coset_action(Subgroup{s3, {0}})));
  EXPECT_EQ(pushforward_to_point(structure_sheaf(x)).source_side, Cyclo(static_cast<long>(orbits(x).size())));
}

TEST(Pushforward, LefschetzOnRandomBundles) {
  std::mt19937 rng(4242);
  for (const char* name : {"Z4", "S3", "D4", "Q8", "A4", "Z6"}) {
    auto g = preset_group(name);
    for (const auto& x : testing::transitive_actions(g, 8)) {
      for (int t = 0; t < 3; ++t) {
        auto v = random_bundle(rng, x);
        auto p = pushforward_to_point(v);
        EXPECT_EQ(p.source_side, p.inertia_side);
        // the general pushforward to the point agrees
        auto w = pushforward_checked(map_to_point(x), v).bundle;
        EXPECT_EQ(w.characters[0].values[0], p.source_side) << name;
      }
    }
  }
}

TEST(Pushforward, VirtualBundlesStillAgree) {
  auto x = natural_action(symmetric_group(3));
  auto v = make_bundle(x, std::vector<std::vector<Cyclo>>{{Cyclo(2), root_of_unity(5, 1)}});
  auto p = pushforward_to_point(v);
  EXPECT_EQ(p.source_side, (Cyclo(2) + root_of_unity(5, 1)) / Cyclo(2));
}

TEST(Pushforward, AlongMapsBetweenQuotients) {
  std::mt19937 rng(17);
  auto s3 = symmetric_group(3);
  // identity map returns the bundle
  auto x = natural_action(s3);
  std::vector<int> ids(6);
  std::iota(ids.begin(), ids.end(), 0);
  auto v = random_bundle(rng, x);
  auto idmap = equivariant_map(x, x, {0, 1, 2}, ids);
  EXPECT_EQ(pushforward_checked(idmap, v).bundle.characters[0], v.characters[0]);

  // [pt/S3] -> [pt/Z2] along the sign: the trivial rep of S3 goes to trivial,
  // the regular rep to its A3-invariants, the regular rep of Z2
  auto z2 = cyclic_group(2);
  std::vector<int> sign_hom(6);
  auto sgn = character_of(sign_rep(s3));
  for (int a = 0; a < 6; ++a) sign_hom[a] = sgn(a) == Cyclo(1) ? 0 : 1;
  auto f = equivariant_map(pt(s3), pt(z2), {0}, sign_hom);
  auto reg = make_bundle(pt(s3), {character_of(regular_rep(s3))});
  auto w = pushforward_checked(f, reg).bundle;
  EXPECT_EQ(w.characters[0].values, (std::vector<Cyclo>{Cyclo(2), Cyclo(0)}));
  auto w_sign = pushforward_checked(f, make_bundle(pt(s3), {sgn})).bundle;
  EXPECT_EQ(w_sign.characters[0].values, (std::vector<Cyclo>{Cyclo(1), Cyclo(-1)}));

  // coset projection S3/1 -> S3/Z2 is a covering; random bundles on both
  auto cover = coset_action(Subgroup{s3, {0}});
  auto base = coset_action(generated_subgroup(s3, {1}));
  std::vector<int> proj(6);
  for (int a = 0; a < 6; ++a) proj[a] = base.act(0, a);
  auto cov = equivariant_map(cover, base, proj, ids);
  for (int t = 0; t < 5; ++t) EXPECT_NO_THROW(pushforward_checked(cov, random_bundle(rng, cover)));
}

TEST(Pushforward, LefschetzOnRandomMaps) {
  std::mt19937 rng(99);
  for (const char* name : {"S3", "D4", "A4", "Z6"}) {
    auto g = preset_group(name);
    std::vector<int> ids(g->order());
    std::iota(ids.begin(), ids.end(), 0);
    for (const auto& k : testing::small_subgroups(g)) {
      // G/K -> G/H for every H containing K among the small subgroups
      for (const auto& h : testing::small_subgroups(g)) {
        if (!std::includes(h.elements.begin(), h.elements.end(), k.elements.begin(), k.elements.end())) continue;
        if (g->order() / k.order() > 8) continue;
        auto src = coset_action(k);
        auto dst = coset_action(h);
        std::vector<int> f(src.size());
        for (int a = 0; a < g->order(); ++a) f[src.act(0, a)] = dst.act(0, a);
        auto m = equivariant_map(src, dst, f, ids);
        EXPECT_NO_THROW(pushforward_checked(m, random_bundle(rng, src))) << name;
      }
    }
  }
}

}  // namespace
}  // namespace stackyrr
