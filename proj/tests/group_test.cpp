#include <gtest/gtest.h>

#include <set>
#include <tuple>

#include "group_zoo.hpp"
#include "stackyrr/group.hpp"

namespace stackyrr {
namespace {

using testing::groups_upto_16;
using testing::groups_upto_24;

TEST(FromPermutations, Examples) {
  EXPECT_EQ(group_from_permutations({{1, 0}})->order(), 2);
  EXPECT_EQ(group_from_permutations({{1, 0, 2}, {1, 2, 0}})->order(), 6);
  EXPECT_EQ(group_from_permutations({})->order(), 1);
}

TEST(FromPermutations, RejectsBadInput) {
  EXPECT_THROW(group_from_permutations({{0, 0, 1}}), ValidationError);
  EXPECT_THROW(group_from_permutations({{1, 0}, {1, 2, 0}}), ValidationError);
  set_group_order_cap(100);
  EXPECT_THROW(symmetric_group(5), ResourceError);
  set_group_order_cap(10080);
}

TEST(FromPermutations, DeterministicBfsIndexing) {
  auto a = symmetric_group(4);
  auto b = symmetric_group(4);
  EXPECT_EQ(a->table(), b->table());
  EXPECT_EQ(*a->permutations(), *b->permutations());
  // the first generator is element 1
  EXPECT_EQ((*a->permutations())[1], cycle_permutation(4, {0, 1}));
}

TEST(FromTable, Examples) {
  EXPECT_EQ(group_from_table({{0}})->order(), 1);
  std::vector<std::vector<int>> z4(4, std::vector<int>(4));
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) z4[a][b] = (a + b) % 4;
  auto g = group_from_table(z4);
  std::vector<int> orders;
  for (int a = 0; a < 4; ++a) orders.push_back(g->element_order(a));
  EXPECT_EQ(orders, (std::vector<int>{1, 4, 2, 4}));
}

TEST(FromTable, RejectsNonAssociative) {
  // a latin square with identity 0 that is not a group (order 5 loop)
  std::vector<std::vector<int>> t{{0, 1, 2, 3, 4}, {1, 0, 3, 4, 2}, {2, 4, 0, 1, 3}, {3, 2, 4, 0, 1}, {4, 3, 1, 2, 0}};
  try {
    group_from_table(t);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("triple"), std::string::npos);
  }
  EXPECT_THROW(group_from_table({{0, 1}, {1, 1}}), ValidationError);
  EXPECT_THROW(group_from_table({{1, 0}, {0, 1}}), ValidationError);
}

TEST(Presets, QuaternionGroup) {
  auto q = preset_group("Q8");
  ASSERT_EQ(q->order(), 8);
  int involutions = 0, order_four = 0;
  for (int a = 0; a < 8; ++a) {
    involutions += q->element_order(a) == 2;
    order_four += q->element_order(a) == 4;
  }
  EXPECT_EQ(involutions, 1);
  EXPECT_EQ(order_four, 6);
  EXPECT_EQ(q->classes().size(), 5u);
  EXPECT_THROW(preset_group("X9"), ValidationError);
}

TEST(ConjugacyClasses, Examples) {
  EXPECT_EQ(trivial_group()->classes().size(), 1u);
  const auto& s3 = conjugacy_classes(symmetric_group(3));
  std::multiset<int> sizes(s3.class_sizes.begin(), s3.class_sizes.end());
  EXPECT_EQ(sizes, (std::multiset<int>{1, 2, 3}));
  for (int n = 1; n <= 9; ++n) EXPECT_EQ(cyclic_group(n)->classes().size(), static_cast<std::size_t>(n));
}

TEST(ConjugacyClasses, ClassEquationOnZoo) {
  for (const auto& [name, g] : groups_upto_24()) {
    const auto& c = g->classes();
    int total = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      total += c.class_sizes[i];
      EXPECT_EQ(g->order() % c.class_sizes[i], 0) << name;
      EXPECT_EQ(c.class_sizes[i] * c.centralizer_orders[i], g->order()) << name;
      EXPECT_EQ(centralizer(g, {c.representatives[i]}).order(), c.centralizer_orders[i]) << name;
      EXPECT_EQ(c.representatives[i], c.classes[i].front()) << name;
    }
    EXPECT_EQ(total, g->order()) << name;
  }
}

TEST(ConjugacyClasses, SquareOfDirectProduct) {
  for (const char* name : {"S3", "Q8", "Z4", "A4"}) {
    auto g = preset_group(name);
    auto gg = direct_product(g, g);
    EXPECT_EQ(gg->classes().size(), g->classes().size() * g->classes().size()) << name;
  }
}

TEST(Centralizer, Examples) {
  auto s3 = symmetric_group(3);
  EXPECT_EQ(centralizer(s3, {0}).order(), 6);
  EXPECT_EQ(centralizer(s3, {1}).order(), 2);  // element 1 is the transposition (0 1)
  int three_cycle = -1;
  for (int a = 0; a < 6; ++a)
    if (s3->element_order(a) == 3) three_cycle = a;
  EXPECT_EQ(centralizer(s3, {three_cycle}).order(), 3);
  EXPECT_NO_THROW(make_subgroup(s3, centralizer(s3, {1}).elements));
}

TEST(Zoo, GroupsUpTo16ArePairwiseNonIsomorphic) {
  // order, class count, element orders, distinct squares, centre size
  std::set<std::tuple<int, std::size_t, std::vector<int>, std::size_t, int>> profiles;
  const auto zoo = groups_upto_16();
  for (const auto& [name, g] : zoo) {
    std::vector<int> orders(g->order() + 1, 0);
    std::set<int> squares;
    int centre = 0;
    for (int a = 0; a < g->order(); ++a) {
      ++orders[g->element_order(a)];
      squares.insert(g->mul(a, a));
      bool central = true;
      for (int b = 0; b < g->order() && central; ++b) central = g->commute(a, b);
      centre += central;
    }
    EXPECT_TRUE(profiles.emplace(g->order(), g->classes().size(), orders, squares.size(), centre).second) << name;
  }
  EXPECT_EQ(zoo.size(), 42u);
}

TEST(CommutingTuples, Examples) {
  auto s3 = symmetric_group(3);
  for (auto alg : {TupleAlgorithm::brute, TupleAlgorithm::centralizer_recursive}) {
    EXPECT_EQ(count_commuting_tuples(s3, 0, alg), 1);
    EXPECT_EQ(count_commuting_tuples(s3, 1, alg), 6);
    EXPECT_EQ(count_commuting_tuples(s3, 2, alg), 18);
    EXPECT_EQ(count_commuting_tuples(s3, 3, alg), 48);
  }
}

TEST(CommutingTuples, AlgorithmsAgreeOnZoo) {
  for (const auto& [name, g] : groups_upto_24()) {
    for (int m = 0; m <= 4; ++m) {
      BigInt brute = count_commuting_tuples(g, m, TupleAlgorithm::brute);
      BigInt rec = count_commuting_tuples(g, m, TupleAlgorithm::centralizer_recursive);
      EXPECT_EQ(brute, rec) << name << " m=" << m;
      if (g->is_abelian()) {
        BigInt expect;
        mpz_ui_pow_ui(expect.get_mpz_t(), static_cast<unsigned long>(g->order()), static_cast<unsigned long>(m));
        EXPECT_EQ(rec, expect) << name;
      }
    }
  }
}

TEST(CommutingTuples, GroupsBeyondOneMaskWord) {
  // S5 has 7 classes, so 120 * 7 commuting pairs
  auto s5 = symmetric_group(5);
  EXPECT_EQ(count_commuting_tuples(s5, 2, TupleAlgorithm::brute), 840);
  EXPECT_EQ(count_commuting_tuples(s5, 3, TupleAlgorithm::brute),
            count_commuting_tuples(s5, 3, TupleAlgorithm::centralizer_recursive));
}

TEST(CommutingTuples, BruteCap) {
  ScopedTupleCap cap(100);
  EXPECT_THROW(count_commuting_tuples(symmetric_group(4), 3, TupleAlgorithm::brute), ResourceError);
}

}  // namespace
}  // namespace stackyrr
