#include <gtest/gtest.h>

#include "asyncmed/circuit.hpp"
#include "asyncmed/fixtures.hpp"

using namespace asyncmed;

TEST(Circuit, ConstantMediatorHasNoMultiplications) {
  auto fx = constant_fixture();
  auto t = decision_table(*fx.ext, *fx.profile);
  EXPECT_TRUE(t.coin_arity.empty());
  auto c = compile_decision_table(t, 13);
  EXPECT_EQ(c.multiplications(), 0u);
  EXPECT_EQ(c.coin_bits, 0);
  EXPECT_EQ(c.actions_for({0, 0}, {}), (ActionProfile{0, 0}));
  EXPECT_EQ(verify_circuit(c, t), 0u);
}

TEST(Circuit, ParityMediatorDependsOnlyOnTheOutputCoin) {
  auto fx = parity_fixture(3, 0);
  auto t = decision_table(*fx.ext, *fx.profile);
  ASSERT_EQ(t.coin_arity, (std::vector<std::uint64_t>{2, 2}));
  // Every player is told b, the first coin; a never matters.
  for (std::uint64_t b = 0; b < 2; ++b)
    for (std::uint64_t a = 0; a < 2; ++a)
      EXPECT_EQ(t.at({0, 0, 0}, {b, a}), ActionProfile(3, static_cast<Action>(b)));
  auto c = compile_decision_table(t, 65537);
  EXPECT_EQ(verify_circuit(c, t), 0u);
  EXPECT_EQ(c.multiplications(), 0u);
  for (int w : c.outputs) {
    const Gate& g = c.gates[w];
    EXPECT_TRUE(g.kind == Gate::Kind::CoinBit || g.kind == Gate::Kind::Add || g.kind == Gate::Kind::Scale);
  }
}

TEST(Circuit, CoinBitsAreLeastSignificantFirst) {
  EXPECT_EQ(coin_bits_of({4}, {1}), (std::vector<int>{1, 0}));
  EXPECT_EQ(coin_bits_of({4}, {2}), (std::vector<int>{0, 1}));
  EXPECT_EQ(coin_bits_of({2, 4}, {1, 3}), (std::vector<int>{1, 1, 1}));
  EXPECT_THROW(coin_bits_of({3}, {1}), ParameterError);
}

namespace {

// Both players get x1 XOR x2.
DecisionTable xor_table() {
  DecisionTable t;
  t.n = 2;
  t.type_values = {{0, 1}, {0, 1}};
  t.actions = {{0, 1}, {0, 1}};
  for (int x1 = 0; x1 < 2; ++x1)
    for (int x2 = 0; x2 < 2; ++x2) t.table[{TypeProfile{x1, x2}, {}}] = ActionProfile{x1 ^ x2, x1 ^ x2};
  return t;
}

}  // namespace

TEST(Circuit, XorNeedsMultiplications) {
  auto t = xor_table();
  auto c = compile_decision_table(t, 65537);
  EXPECT_EQ(verify_circuit(c, t), 0u);
  EXPECT_GT(c.multiplications(), 0u);
  auto depths = c.depths();
  ASSERT_EQ(depths.size(), c.size());
  int max_depth = 0;
  for (int d : depths) max_depth = std::max(max_depth, d);
  EXPECT_GT(max_depth, 0);
}

TEST(Circuit, GateCapIsEnforced) {
  try {
    compile_decision_table(xor_table(), 65537, 3);
    FAIL() << "expected CircuitTooLarge";
  } catch (const CircuitTooLarge& e) {
    EXPECT_EQ(e.cap(), 3u);
  }
}

TEST(Circuit, DigestIsStableAndSensitive) {
  auto fx = parity_fixture(3, 0);
  auto t = decision_table(*fx.ext, *fx.profile);
  auto a = compile_decision_table(t, 65537), b = compile_decision_table(t, 65537);
  EXPECT_EQ(a.digest(), b.digest());
  EXPECT_EQ(a.digest().size(), 16u);
  EXPECT_NE(a.digest(), compile_decision_table(t, 257).digest());
}

TEST(Circuit, TransformedMediatorCompiles) {
  auto fx = race_fixture();
  auto mi = minimally_informative_transform(fx.ext, fx.profile, MiOptions{});
  auto c = compile_mediator_to_circuit(mi);
  EXPECT_EQ(verify_circuit(c, decision_table(*mi.inner_ext, *mi.inner)), 0u);
}
