#include <gtest/gtest.h>

#include "asyncmed/adversary.hpp"
#include "asyncmed/distribution.hpp"

using namespace asyncmed;

TEST(Encoding, SelfMessageCountIsTheSymbol) {
  for (int alphabet : {2, 5, 9})
    for (int j = 0; j < alphabet; ++j) EXPECT_EQ(encode_to_environment(j, alphabet), j);
  EXPECT_THROW(encode_to_environment(5, 5), std::exception);
}

TEST(Encoding, BroadcastCodeIsABijection) {
  for (int n : {1, 3, 4}) {
    std::set<int> codes;
    for (int j1 = 0; j1 <= n; ++j1)
      for (int j2 = 0; j2 <= n; ++j2) {
        int c = environment_broadcast_event(j1, j2, n);
        EXPECT_EQ(c, (n + 1) * j1 + j2);
        EXPECT_EQ(decode_broadcast(c, n), std::make_pair(j1, j2));
        codes.insert(c);
      }
    EXPECT_EQ(static_cast<int>(codes.size()), pool_size(n));
  }
}

TEST(Encoding, SymbolSurvivesEveryScheduler) {
  const int n = 3;
  auto ext = covert_game(n);
  for (const auto& s : standard_menu(n))
    for (int j = 0; j < 5; ++j) {
      Profile p;
      p.name = "covert";
      p.mediator = passive_mediator();
      p.players.assign(n, passive_player());
      p.players[0] = symbol_sender(3, j, 5);
      RunOptions o;
      o.record_pattern = true;
      auto r = run(*ext, p, *s, TypeProfile(n, 0), 4, o);
      EXPECT_EQ(decode_symbol(r.pattern, 1), j) << s->name();
    }
}

TEST(Adversary, MembersAndBoardAccess) {
  auto a = build_colluding_adversary({1}, {3}, {{1, passive_player()}, {3, passive_player()}}, nullptr, "pair");
  EXPECT_EQ(a.members(), (std::set<int>{1, 3}));
  Profile honest;
  honest.mediator = passive_mediator();
  honest.players.assign(3, passive_player());
  auto p = apply_adversary(honest, a);
  EXPECT_TRUE(p.has_board_access(1));
  EXPECT_FALSE(p.has_board_access(2));
  EXPECT_TRUE(p.has_board_access(3));
  EXPECT_FALSE(p.has_board_access(0));
}

TEST(Adversary, BoardAndEncodedParityPlansAgree) {
  auto fx = parity_fixture(5, 1);
  for (auto [i, j] : {std::pair{1, 2}, std::pair{4, 5}}) {
    auto board = parity_board_adversary(i, j);
    auto enc = parity_encoded_adversary(i, j);
    auto fb = exact_outcome_fn(*fx.ext, apply_adversary(*fx.profile, board), *board.scheduler);
    auto fe = exact_outcome_fn(*fx.ext, apply_adversary(*fx.profile, enc), *enc.scheduler);
    EXPECT_EQ(fb, fe);
    // The withheld STOP leaves b = 0 runs to the wills: all bottom.
    auto u = expected_payoff(*fx.ext->game, 0, fb[0]);
    EXPECT_EQ(u[i - 1], (frac(11, 10) + 2) / 2);
  }
}
