#include <gtest/gtest.h>

#include <random>

#include "asyncmed/field.hpp"

using namespace asyncmed;

namespace {

bool trial_division_prime(std::uint64_t p) {
  if (p < 2) return false;
  for (std::uint64_t d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

}  // namespace

TEST(Field, PrimalityAgreesWithTrialDivision) {
  for (std::uint64_t p = 0; p < 2000; ++p) EXPECT_EQ(is_prime(p), trial_division_prime(p)) << p;
  EXPECT_TRUE(is_prime(65537));
}

TEST(Field, InverseAndSqrtExhaustive) {
  PrimeField F(13);
  for (std::uint64_t a = 1; a < 13; ++a) EXPECT_EQ(F.mul(a, F.inv(a)), 1u);
  EXPECT_THROW(F.inv(0), std::exception);
  std::set<std::uint64_t> squares;
  for (std::uint64_t a = 0; a < 13; ++a) squares.insert(a * a % 13);
  for (std::uint64_t a = 0; a < 13; ++a) {
    auto r = F.sqrt(a);
    EXPECT_EQ(r.has_value(), squares.count(a) == 1) << a;
    if (r) {
      EXPECT_EQ(F.mul(*r, *r), a);
      EXPECT_LE(*r, F.neg(*r) == 0 ? 0 : F.neg(*r));
    }
  }
}

TEST(Field, InterpolationRecoversEveryQuadraticOverF7) {
  PrimeField F(7);
  for (std::uint64_t a = 0; a < 7; ++a)
    for (std::uint64_t b = 0; b < 7; ++b)
      for (std::uint64_t c = 0; c < 7; ++c) {
        Poly f{a, b, c};
        std::vector<std::pair<std::uint64_t, std::uint64_t>> pts;
        for (std::uint64_t x : {1, 3, 6}) pts.emplace_back(x, evaluate(F, f, x));
        Poly g = interpolate(F, pts);
        g.resize(3, 0);
        EXPECT_EQ(g, f);
        auto lam = lagrange_at_zero(F, {1, 3, 6});
        std::uint64_t s = 0;
        for (std::size_t i = 0; i < 3; ++i) s = F.add(s, F.mul(lam[i], pts[i].second));
        EXPECT_EQ(s, a);
      }
}

TEST(Field, BerlekampWelchCorrectsUpToE) {
  PrimeField F(17);
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    Poly f = random_poly(F, F.uniform(rng), 2, rng);
    std::vector<std::pair<std::uint64_t, std::uint64_t>> pts;
    for (std::uint64_t x = 1; x <= 9; ++x) pts.emplace_back(x, evaluate(F, f, x));
    // Two errors at distinct positions.
    std::size_t i = rng() % 9, j = (i + 1 + rng() % 8) % 9;
    pts[i].second = F.add(pts[i].second, 1 + rng() % 16);
    pts[j].second = F.add(pts[j].second, 1 + rng() % 16);
    auto g = berlekamp_welch(F, pts, 2, 2);
    ASSERT_TRUE(g.has_value());
    for (std::uint64_t x = 0; x < 17; ++x) EXPECT_EQ(evaluate(F, *g, x), evaluate(F, f, x));
  }
}

TEST(Field, OnlineDecodeWaitsForEnoughAgreement) {
  PrimeField F(13);
  Poly f{4, 7};
  std::vector<std::pair<std::uint64_t, std::uint64_t>> pts;
  for (std::uint64_t x = 1; x <= 2; ++x) pts.emplace_back(x, evaluate(F, f, x));
  EXPECT_FALSE(online_decode(F, pts, 1, 1).has_value());
  pts.emplace_back(3, evaluate(F, f, 3));
  auto g = online_decode(F, pts, 1, 1);
  ASSERT_TRUE(g.has_value());
  EXPECT_EQ(evaluate(F, *g, 0), 4u);
}

TEST(Shamir, TooFewPointsAndTooManyErrorsAreReported) {
  PrimeField F(13);
  std::vector<std::pair<std::uint64_t, std::uint64_t>> three{{1, 1}, {2, 2}, {3, 3}};
  EXPECT_THROW(shamir_reconstruct(F, three, 1, 1), std::invalid_argument);
  // Secret 0 on the line y = x, two of four shares moved onto y = 5.
  std::vector<std::pair<std::uint64_t, std::uint64_t>> bad{{1, 1}, {2, 2}, {3, 5}, {4, 5}};
  EXPECT_THROW(shamir_reconstruct(F, bad, 1, 1), DecodeFailure);
}

TEST(Shamir, ShareThenReconstructRoundTrips) {
  PrimeField F(65537);
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::uint64_t s = F.uniform(rng);
    auto shares = shamir_share(F, s, 2, 7, rng);
    std::vector<std::pair<std::uint64_t, std::uint64_t>> pts;
    for (std::uint64_t i = 0; i < shares.size(); ++i) pts.emplace_back(i + 1, shares[i]);
    pts[trial % 7].second = F.add(pts[trial % 7].second, 1);
    EXPECT_EQ(shamir_reconstruct(F, pts, 2, 2), s);
  }
}

// Any two shares of a degree-2 sharing are uniform, whatever the secret.
TEST(Shamir, DSharesRevealNothingExhaustive) {
  PrimeField F(7);
  std::map<std::uint64_t, std::map<std::pair<std::uint64_t, std::uint64_t>, int>> seen;
  for (std::uint64_t s = 0; s < 7; ++s)
    for (std::uint64_t a = 0; a < 7; ++a)
      for (std::uint64_t b = 0; b < 7; ++b) {
        Poly f{s, a, b};
        ++seen[s][{evaluate(F, f, 2), evaluate(F, f, 5)}];
      }
  for (const auto& [s, counts] : seen) {
    EXPECT_EQ(counts.size(), 49u);
    for (const auto& [pair, c] : counts) EXPECT_EQ(c, 1);
  }
}
