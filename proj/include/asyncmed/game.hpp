#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "asyncmed/rational.hpp"

namespace asyncmed {

using Action = int;
using ActionProfile = std::vector<Action>;
using TypeProfile = std::vector<int>;

// The bottom action. A genuine move when it appears in a player's action
// set, otherwise the marker for a player whose move was never resolved.
inline constexpr Action kBottom = -1;

std::string action_name(Action a);
std::string profile_name(const std::vector<int>& p);

class TableMiss : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Finite Bayesian normal-form game with an exact utility table.
// Players are 1..n; vectors indexed by player hold entry i-1.
class UnderlyingGame {
 public:
  UnderlyingGame(int n, std::vector<TypeProfile> types, std::vector<Rational> prior,
                 std::vector<std::vector<Action>> actions);

  int n() const { return n_; }
  const std::vector<TypeProfile>& types() const { return types_; }
  const std::vector<Rational>& prior() const { return prior_; }
  const std::vector<Action>& actions(int player) const { return actions_.at(player - 1); }
  std::size_t action_profile_count() const { return profile_count_; }

  bool has_action(int player, Action a) const;
  bool has_type_value(int player, int value) const;
  std::vector<int> type_values(int player) const;

  std::size_t type_index(const TypeProfile& x) const;
  std::optional<std::size_t> find_type(const TypeProfile& x) const;
  std::size_t action_index(const ActionProfile& a) const;
  ActionProfile action_profile_at(std::size_t index) const;

  void set_utility(const TypeProfile& x, const ActionProfile& a, RationalVector u);
  RationalVector payoff(const TypeProfile& x, const ActionProfile& a) const;
  const Rational& payoff(std::size_t typeIndex, std::size_t actionIndex, int player) const;

  // Throws ParameterError describing the first violated invariant.
  void validate() const;

 private:
  int n_;
  std::vector<TypeProfile> types_;
  std::vector<Rational> prior_;
  std::vector<std::vector<Action>> actions_;
  std::size_t profile_count_ = 1;
  std::vector<RationalVector> table_;  // [type * profiles + profile] -> u, empty = unset
};

// Same type space and actions as the base game; only payoffs differ.
class UtilityVariant {
 public:
  UtilityVariant(std::shared_ptr<const UnderlyingGame> base, Rational bound);

  const UnderlyingGame& base() const { return *base_; }
  const Rational& bound() const { return bound_; }
  void set_utility(const TypeProfile& x, const ActionProfile& a, RationalVector u);
  RationalVector payoff(const TypeProfile& x, const ActionProfile& a) const;
  // Every entry lies in [-M/2, M/2].
  bool respects_bound() const;
  UnderlyingGame as_game() const;

 private:
  std::shared_ptr<const UnderlyingGame> base_;
  Rational bound_;
  UnderlyingGame game_;
};

RationalVector payoff(const UnderlyingGame& g, const TypeProfile& x, const ActionProfile& a);
RationalVector payoff(const UtilityVariant& g, const TypeProfile& x, const ActionProfile& a);

// Actions {0,1,bottom}, singleton type space. k+1 or more bottoms: 11/10 for
// all; otherwise 1 if the rest are 0, 2 if the rest are 1, else 0.
std::shared_ptr<const UnderlyingGame> build_parity_game(int n, int k);

// Actions {0,1}; a player scores 1 when its action is the strict majority.
std::shared_ptr<const UnderlyingGame> build_majority_game(int n);

}  // namespace asyncmed
