#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "asyncmed/adversary.hpp"
#include "asyncmed/distribution.hpp"

namespace asyncmed {

// Types of some players (player -> type index in that player's type set).
using PartialTypes = std::map<int, int>;

struct Evaluation {
  enum class Mode { Exact, MonteCarlo };
  Mode mode = Mode::Exact;
  std::uint64_t samples = 10000;
  std::uint64_t seed = 1;
  ExactOptions exact;
  RunOptions sampled{.step_budget = 2000000, .record_log = false};
  // Monte-Carlo comparisons treat payoffs closer than this as equal.
  Rational slack = Rational(1, 20);
  unsigned workers = 1;
};

// Expected payoffs of every player, one vector per type profile index.
using PayoffTable = std::vector<RationalVector>;

PayoffTable payoff_table(const ExtensionGame& ext, const Profile& profile, const Scheduler& s, const Evaluation& eval);

// E[u | the players in xK have those types].
RationalVector conditional_payoff(const UnderlyingGame& g, const PayoffTable& table, const PartialTypes& xK);

RationalVector expected_utility(const ExtensionGame& ext, const Profile& profile, const Scheduler& s,
                                const PartialTypes& xK, const Evaluation& eval = {});

// Every assignment of types to the players in `who` with positive probability.
std::vector<PartialTypes> partial_type_profiles(const UnderlyingGame& g, const std::set<int>& who);

struct RobustnessQuery {
  std::shared_ptr<const ExtensionGame> ext;
  std::shared_ptr<const Profile> profile;
  int k = 0;
  int t = 0;
  std::optional<Rational> epsilon;  // unset: the exact notion
  bool strong = false;
  // Alternatives to each player's own strategy (index i-1). The profile's own
  // strategy is always considered as well.
  std::vector<std::vector<StrategySpec>> deviations;
  // Coalition plans with their own scheduler and blackboard.
  std::vector<Adversary> adversaries;
  std::vector<std::shared_ptr<const Scheduler>> schedulers;
  // Explicit coalitions to search instead of every subset of the right size.
  std::vector<std::set<int>> k_coalitions;
  std::vector<std::set<int>> t_coalitions;
  // Strengthened quantifiers: the two sides of each inequality take their
  // scheduler and type profile independently from the menus.
  bool independent = false;
  Evaluation eval;
};

struct Caps {
  std::string mode;
  std::uint64_t samples = 0;
  std::size_t coalitions = 0;
  std::size_t deviations = 0;
  std::size_t schedulers = 0;
  std::size_t type_profiles = 0;
  std::size_t cells = 0;
  std::string note;
};

struct Witness {
  std::set<int> K;
  std::set<int> T;
  std::string deviation;
  std::string scheduler;
  std::string scheduler_rhs;
  PartialTypes types;
  PartialTypes types_rhs;
  int player = 0;
  Rational lhs;
  Rational rhs;
  Rational gap;  // lhs - rhs
  // Enough to rerun both sides.
  std::shared_ptr<const Profile> deviated;
  std::shared_ptr<const Profile> baseline;
  std::shared_ptr<const Scheduler> sched_lhs;
  std::shared_ptr<const Scheduler> sched_rhs;
};

struct Verdict {
  bool holds = true;
  std::optional<Witness> witness;
  Caps caps;
};

Verdict check_k_resilience(const RobustnessQuery& q);
Verdict check_t_immunity(const RobustnessQuery& q);
Verdict check_kt_robustness(const RobustnessQuery& q);

// Reruns a witness and returns lhs - rhs for its player.
Rational replay_gap(const RobustnessQuery& q, const Witness& w);

// Mixed move of `player` with type index `type` in the underlying game.
using PunishmentStrategy = std::function<std::map<Action, Rational>(int player, int type)>;
PunishmentStrategy pure_punishment(Action a);

struct PunishmentResult {
  Verdict verdict;
  Rational min_lhs;
  Rational max_rhs;
};

// For every K with 1 <= |K| <= m, every deviation of K in the underlying game
// against rho, every scheduler and every x_K: u_i(ext, sigma') > u_i(game, (a_K, rho_-K)).
PunishmentResult check_punishment(const UnderlyingGame& game, const ExtensionGame& ext, const PunishmentStrategy& rho,
                                  const Profile& sigma, int m,
                                  const std::vector<std::shared_ptr<const Scheduler>>& schedulers,
                                  const Evaluation& eval = {});

// Expected payoffs are equal across all schedulers in the menu, for every
// T with |T| <= t and deviation of T, for the players outside T.
Verdict check_scheduler_proof(const RobustnessQuery& q);

struct ReactiveMenuOptions {
  std::vector<std::int64_t> values{0, 1};  // possible first data entries of mediator messages
  int observations = 1;                    // non-STOP mediator messages remembered
  bool vary_ack = true;
  bool vary_report = true;
  std::size_t cap = 4096;
};

// Pure reactive deviations for a canonical mediator game: which type to
// report (or none), whether to acknowledge, and a table from the observed
// messages and the STOP instruction to a move (or no move).
std::vector<StrategySpec> reactive_deviations(const ExtensionGame& ext, int player, const ReactiveMenuOptions& opt,
                                              std::size_t* total = nullptr);

// Indices 0..count-1 computed with up to `workers` threads.
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& body);

std::vector<std::set<int>> subsets_up_to(int n, int size, int min_size = 1);

std::string describe(const PartialTypes& x);

}  // namespace asyncmed
