#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "asyncmed/adversary.hpp"
#include "asyncmed/classes.hpp"
#include "asyncmed/concepts.hpp"

namespace asyncmed {

// Stands in for the moves of coalition members when outputs are compared.
inline constexpr Action kHidden = std::numeric_limits<Action>::min();

OutcomeFn mask(const OutcomeFn& f, const std::set<int>& T);

// Exact or sampled (per type profile, same seed scheme as payoff_table).
OutcomeFn outcome_fn(const ExtensionGame& ext, const Profile& profile, const Scheduler& s, const Evaluation& eval);

struct LabeledFn {
  std::string label;
  OutcomeFn fn;
};

struct RelationVerdict {
  bool holds = true;
  std::string mode = "exact";  // "exact" or "sampled"
  bool fell_back = false;      // class enumeration overflowed
  Rational worst = 0;          // max over sources of the distance to the nearest target
  std::string witness;         // first unmatched source, with its nearest distance
  std::vector<std::pair<std::string, std::string>> matches;
  // Per input profile (type index) distance of each match.
  std::vector<std::vector<Rational>> per_input;
  std::uint64_t compared = 0;
};

// Every source has a target within eps (lifted max-over-inputs dist).
RelationVerdict covered(const std::vector<LabeledFn>& from, const std::vector<LabeledFn>& to, const Rational& eps);

enum class ImplementationMode { Full, Weak };

// Full: two-sided coverage between the induced function sets. Weak: every
// function of the implementing profile is one of the implemented profile's.
RelationVerdict check_implementation(const std::vector<OutcomeFn>& implementing,
                                     const std::vector<OutcomeFn>& implemented, const Rational& eps,
                                     ImplementationMode mode);

struct GameSide {
  std::shared_ptr<const ExtensionGame> ext;
  std::shared_ptr<const Profile> profile;
};

// Enumerates scheduler classes on both sides; on EnumerationOverflow falls
// back to sampled distributions over `fallback` and flags the verdict.
RelationVerdict check_implementation(const GameSide& implementing, const GameSide& implemented, const Rational& eps,
                                     ImplementationMode mode, const ClassOptions& classes = {},
                                     const std::vector<std::shared_ptr<const Scheduler>>& fallback = {},
                                     const Evaluation& sampled = {});

std::vector<LabeledFn> class_functions(const GameSide& side, const ClassOptions& opt = {});

// One side of a bisimulation or emulation check.
struct AdversarySide {
  GameSide game;
  // Coalition plans; each plan with no scheduler is paired with every
  // scheduler in the menu. The empty plan is always included.
  std::vector<Adversary> adversaries;
  std::vector<std::shared_ptr<const Scheduler>> schedulers;
  // Add every deterministic delivery-only scheduler class for each plan.
  bool enumerate_classes = false;
  ClassOptions classes;
};

// Both directions, per coalition T with |T| <= t: every adversary on one
// side has an adversary on the other with outputs of the players outside T
// within eps for every input.
RelationVerdict check_bisimulation(const AdversarySide& a, const AdversarySide& b, int t, const Rational& eps,
                                   const Evaluation& eval = {});

enum class EmulationVariant { Plain, Relaxed, TT };

struct EmulationQuery {
  AdversarySide cheap;
  GameSide mediated;
  // Componentwise strategy map, keyed by strategy name.
  std::map<std::string, StrategySpec> H;
  int t = 0;
  int t_prime = 0;  // (t,t') variant only
  EmulationVariant variant = EmulationVariant::Plain;
  Rational eps = 0;
  std::vector<std::shared_ptr<const Scheduler>> mediated_fair;
  std::vector<std::shared_ptr<const Scheduler>> mediated_relaxed;
  bool enumerate_mediated_classes = true;
  ClassOptions classes;
  Evaluation eval;
};

RelationVerdict check_emulation(const EmulationQuery& q);

struct CoterminationQuery {
  GameSide game;
  std::vector<Adversary> adversaries;  // the empty plan is always included
  std::vector<std::shared_ptr<const Scheduler>> schedulers;
  std::uint64_t runs_per_cell = 1000;
  std::uint64_t seed = 1;
  std::optional<Rational> epsilon;  // unset: no violation allowed
  RunOptions run{.step_budget = 2000000, .record_log = false};
  unsigned workers = 1;
};

struct CoterminationVerdict {
  bool holds = true;
  std::uint64_t runs = 0;
  std::uint64_t violations = 0;
  double rate = 0;
  double cp_upper = 0;  // one-sided 95% Clopper-Pearson bound on the rate
  std::string witness;  // adversary, scheduler, type profile, seed
  std::uint64_t witness_seed = 0;
  std::size_t cells = 0;
};

// Among the players outside T, all halt or none do.
bool coterminates(const RunResult& r, const std::set<int>& T);

CoterminationVerdict check_cotermination(const CoterminationQuery& q);

double clopper_pearson_upper(std::uint64_t successes, std::uint64_t trials, double confidence = 0.95);
double clopper_pearson_lower(std::uint64_t successes, std::uint64_t trials, double confidence = 0.95);

}  // namespace asyncmed
