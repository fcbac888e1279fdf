#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "asyncmed/engine.hpp"

namespace asyncmed {

struct OutcomeDistribution {
  std::map<ActionProfile, Rational> p;
  bool exact = true;
  std::uint64_t samples = 0;  // empirical mode only
  Rational total() const;
  Rational at(const ActionProfile& a) const;
  bool operator==(const OutcomeDistribution& o) const { return p == o.p; }
};

// Type profile (by index in the game's type space) to outcome distribution.
using OutcomeFn = std::vector<OutcomeDistribution>;

struct ExactOptions {
  RunOptions run{.step_budget = 200000, .record_log = false};
  std::uint64_t max_runs = 1u << 20;  // coin sequences enumerated before EnumerationOverflow
};

// Enumerates every coin outcome of every participant and the environment.
OutcomeDistribution exact_distribution(const ExtensionGame& ext, const Profile& profile, const Scheduler& s,
                                       const TypeProfile& x, const ExactOptions& opt = {});

// Calls `visit(result, probability)` once per coin sequence.
template <class F>
void for_each_exact_run(const ExtensionGame& ext, const Profile& profile, const Scheduler& s, const TypeProfile& x,
                        const ExactOptions& opt, F&& visit) {
  TapeCoins tape;
  std::uint64_t count = 0;
  do {
    if (++count > opt.max_runs) throw EnumerationOverflow("coin enumeration exceeded the cap", count);
    tape.rewind();
    RunResult r = run_with_coins(ext, profile, s, x, tape, opt.run);
    visit(r, tape.probability());
  } while (tape.advance());
}

OutcomeFn exact_outcome_fn(const ExtensionGame& ext, const Profile& profile, const Scheduler& s,
                           const ExactOptions& opt = {});

// Independent runs seeded from (seed, run index).
OutcomeDistribution sample_distribution(const ExtensionGame& ext, const Profile& profile, const Scheduler& s,
                                        const TypeProfile& x, std::uint64_t samples, std::uint64_t seed,
                                        RunOptions opt = {.step_budget = 2000000, .record_log = false});

std::uint64_t run_seed(std::uint64_t base, std::uint64_t index);

// Sum over outcomes of |p - q|; empty entries count as 0.
Rational dist(const OutcomeDistribution& p, const OutcomeDistribution& q);
// Maximum over type profiles.
Rational dist(const OutcomeFn& f, const OutcomeFn& g);

// Exact expected utility of every player under a distribution at type index t.
RationalVector expected_payoff(const UnderlyingGame& g, std::size_t type_index, const OutcomeDistribution& d);

}  // namespace asyncmed
