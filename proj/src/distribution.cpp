#include "asyncmed/distribution.hpp"

#include <set>

namespace asyncmed {

Rational OutcomeDistribution::total() const {
  Rational s = 0;
  for (const auto& [a, q] : p) s += q;
  return s;
}

Rational OutcomeDistribution::at(const ActionProfile& a) const {
  auto it = p.find(a);
  return it == p.end() ? Rational(0) : it->second;
}

OutcomeDistribution exact_distribution(const ExtensionGame& ext, const Profile& profile, const Scheduler& s,
                                       const TypeProfile& x, const ExactOptions& opt) {
  OutcomeDistribution d;
  for_each_exact_run(ext, profile, s, x, opt, [&](const RunResult& r, const Rational& pr) { d.p[r.outcome] += pr; });
  return d;
}

OutcomeFn exact_outcome_fn(const ExtensionGame& ext, const Profile& profile, const Scheduler& s,
                           const ExactOptions& opt) {
  OutcomeFn f;
  for (const auto& x : ext.game->types()) f.push_back(exact_distribution(ext, profile, s, x, opt));
  return f;
}

std::uint64_t run_seed(std::uint64_t base, std::uint64_t index) {
  // splitmix64 finalizer over the pair
  std::uint64_t z = base * 0x9E3779B97F4A7C15ull + index + 0x632BE59BD9B4E019ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

OutcomeDistribution sample_distribution(const ExtensionGame& ext, const Profile& profile, const Scheduler& s,
                                        const TypeProfile& x, std::uint64_t samples, std::uint64_t seed,
                                        RunOptions opt) {
  if (samples == 0) throw ContractError("sample count must be at least 1");
  std::map<ActionProfile, std::uint64_t> counts;
  for (std::uint64_t i = 0; i < samples; ++i) {
    RunResult r = run(ext, profile, s, x, run_seed(seed, i), opt);
    ++counts[r.outcome];
  }
  OutcomeDistribution d;
  d.exact = false;
  d.samples = samples;
  for (const auto& [a, c] : counts) {
    Rational q(static_cast<unsigned long>(c), static_cast<unsigned long>(samples));
    q.canonicalize();
    d.p[a] = q;
  }
  return d;
}

Rational dist(const OutcomeDistribution& p, const OutcomeDistribution& q) {
  std::set<ActionProfile> keys;
  for (const auto& [a, v] : p.p) keys.insert(a);
  for (const auto& [a, v] : q.p) keys.insert(a);
  Rational s = 0;
  for (const auto& a : keys) s += abs(p.at(a) - q.at(a));
  return s;
}

Rational dist(const OutcomeFn& f, const OutcomeFn& g) {
  if (f.size() != g.size()) throw ContractError("outcome functions over different type spaces");
  Rational m = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    Rational d = dist(f[i], g[i]);
    if (d > m) m = d;
  }
  return m;
}

RationalVector expected_payoff(const UnderlyingGame& g, std::size_t type_index, const OutcomeDistribution& d) {
  RationalVector u(g.n(), Rational(0));
  for (const auto& [a, q] : d.p) {
    std::size_t ai = g.action_index(a);
    for (int i = 1; i <= g.n(); ++i) u[i - 1] += q * g.payoff(type_index, ai, i);
  }
  return u;
}

}  // namespace asyncmed
