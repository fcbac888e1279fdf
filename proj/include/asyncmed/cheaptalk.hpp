#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "asyncmed/adversary.hpp"
#include "asyncmed/circuit.hpp"
#include "asyncmed/concepts.hpp"
#include "asyncmed/field.hpp"

namespace asyncmed {

enum class CtRegime { Exact, Punishment, Epsilon, EpsilonPunishment };
enum class CtApproach { AH, Default };

std::string to_string(CtRegime r);
std::string to_string(CtApproach a);

struct CtOptions {
  CtRegime regime = CtRegime::Exact;
  CtApproach approach = CtApproach::Default;
  int k = 0;
  int t = 0;
  std::optional<Rational> epsilon;       // required by the epsilon regimes
  std::optional<PunishmentStrategy> rho;  // required by the punishment regimes; must be pure
  bool strong = false;                   // strong punishment: not supported
  std::uint64_t prime = 65537;
  std::size_t gate_cap = 4096;
  // Per player (index i-1): type -> move when the run deadlocks. Empty: the
  // first action of each player.
  std::vector<std::map<int, Action>> defaults;
  // Schedulers for the punishment prerequisite; empty means FIFO.
  std::vector<std::shared_ptr<const Scheduler>> punishment_schedulers;
  Evaluation punishment_eval;
  // Test fixture: players wait for every output share instead of decoding
  // as soon as enough agree.
  bool fragile_output = false;
  std::uint64_t budget_constant = 32;
};

struct CtParams {
  int n = 0;
  int k = 0;
  int t = 0;
  int d = 0;  // sharing degree
  int f = 0;  // faults the agreement layer is sized for
  int e = 0;  // errors corrected when opening a value
  std::uint64_t p = 65537;
  CtRegime regime = CtRegime::Exact;
  CtApproach approach = CtApproach::Default;
  std::optional<Rational> epsilon;
  bool fragile_output = false;
};

// O(nNc) message bound: C n N c with N the mediator game's message bound and
// c the circuit size.
struct MessageBudget {
  std::uint64_t n = 0;
  std::uint64_t N = 0;
  std::uint64_t c = 1;
  std::uint64_t C = 32;
  std::uint64_t limit() const { return C * n * N * c; }
  double constant(std::uint64_t messages) const {
    return static_cast<double>(messages) / static_cast<double>(n * N * c);
  }
};

struct CheapTalkProfile {
  CtParams params;
  std::shared_ptr<const MediatorCircuit> circuit;
  std::shared_ptr<const ExtensionGame> ext;
  std::shared_ptr<const Profile> profile;
  std::shared_ptr<const ExtensionGame> mediated_ext;
  std::shared_ptr<const Profile> mediated;
  // Cheap-talk strategy name -> mediator-game strategy.
  std::map<std::string, StrategySpec> H;
  MessageBudget budget;
  std::string digest;
  std::shared_ptr<const void> impl;  // protocol configuration shared by the strategies
};

CheapTalkProfile build_cheaptalk_profile(std::shared_ptr<const ExtensionGame> mediated_ext,
                                         std::shared_ptr<const Profile> mediated, const CtOptions& opt);

// Deviations of a single player. Each is the honest protocol with one change.
StrategySpec ct_honest(const CheapTalkProfile& ct);
// Stops reacting after `reactions` reactions (the start counts as one).
StrategySpec ct_crash(const CheapTalkProfile& ct, int reactions);
// Deals `value` as its input.
StrategySpec ct_input(const CheapTalkProfile& ct, int value);
// As a dealer, shifts the constant terms of the shares sent to the next player.
StrategySpec ct_corrupt(const CheapTalkProfile& ct);
// Shifts every field value it sends to even-numbered players.
StrategySpec ct_equivocate(const CheapTalkProfile& ct);
// Keeps its output shares until it knows its own move; if that move is the
// first action it never sends them.
StrategySpec ct_staller(const CheapTalkProfile& ct);

struct CtMenuOptions {
  std::vector<int> players{1, 2};
  std::vector<int> crash_after{0, 3, 12};
  bool stalls = true;
};

// Single-deviator adversaries (T = {i}) for every listed player, plus the
// coalition staller in the punishment regimes.
std::vector<Adversary> adversary_menu_for(const CheapTalkProfile& ct, const CtMenuOptions& opt = {});

// Random bivariate polynomial of degree d in each variable with F(0,0) = secret.
struct Bivariate {
  int d = 0;
  std::vector<std::vector<std::uint64_t>> c;  // c[a][b] for x^a y^b
  static Bivariate random(const PrimeField& F, std::uint64_t secret, int d, std::mt19937_64& rng);
  Poly row(const PrimeField& F, std::uint64_t i) const;  // y -> F(i, y), degree d
  Poly col(const PrimeField& F, std::uint64_t i) const;  // x -> F(x, i), degree d
};

}  // namespace asyncmed
