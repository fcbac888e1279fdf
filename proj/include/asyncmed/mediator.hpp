#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "asyncmed/classes.hpp"
#include "asyncmed/distribution.hpp"
#include "asyncmed/schedulers.hpp"

namespace asyncmed {

// Payload tags used by the mediator-game strategies.
namespace tag {
inline constexpr int kInit = 1;
inline constexpr int kAck = 2;
inline constexpr int kHint = 10;     // parity mediator's first message a+bi
inline constexpr int kRound = 11;    // order-revealing mediator round message
inline constexpr int kMiInput = 20;  // (i, r, x)
inline constexpr int kMarker = 21;   // (r)
inline constexpr int kMiWeak = 22;   // (i, x)
}  // namespace tag

struct MediatorFixture {
  std::shared_ptr<const ExtensionGame> ext;
  std::shared_ptr<const Profile> profile;
};

// Canonical honest player: an initial message carrying its type, an ack for
// every non-STOP mediator message, and on STOP the instructed move and halt.
StrategySpec canonical_player();

// Draws b then a, sends a+b*i mod 2 to each i, and on its next scheduling
// sends "output b; STOP" to everyone.
StrategySpec parity_mediator();

// Parity game with the parity mediator and honest canonical players.
MediatorFixture parity_fixture(int n, int k);

// n=2: everyone is told to play the index of whichever initial message
// reached the mediator first, minus one.
MediatorFixture race_fixture();

// n=2, types {0,1}^2: the move is x_f + 2(g-1) where f sent the first initial
// message to arrive and g the first acknowledgement.
MediatorFixture order_revealing_fixture();

// n=1: the mediator sends STOP with a fair coin as the move.
MediatorFixture single_player_fixture();

// Sends one plain message per player and never STOP.
StrategySpec never_stop_mediator();

struct CanonicalVerdict {
  bool holds = true;
  std::string witness;
  std::uint64_t runs = 0;
};

// Runs every profile in the menu under every scheduler, type profile and coin
// sequence; checks the per-player bound r, that the final mediator message
// carries STOP, and that players only answer non-STOP mediator messages.
CanonicalVerdict check_canonical_form(const ExtensionGame& ext, const std::vector<Profile>& profiles,
                                      const std::vector<std::shared_ptr<const Scheduler>>& schedulers, int r,
                                      const ExactOptions& opt = {});

enum class MiVariant { Full, Weak };

struct MiOptions {
  MiVariant variant = MiVariant::Full;
  int k = 0;
  int t = 0;
  std::optional<int> force_rounds;  // testing hook: use this R instead of the least one
  ClassOptions classes;
};

struct MinimallyInformativeProfile {
  MiVariant variant = MiVariant::Full;
  int rounds = 1;  // R
  int n = 0;
  int k = 0;
  int t = 0;
  std::shared_ptr<const ExtensionGame> inner_ext;
  std::shared_ptr<const Profile> inner;
  std::shared_ptr<const SchedulerClasses> classes;  // full variant only
  std::shared_ptr<const ExtensionGame> ext;
  std::shared_ptr<const Profile> profile;
};

MinimallyInformativeProfile minimally_informative_transform(std::shared_ptr<const ExtensionGame> ext,
                                                            std::shared_ptr<const Profile> profile,
                                                            const MiOptions& opt);

// Least R >= 1 with (R n)! >= classes.
int least_rounds(std::uint64_t classes, int n);
mpz_class factorial(unsigned long m);
// (4rn)^(4rn).
mpz_class loose_rounds(int r, int n);
// Bounds on the number of message patterns of length at most 4rn.
mpz_class pattern_bound_factorial(int r, int n);     // (4rn)! / (r!)^(2n)
mpz_class pattern_bound_prefixes(int r, int n);      // (4rn)(4rn)! / (r!)^(2n)
mpz_class pattern_bound_square(int r, int n);        // (2rn) ((2rn)!)^2

// Lexicographic rank of a permutation of {0,..,m-1}.
mpz_class permutation_rank(const std::vector<int>& perm);
// Class chosen by the full-variant mediator for a complete arrival order.
std::size_t class_for_order(const std::vector<int>& order, std::size_t classes);

struct SurjectionVerdict {
  bool holds = true;
  std::size_t orders_realized = 0;
  std::vector<std::size_t> uncovered;  // class indices without a preimage
};

// Realizes every arrival order of the Rn input messages by running the
// transformed game and checks that every class is selected by some order.
SurjectionVerdict surjection_check(const MinimallyInformativeProfile& mi);

struct InformativenessVerdict {
  bool holds = true;
  std::string witness;
  std::uint64_t comparisons = 0;
};

// For every player and scheduler, the exact distribution of the messages it
// receives before STOP is the same for every input profile.
InformativenessVerdict check_minimally_informative(const MinimallyInformativeProfile& mi,
                                                   const std::vector<std::shared_ptr<const Scheduler>>& schedulers,
                                                   const ExactOptions& opt = {});

}  // namespace asyncmed
