#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>

#include "asyncmed/engine.hpp"
#include "asyncmed/mediator.hpp"

namespace asyncmed {

// Coalition strategies plus a cooperating scheduler. Members and the
// scheduler share the run's blackboard.
struct Adversary {
  std::string name;
  std::set<int> K;  // rational deviators
  std::set<int> T;  // arbitrary deviators
  std::map<int, StrategySpec> strategies;
  std::shared_ptr<const Scheduler> scheduler;  // null: keep the caller's scheduler
  std::set<int> members() const;
};

Adversary build_colluding_adversary(std::set<int> K, std::set<int> T, std::map<int, StrategySpec> plans,
                                    std::shared_ptr<const Scheduler> scheduler, std::string name = "adversary");

// The honest profile with coalition members replaced and given board access.
Profile apply_adversary(const Profile& honest, const Adversary& a);

// Number of empty self-messages that encode symbol j.
int encode_to_environment(int j, int alphabet);
// Sends `real`, then j empty self-messages.
void send_with_symbol(Ctx& ctx, int to, Payload real, int j, int alphabet);
// Reads the symbol attached to the last message `sender` sent to someone else.
std::optional<int> decode_symbol(const MessagePattern& pattern, int sender);

inline int pool_size(int n) { return (n + 1) * (n + 1); }
// (n+1) j1 + j2 for 0 <= j1, j2 <= n.
int environment_broadcast_event(int j1, int j2, int n);
std::pair<int, int> decode_broadcast(int count, int n);

// Relaxed scheduler that delivers `count` of `player`'s pooled self-messages,
// then schedules it without delivery, then continues FIFO.
class PoolScheduler : public Scheduler {
 public:
  PoolScheduler(int player, int count) : player_(player), count_(count) {}
  Choice decide(const SchedView& v, CoinSource& env) const override;
  bool needs_pattern() const override { return true; }
  std::string name() const override { return "pool-" + std::to_string(count_); }

 private:
  int player_;
  int count_;
};

// n players plus a passive mediator; action sets {0,..,(n+1)^2-1}.
std::shared_ptr<const ExtensionGame> covert_game(int n);
// Player that sends one real message to `to` tagged with symbol j, then acts 0.
StrategySpec symbol_sender(int to, int j, int alphabet);
// Player that pre-sends its pool, decodes the broadcast at its first
// scheduling without delivery, plays the code (n+1) j1 + j2 and refills.
StrategySpec pool_receiver();
StrategySpec passive_player();
StrategySpec passive_mediator();

// The coalition {i,j} (i-j odd) in the parity mediator game learns b from the
// first-round messages; a relaxed scheduler withholds the STOP batch when b=0.
// Board variant: members post their messages on the blackboard.
Adversary parity_board_adversary(int i, int j);
// Encoded variant: members append m_i empty self-messages to their ack and
// the scheduler decodes them from the message pattern.
Adversary parity_encoded_adversary(int i, int j);

}  // namespace asyncmed
