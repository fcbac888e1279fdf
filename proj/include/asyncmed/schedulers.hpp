#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "asyncmed/engine.hpp"

namespace asyncmed {

// Oldest pending message first.
class FifoScheduler : public Scheduler {
 public:
  Choice decide(const SchedView& v, CoinSource& env) const override;
  std::string name() const override { return "fifo"; }
};

// Newest pending message first.
class LifoScheduler : public Scheduler {
 public:
  Choice decide(const SchedView& v, CoinSource& env) const override;
  std::string name() const override { return "lifo"; }
};

// Uniformly random pending message, drawn from the environment's stream.
class RandomScheduler : public Scheduler {
 public:
  Choice decide(const SchedView& v, CoinSource& env) const override;
  std::string name() const override { return "random"; }
};

// Cycles through receivers, delivering each one's oldest message in turn.
class RoundRobinScheduler : public Scheduler {
 public:
  Choice decide(const SchedView& v, CoinSource& env) const override;
  std::string name() const override { return "round-robin"; }
};

// Prefers senders by rank (lower rank first); ties go to the oldest message.
class SenderPriorityScheduler : public Scheduler {
 public:
  SenderPriorityScheduler(std::vector<int> order, std::string label);
  Choice decide(const SchedView& v, CoinSource& env) const override;
  std::string name() const override { return label_; }

 private:
  std::vector<int> rank_;
  std::string label_;
};

// Delivers anything to or from `player` only when nothing else is pending.
class DelayPlayerScheduler : public Scheduler {
 public:
  explicit DelayPlayerScheduler(int player) : player_(player) {}
  Choice decide(const SchedView& v, CoinSource& env) const override;
  std::string name() const override { return "delay-" + std::to_string(player_); }

 private:
  int player_;
};

// With probability 3/4 delivers the oldest message, else a random one.
class MostlyFifoScheduler : public Scheduler {
 public:
  Choice decide(const SchedView& v, CoinSource& env) const override;
  std::string name() const override { return "mostly-fifo"; }
};

// Relaxed: never delivers anything.
class SilentScheduler : public Scheduler {
 public:
  Choice decide(const SchedView& v, CoinSource& env) const override;
  bool relaxed() const override { return true; }
  std::string name() const override { return "silent"; }
};

// Relaxed: withholds mediator messages whose channel sequence number is at
// least `seq` (e.g. the STOP batch of an r-message mediator), FIFO otherwise.
class WithholdMediatorScheduler : public Scheduler {
 public:
  explicit WithholdMediatorScheduler(int seq) : seq_(seq) {}
  Choice decide(const SchedView& v, CoinSource& env) const override;
  bool relaxed() const override { return true; }
  std::string name() const override { return "withhold-mediator-seq" + std::to_string(seq_); }

 private:
  int seq_;
};

// Relaxed: withholds every message sent by a participant in `senders`.
class WithholdSendersScheduler : public Scheduler {
 public:
  explicit WithholdSendersScheduler(std::set<int> senders) : senders_(std::move(senders)) {}
  Choice decide(const SchedView& v, CoinSource& env) const override;
  bool relaxed() const override { return true; }
  std::string name() const override;

 private:
  std::set<int> senders_;
};

using ChannelKey = std::tuple<int, int, int>;  // from, to, seq

// Follows a fixed list of deliveries, then falls back to FIFO.
class ScriptedScheduler : public Scheduler {
 public:
  explicit ScriptedScheduler(std::vector<ChannelKey> script) : script_(std::move(script)) {}
  Choice decide(const SchedView& v, CoinSource& env) const override;
  bool needs_pattern() const override { return true; }
  std::string name() const override { return "scripted"; }

 private:
  std::vector<ChannelKey> script_;
};

// A deterministic scheduler given as a finite table from message patterns to
// the message to deliver. Patterns outside the table fall back to FIFO.
class ChoiceTreeScheduler : public Scheduler {
 public:
  ChoiceTreeScheduler() = default;
  explicit ChoiceTreeScheduler(std::map<MessagePattern, ChannelKey> table) : table_(std::move(table)) {}
  Choice decide(const SchedView& v, CoinSource& env) const override;
  bool needs_pattern() const override { return true; }
  std::string name() const override { return "choice-tree"; }
  const std::map<MessagePattern, ChannelKey>& table() const { return table_; }
  std::map<MessagePattern, ChannelKey>& table() { return table_; }

 private:
  std::map<MessagePattern, ChannelKey> table_;
};

// FIFO, except that messages from players outside `present` to the mediator
// are held back until nothing else is pending.
class DeferringScheduler : public Scheduler {
 public:
  explicit DeferringScheduler(std::set<int> present) : present_(std::move(present)) {}
  Choice decide(const SchedView& v, CoinSource& env) const override;
  std::string name() const override { return "deferring"; }

 private:
  std::set<int> present_;
};

std::size_t find_pending(const SchedView& v, const ChannelKey& key);

// Ten fair schedulers of different shapes.
std::vector<std::shared_ptr<const Scheduler>> standard_menu(int n);

}  // namespace asyncmed
