#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "asyncmed/errors.hpp"
#include "asyncmed/game.hpp"

namespace asyncmed {

inline constexpr int kMediator = 0;
inline constexpr int kEnvironment = -1;
inline constexpr int kStopTag = -1;

using Blackboard = std::map<std::string, std::int64_t>;

struct Payload {
  int tag = 0;
  std::vector<std::int64_t> data;
  bool operator==(const Payload&) const = default;
  auto operator<=>(const Payload&) const = default;
};

Payload stop_payload(Action a);
inline bool is_stop(const Payload& p) { return p.tag == kStopTag; }

// What the environment can see of a message.
struct MessageHeader {
  std::uint64_t id = 0;
  int from = 0;
  int to = 0;
  int seq = 0;           // per (from,to) channel, from 1
  std::int64_t batch = 0;  // step of the sending reaction
};

struct Message {
  MessageHeader header;
  Payload body;
};

// Payload-free record: 'T' start, 'S' send, 'D' deliver, 'I' idle scheduling.
struct PatternEvent {
  char kind = 'S';
  int from = 0;
  int to = 0;
  int seq = 0;
  auto operator<=>(const PatternEvent&) const = default;
};
using MessagePattern = std::vector<PatternEvent>;

struct Event {
  enum class Kind { Start, Schedule, Send, Deliver, Act, Halt, Coin, Withhold, Policy };
  Kind kind = Kind::Start;
  std::int64_t step = 0;
  int a = 0;
  int b = 0;
  int c = 0;
  std::int64_t v = 0;
};

std::string format_event(const Event& e);
// One line per event, fields in a fixed order.
std::string export_log(const std::vector<Event>& log);

class CoinSource {
 public:
  virtual ~CoinSource() = default;
  // Uniform draw from {0,..,arity-1} on behalf of participant `who`
  // (kEnvironment for the scheduler).
  virtual std::uint64_t draw(int who, std::uint64_t arity) = 0;
};

class RngCoins : public CoinSource {
 public:
  RngCoins(std::uint64_t seed, int n);
  std::uint64_t draw(int who, std::uint64_t arity) override;

 private:
  std::vector<std::mt19937_64> streams_;  // index who+1
};

// Enumerates every coin sequence of a computation in odometer order.
class TapeCoins : public CoinSource {
 public:
  std::uint64_t draw(int who, std::uint64_t arity) override;
  void rewind() { pos_ = 0; }
  // Probability of the sequence consumed since the last rewind.
  Rational probability() const;
  // Moves to the next sequence; false once all have been visited.
  bool advance();
  std::size_t used() const { return pos_; }

 private:
  struct Entry {
    std::uint64_t arity;
    std::uint64_t value;
  };
  std::vector<Entry> tape_;
  std::size_t pos_ = 0;
};

// Draws are forwarded to a host participant's stream.
class ForwardCoins : public CoinSource {
 public:
  explicit ForwardCoins(std::function<std::uint64_t(std::uint64_t)> f) : f_(std::move(f)) {}
  std::uint64_t draw(int, std::uint64_t arity) override { return f_(arity); }

 private:
  std::function<std::uint64_t(std::uint64_t)> f_;
};

class Ctx {
 public:
  virtual ~Ctx() = default;
  virtual int self() const = 0;
  virtual int n() const = 0;
  virtual int type() const = 0;
  virtual void send(int to, Payload body) = 0;
  virtual void act(Action a) = 0;
  virtual void halt() = 0;
  virtual std::uint64_t coin(std::uint64_t arity) = 0;
  // Shared coalition state; null unless the participant has access.
  virtual Blackboard* board() = 0;
  virtual bool has_acted() const = 0;
};

class Agent {
 public:
  virtual ~Agent() = default;
  virtual std::unique_ptr<Agent> clone() const = 0;
  // The start signal.
  virtual void start(Ctx&) {}
  // `m` is null for a scheduling without delivery.
  virtual void react(Ctx& ctx, const Message* m) = 0;
  virtual std::optional<Action> will() const { return std::nullopt; }
};

template <class Derived>
class AgentBase : public Agent {
 public:
  std::unique_ptr<Agent> clone() const override {
    return std::make_unique<Derived>(static_cast<const Derived&>(*this));
  }
};

using AgentFactory = std::function<std::unique_ptr<Agent>(int self, int type)>;

struct StrategySpec {
  std::string name;
  AgentFactory make;
};

struct Profile {
  std::string name;
  std::optional<StrategySpec> mediator;
  std::vector<StrategySpec> players;  // index i-1
  std::vector<char> board_access;     // index = participant (0 = mediator)
  bool canonical = false;
  int r = 0;  // mediator message bound per player when canonical
  bool has_board_access(int who) const {
    return who >= 0 && who < static_cast<int>(board_access.size()) && board_access[who];
  }
};

enum class InfinitePlay { DefaultMove, Wills };

struct ExtensionGame {
  std::shared_ptr<const UnderlyingGame> game;
  bool has_mediator = true;
  InfinitePlay policy = InfinitePlay::DefaultMove;
  std::vector<std::map<int, Action>> defaults;  // per player: type -> move
  int alphabet_size = 0;                        // 0 = unconstrained
  int n() const { return game->n(); }
  Action default_move(int player, int type) const;
};

struct SchedView {
  const MessagePattern* pattern = nullptr;  // set when the scheduler asks for it
  const std::vector<MessageHeader>* pending = nullptr;
  const std::vector<char>* live = nullptr;  // index = participant
  const Blackboard* board = nullptr;
  std::int64_t step = 0;
  int n = 0;
  bool has_mediator = false;
};

struct Choice {
  enum class Kind { Deliver, Idle, Withhold, WithholdAll };
  Kind kind = Kind::Deliver;
  std::size_t index = 0;  // into pending, for Deliver and Withhold
  int who = 0;            // for Idle
  static Choice deliver(std::size_t i) { return {Kind::Deliver, i, 0}; }
  static Choice idle(int who) { return {Kind::Idle, 0, who}; }
  static Choice withhold(std::size_t i) { return {Kind::Withhold, i, 0}; }
  static Choice withhold_all() { return {Kind::WithholdAll, 0, 0}; }
};

class Scheduler {
 public:
  virtual ~Scheduler() = default;
  virtual Choice decide(const SchedView& view, CoinSource& env) const = 0;
  virtual bool relaxed() const { return false; }
  virtual bool needs_pattern() const { return false; }
  virtual std::string name() const = 0;
};

enum class EndReason { Running, AllHalted, Quiescent, Withheld, Budget };
std::string to_string(EndReason r);

struct RunOptions {
  std::int64_t step_budget = 200000;
  bool record_log = true;
  bool record_pattern = false;
  bool record_local = false;  // needed by check_information_sets
};

// Everything a participant observed and did, in order.
struct LocalStep {
  char kind = 'T';  // 'T' start, 'D' delivery, 'I' idle
  std::optional<Message> delivered;
  std::vector<std::uint64_t> coins;
  std::vector<std::pair<int, Payload>> sends;
  std::optional<Action> act;
  bool halted = false;
};
using LocalHistory = std::vector<LocalStep>;

struct RunResult {
  ActionProfile outcome;
  std::vector<char> acted;        // index i-1
  std::vector<char> halted;       // index i-1
  std::vector<char> got_stop;     // index i-1
  std::vector<char> by_policy;    // move filled in by the infinite-play policy
  bool deadlock = false;
  EndReason reason = EndReason::Running;
  std::vector<Event> log;
  MessagePattern pattern;
  std::uint64_t messages = 0;
  std::uint64_t deliveries = 0;
  std::int64_t steps = 0;
  std::size_t undelivered = 0;
  std::vector<int> mediator_sent;         // index i-1
  std::vector<char> mediator_last_stop;   // index i-1
  std::vector<LocalHistory> local;        // index = participant
  Blackboard board;
};

class Run {
 public:
  Run(const ExtensionGame& ext, const Profile& profile, TypeProfile x, CoinSource* coins, RunOptions opt = {});
  Run(const Run& other);
  Run& operator=(const Run&) = delete;

  void start();
  bool finished() const { return reason_ != EndReason::Running; }
  EndReason reason() const { return reason_; }
  // Applies one environment move. Withholding is only legal for relaxed
  // schedulers; the caller states which kind it is.
  void apply(const Choice& c, bool relaxed);
  // Called when nothing is deliverable: completes partly delivered mediator
  // batches, then schedules every live participant once. Ends the run if
  // nothing changes.
  void settle();
  // Drives the run to the end with the given scheduler.
  void drive(const Scheduler& s);
  // Runs settle() until something is deliverable or the run is over.
  void advance_to_choice();
  RunResult finish();

  void set_coins(CoinSource* coins) { coins_ = coins; }
  const std::vector<MessageHeader>& pending() const { return pending_; }
  const std::vector<Payload>& pending_bodies() const { return bodies_; }
  const std::vector<MessageHeader>& withheld() const { return withheld_; }
  const MessagePattern& pattern() const { return pattern_; }
  const std::vector<char>& live() const { return live_; }
  const Blackboard& board() const { return board_; }
  bool any_stop_received() const;
  std::int64_t step() const { return step_; }
  int n() const { return n_; }
  const TypeProfile& types() const { return x_; }
  bool all_players_halted() const;
  SchedView view(bool with_pattern) const;

 private:
  class RunCtx;
  friend class RunCtx;

  void react(int who, const Message* m, char kind);
  void deliver_at(std::size_t idx);
  void log(Event::Kind k, int a, int b = 0, int c = 0, std::int64_t v = 0);
  void check_end();

  const ExtensionGame* ext_;
  const Profile* profile_;
  TypeProfile x_;
  CoinSource* coins_;
  RunOptions opt_;
  int n_;
  std::vector<std::unique_ptr<Agent>> agents_;  // index = participant, null if absent
  std::vector<char> live_;
  std::vector<char> acted_;
  std::vector<Action> moves_;
  std::vector<char> got_stop_;
  std::vector<MessageHeader> pending_;
  std::vector<Payload> bodies_;
  std::vector<MessageHeader> withheld_;
  std::vector<Payload> withheld_bodies_;
  std::map<std::int64_t, int> delivered_mediator_batches_;
  std::vector<int> seq_;  // (n+1)^2 channel counters
  std::uint64_t next_id_ = 1;
  std::int64_t step_ = 0;
  bool progress_ = false;
  EndReason reason_ = EndReason::Running;
  std::vector<Event> log_;
  MessagePattern pattern_;
  std::uint64_t messages_ = 0;
  std::uint64_t deliveries_ = 0;
  std::vector<int> mediator_sent_;
  std::vector<char> mediator_last_stop_;
  std::vector<LocalHistory> local_;
  LocalStep* current_ = nullptr;
  Blackboard board_;
};

RunResult run(const ExtensionGame& ext, const Profile& profile, const Scheduler& scheduler, const TypeProfile& x,
              std::uint64_t seed, RunOptions opt = {});

RunResult run_with_coins(const ExtensionGame& ext, const Profile& profile, const Scheduler& scheduler,
                         const TypeProfile& x, CoinSource& coins, RunOptions opt = {});

// Replays every participant without coalition access on a fresh agent and
// compares its reactions. Throws InformationSetViolation on mismatch.
void check_information_sets(const ExtensionGame& ext, const Profile& profile, const RunResult& r,
                            const TypeProfile& x);

struct DeadlockVerdict {
  bool deadlocked = false;
  bool stop_received = false;
  std::size_t pending = 0;
  std::size_t delivered_later = 0;
};

// Deadlocked iff no player has received STOP and continuing with `s` delivers
// none of the currently pending messages.
DeadlockVerdict detect_deadlock(const Run& state, const Profile& profile, const Scheduler& s);

}  // namespace asyncmed
