#pragma once

#include "asyncmed/mediator.hpp"

namespace asyncmed {

// Same game as the race fixture; the mediator always says 0.
MediatorFixture constant_fixture();

// Same game as the race fixture; the mediator tosses a fair coin for the move.
MediatorFixture coin_fixture();

// Same game, no mediator: player 1 sends two messages to player 2, plays 0
// and halts; player 2 plays 1 iff the first one sent arrives first.
MediatorFixture order_toy_fixture();

// Same game, no mediator: player 1 plays 0 and halts at once, player 2 waits
// for a message that is never sent.
MediatorFixture cotermination_failure_fixture();

}  // namespace asyncmed
