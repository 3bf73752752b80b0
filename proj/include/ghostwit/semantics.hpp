#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ghostwit/program.hpp"

namespace ghostwit {

// Per-thread variable store. All declared locals are present (initially 0);
// `self` is thread-id valued and kept apart from the integer locals.
struct LocalState {
  Env vars;
  ThreadId self;
};

struct ThreadEntry {
  NodeId node = 0;
  LocalState locals;
  std::uint32_t creates = 0;  // create steps taken so far, names the next child
};

// (L, M, G): thread positions and locals, mutex ownership, global values.
struct State {
  std::map<ThreadId, ThreadEntry> threads;
  std::map<std::string, ThreadId> held;
  std::map<std::string, Value> globals;
};

State initial_state(const Program& p);

// Stable, injective serialization; used for visited-set identity.
std::string canonical_state(const State& s);

bool state_equal(const State& a, const State& b);

struct Step {
  ThreadId thread;
  EdgeRef edge;
};

// A run prefix: steps applied to initial_state(p) in order.
struct Interleaving {
  std::vector<Step> steps;
};

// Whether thread t may take edge e in s: lock wants the mutex free, unlock
// wants t to own it, guards want their condition's truth to match. May throw
// EvalError (guard evaluation). Pre: t is at e.source.
bool admissible(const ProgramIndex& idx, const State& s, const ThreadId& t, const Edge& e);

struct StepEffect {
  State state;
  // Asserts that evaluated false during this step, in execution order.
  std::vector<std::pair<std::string, AssertKind>> violated;
};

// Applies e for t. Atomic sequences run on the intermediate states member by
// member. Violated asserts are recorded, never block. Throws EvalError on
// division faults. Pre: admissible.
StepEffect apply_step(const ProgramIndex& idx, const State& s, const ThreadId& t, const Edge& e);

struct Successor {
  Step step;
  StepEffect effect;
};

struct SuccessorSet {
  std::vector<Successor> ok;
  // Steps whose admissibility check or effect faulted, with the fault text.
  std::vector<std::pair<Step, std::string>> errors;
};

// All admissible steps of s in canonical order: threads ascending by id,
// edges in template declaration order.
SuccessorSet successors(const ProgramIndex& idx, const State& s);

// Replays i from initial_state(p); throws std::logic_error on an inadmissible
// step. Returns all states, initial first (size = steps + 1).
std::vector<State> replay(const ProgramIndex& idx, const Interleaving& i);

}  // namespace ghostwit
