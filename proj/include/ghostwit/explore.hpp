#pragma once

#include <functional>
#include <optional>
#include <set>

#include "ghostwit/semantics.hpp"

namespace ghostwit {

enum class VerdictKind { Safe, Unsafe, EvalError, BoundExceeded };

std::string verdict_name(VerdictKind k);

struct Bounds {
  std::uint64_t max_steps = 10000;    // interleaving length cap
  std::uint64_t max_states = 1000000; // distinct state cap
  std::uint64_t max_events = 64;      // trace event cap (trace-side exploration)
  int jobs = 1;
};

struct Counterexample {
  Interleaving interleaving;  // ends with the violating/faulting step
  std::string assert_id;      // violated assert (empty for eval faults)
  std::string message;        // fault text (eval faults only)
};

struct ExploreStats {
  std::uint64_t states = 0;       // distinct states reached
  std::uint64_t transitions = 0;  // admissible steps taken
  std::uint64_t depth = 0;        // layers fully expanded
  std::uint64_t deadlocked = 0;   // leaves with live but blocked threads
};

struct Verdict {
  VerdictKind kind = VerdictKind::Safe;
  std::optional<Counterexample> cex;
  ExploreStats stats;
  // collect mode only: every relevant assert id seen violated anywhere
  std::set<std::string> all_violations;
};

struct ExploreOptions {
  // Violations of irrelevant asserts are ignored (exploration continues).
  std::function<bool(const std::string& id, AssertKind kind)> relevant;
  // Explore the full bounded state space and gather all_violations instead of
  // stopping at the first violation. Eval faults still stop the search.
  bool collect_all = false;
};

// Breadth-first search over canonical states. The verdict is deterministic
// and independent of the worker count: within a layer, states expand in
// discovery order and successors in canonical order; the first relevant
// violation (or fault) in that order is the counterexample, which makes it
// minimal in length with ties broken by successor order.
Verdict explore(const Program& p, const Bounds& b = {}, const ExploreOptions& opt = {});

}  // namespace ghostwit
