#pragma once

#include <functional>
#include <optional>
#include <set>

#include "ghostwit/explore.hpp"
#include "ghostwit/parser.hpp"
#include "ghostwit/semantics.hpp"

namespace ghostwit {

// One configuration in a thread's run: after `index` steps (the position in
// the per-thread vector) the thread sits at `node` with `locals`. in_edge is
// the control-flow edge whose execution produced the configuration; absent
// for initial configurations. global_value records the value a GlobalWrite
// wrote or a GlobalRead read.
struct TraceEvent {
  NodeId node = 0;
  LocalState locals;
  std::optional<EdgeRef> in_edge;
  std::optional<Value> global_value;
};

struct EventKey {
  ThreadId thread;
  int index = 0;

  auto operator<=>(const EventKey&) const = default;

  std::string str() const { return thread.str() + "/" + std::to_string(index); }
};

inline EventKey least_event() { return EventKey{ThreadId{}, 0}; }

// The creator's configuration just before its create step, and the thread it
// started.
struct CreateEdge {
  EventKey creator_pre;
  ThreadId created;

  auto operator<=>(const CreateEdge&) const = default;
};

// Orders two critical sections of one mutex: from the configuration after
// the previous unlock (or the least event for the first acquisition) to the
// configuration after the next lock.
struct LockEdge {
  std::string mutex;
  EventKey from;
  EventKey to;

  auto operator<=>(const LockEdge&) const = default;
};

struct GlobalTrace {
  std::map<ThreadId, std::vector<TraceEvent>> threads;
  std::vector<CreateEdge> creates;
  std::vector<LockEdge> locks;

  std::uint64_t event_count() const;
  const TraceEvent* find(const EventKey& k) const;
};

// A global trace with a designated maximal event; the downward closure of
// that event.
struct LocalTrace {
  GlobalTrace trace;
  EventKey maximal;
};

// Stable, injective serialization; structural identity for deduplication.
std::string canonical_trace(const GlobalTrace& g);
bool trace_equal(const GlobalTrace& a, const GlobalTrace& b);

struct ConsistencyReport {
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

// Cross-thread requirements (unique least element, create order, lock order,
// reads agree with the unique last causally preceding write) plus per-thread
// path legality: edges follow the template, guard conditions hold, local
// states evolve by the actions, lock/unlock respects the held set, create
// steps produce the arithmetically correct child ids and initial locals.
ConsistencyReport check_consistency(const GlobalTrace& g, const Program& p);

// Every non-initial thread's creating event is present and every create step
// has its created thread's initial configuration present.
bool is_create_complete(const GlobalTrace& g);

// Causal downward closure of `k` within g.
LocalTrace close_below(const GlobalTrace& g, const EventKey& k);

// The designated protection mutex of a global.
std::string mutex_for_global(const std::string& global);

struct LangReport {
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

// Membership in the mutex-guarded subset the trace semantics is defined for:
// no atomic actions, and every access to a global g happens while m_g is
// definitely held.
LangReport check_lang_mg(const Program& p);

// Fused per-thread projection equality: the runs of i (per-thread sequences
// of configurations and step edges) equal the per-thread paths of g.
bool coincides(const ProgramIndex& idx, const Interleaving& i, const GlobalTrace& g);

// Pre: p in Lang_MG, i replays from initial_state. The resulting trace is
// consistent, create-complete, and coincides with i.
GlobalTrace interleaving_to_global_trace(const ProgramIndex& idx, const Interleaving& i);

// Pre: g consistent and create-complete (throws std::invalid_argument
// otherwise). Produces a consistent interleaving coinciding with g by
// linearizing the causal order (smallest ready event first).
Interleaving global_trace_to_interleaving(const ProgramIndex& idx, const GlobalTrace& g);

// Enumerates the consistent traces of a Lang_MG program breadth-first by
// event count up to max_events, each exactly once up to structural equality.
// The visitor may return false to stop. Returns false when the event bound
// cut off unexplored extensions. Throws std::invalid_argument when p is not
// in Lang_MG, EvalError on division faults.
bool enumerate_global_traces(const Program& p, std::uint64_t max_events,
                             const std::function<bool(const GlobalTrace&)>& visit);

struct TraceSearchOptions {
  std::function<bool(const std::string& id, AssertKind kind)> relevant;
  bool collect_all = false;
};

struct TraceSearchResult {
  VerdictKind kind = VerdictKind::Safe;
  std::optional<LocalTrace> witness;  // violating local trace (Unsafe)
  std::string assert_id;
  std::string message;  // fault text (EvalError)
  std::uint64_t traces = 0;
  std::set<std::string> all_violations;  // collect mode
};

// Trace-side safety: searches the consistent traces (bounded by
// b.max_events) for an assert event whose condition fails; the witness is
// that event's downward closure. Deterministic: smallest traces first.
TraceSearchResult trace_safety(const Program& p, const Bounds& b = {},
                               const TraceSearchOptions& opt = {});

// Human-readable dump: one line per event (indexed in (thread, n) order),
// then one line per ordering edge.
std::string render_trace(const GlobalTrace& g, const SourceMap* sm = nullptr);
std::string render_local_trace(const LocalTrace& lt, const SourceMap* sm = nullptr);

}  // namespace ghostwit
