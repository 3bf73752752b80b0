#include <doctest.h>

#include "ghostwit/parser.hpp"
#include "ghostwit/semantics.hpp"

using namespace ghostwit;

namespace {

struct Fixture {
  Parsed parsed;
  ProgramIndex idx;

  explicit Fixture(const char* src) : parsed(parse_program(src)), idx(parsed.program) {}

  const Edge& edge_at(const std::string& tpl, size_t i) const {
    return parsed.program.find_template(tpl)->edges[i];
  }
};

}  // namespace

TEST_CASE("initial state") {
  Fixture f(R"(
global g : int = 7;
mutex m;

thread main {
  x = g;
}
)");
  State s = initial_state(f.parsed.program);
  REQUIRE(s.threads.size() == 1);
  const ThreadEntry& main = s.threads.at(ThreadId{});
  CHECK(main.node == f.parsed.program.find_template("main")->entry);
  CHECK(main.locals.vars.at("x") == 0);
  CHECK(main.locals.self == ThreadId{});
  CHECK(main.creates == 0);
  CHECK(s.held.empty());
  CHECK(s.globals.at("g") == 7);
}

TEST_CASE("lock and unlock admissibility") {
  Fixture f(R"(
mutex m;

thread main {
  create(w);
  lock(m);
  unlock(m);
}

thread w {
  lock(m);
  unlock(m);
}
)");
  State s = initial_state(f.parsed.program);
  const Edge& create = f.edge_at("main", 0);
  const Edge& lock_main = f.edge_at("main", 1);
  const Edge& unlock_main = f.edge_at("main", 2);
  const Edge& lock_w = f.edge_at("w", 0);

  CHECK(admissible(f.idx, s, ThreadId{}, create));
  s = apply_step(f.idx, s, ThreadId{}, create).state;
  ThreadId w = child_thread_id(ThreadId{}, 0);
  REQUIRE(s.threads.count(w) == 1);

  CHECK(admissible(f.idx, s, ThreadId{}, lock_main));
  CHECK(admissible(f.idx, s, w, lock_w));
  s = apply_step(f.idx, s, ThreadId{}, lock_main).state;
  CHECK(s.held.at("m") == ThreadId{});
  // now the child cannot take it, and only the owner may release
  CHECK(!admissible(f.idx, s, w, lock_w));
  CHECK(admissible(f.idx, s, ThreadId{}, unlock_main));
  State after = apply_step(f.idx, s, ThreadId{}, unlock_main).state;
  CHECK(after.held.empty());
}

TEST_CASE("unlock of a free mutex is inadmissible") {
  Fixture f(R"(
mutex m;

thread main {
  unlock(m);
}
)");
  State s = initial_state(f.parsed.program);
  CHECK(!admissible(f.idx, s, ThreadId{}, f.edge_at("main", 0)));
  CHECK(successors(f.idx, s).ok.empty());
}

TEST_CASE("created threads inherit locals and rebind self") {
  Fixture f(R"(
thread main {
  x = 5;
  create(w);
  create(w);
}

thread w {
  y = x + 1;
  create(v);
}

thread v {
  z = 1;
}
)");
  State s = initial_state(f.parsed.program);
  s = apply_step(f.idx, s, ThreadId{}, f.edge_at("main", 0)).state;
  s = apply_step(f.idx, s, ThreadId{}, f.edge_at("main", 1)).state;
  s = apply_step(f.idx, s, ThreadId{}, f.edge_at("main", 2)).state;

  ThreadId c0 = child_thread_id(ThreadId{}, 0);
  ThreadId c1 = child_thread_id(ThreadId{}, 1);
  REQUIRE(s.threads.count(c0) == 1);
  REQUIRE(s.threads.count(c1) == 1);
  CHECK(s.threads.at(ThreadId{}).creates == 2);
  CHECK(s.threads.at(c0).locals.vars.at("x") == 5);
  CHECK(s.threads.at(c0).locals.self == c0);
  CHECK(s.threads.at(c1).locals.self == c1);

  // grandchild id stacks the parent's create counter
  s = apply_step(f.idx, s, c0, f.edge_at("w", 0)).state;
  s = apply_step(f.idx, s, c0, f.edge_at("w", 1)).state;
  ThreadId g = child_thread_id(c0, 0);
  REQUIRE(s.threads.count(g) == 1);
  CHECK(g.str() == "e.0.0");
  CHECK(s.threads.at(g).locals.vars.at("y") == 6);
}

TEST_CASE("guards follow condition truth") {
  Fixture f(R"(
thread main {
  x = 1;
  if (x == 1) {
    y = 10;
  } else {
    y = 20;
  }
}
)");
  State s = initial_state(f.parsed.program);
  s = apply_step(f.idx, s, ThreadId{}, f.edge_at("main", 0)).state;
  SuccessorSet ss = successors(f.idx, s);
  REQUIRE(ss.ok.size() == 1);  // only the Pos branch
  const Edge& taken = f.idx.edge(ss.ok[0].step.edge);
  REQUIRE(std::holds_alternative<Guard>(taken.action.node));
  CHECK(std::get<Guard>(taken.action.node).expect);
  s = ss.ok[0].effect.state;
  s = successors(f.idx, s).ok[0].effect.state;
  CHECK(s.threads.at(ThreadId{}).locals.vars.at("y") == 10);
}

TEST_CASE("asserts record violations and never block") {
  Fixture f(R"(
thread main {
  x = 2;
  assert(x == 1);
  y = 9;
}
)");
  State s = initial_state(f.parsed.program);
  s = apply_step(f.idx, s, ThreadId{}, f.edge_at("main", 0)).state;
  StepEffect eff = apply_step(f.idx, s, ThreadId{}, f.edge_at("main", 1));
  REQUIRE(eff.violated.size() == 1);
  CHECK(eff.violated[0].first == "assert@4:3");
  CHECK(eff.violated[0].second == AssertKind::Program);
  // execution continues past the violation
  SuccessorSet ss = successors(f.idx, eff.state);
  REQUIRE(ss.ok.size() == 1);
  CHECK(ss.ok[0].effect.state.threads.at(ThreadId{}).locals.vars.at("y") == 9);
}

TEST_CASE("atomic actions run on intermediate states") {
  Fixture f(R"(
global g : int = 0;
mutex m;

thread main {
  atomic { lock(m); g = 1; x = g + 1; assert(x == 2); }
  atomic { assert(g == 2); }
}
)");
  State s = initial_state(f.parsed.program);
  StepEffect eff = apply_step(f.idx, s, ThreadId{}, f.edge_at("main", 0));
  CHECK(eff.violated.empty());  // assert saw the updated x
  CHECK(eff.state.globals.at("g") == 1);
  CHECK(eff.state.held.at("m") == ThreadId{});
  CHECK(eff.state.threads.at(ThreadId{}).locals.vars.at("x") == 2);
  // second atomic's assert reads g through its temp and fails
  StepEffect eff2 = apply_step(f.idx, eff.state, ThreadId{}, f.edge_at("main", 1));
  REQUIRE(eff2.violated.size() == 1);

  // atomic admissibility is its first element's
  Fixture g(R"(
mutex m;

thread main {
  lock(m);
  create(w);
}

thread w {
  atomic { lock(m); x = 1; }
}
)");
  State t = initial_state(g.parsed.program);
  t = apply_step(g.idx, t, ThreadId{}, g.edge_at("main", 0)).state;
  t = apply_step(g.idx, t, ThreadId{}, g.edge_at("main", 1)).state;
  ThreadId w = child_thread_id(ThreadId{}, 0);
  CHECK(!admissible(g.idx, t, w, g.edge_at("w", 0)));
}

TEST_CASE("division faults surface as EvalError") {
  Fixture f(R"(
global g : int = 0;

thread main {
  x = g;
  y = 1 / x;
}
)");
  State s = initial_state(f.parsed.program);
  s = apply_step(f.idx, s, ThreadId{}, f.edge_at("main", 0)).state;
  CHECK_THROWS_AS(apply_step(f.idx, s, ThreadId{}, f.edge_at("main", 1)), EvalError);
  SuccessorSet ss = successors(f.idx, s);
  CHECK(ss.ok.empty());
  REQUIRE(ss.errors.size() == 1);
}

TEST_CASE("successors are deterministic and canonically ordered") {
  Fixture f(R"(
global g : int = 0;

thread main {
  create(w);
  g = 1;
}

thread w {
  g = 2;
}
)");
  State s = initial_state(f.parsed.program);
  s = successors(f.idx, s).ok[0].effect.state;  // create
  SuccessorSet ss = successors(f.idx, s);
  REQUIRE(ss.ok.size() == 2);
  // main (e) sorts before the child (e.0)
  CHECK(ss.ok[0].step.thread == ThreadId{});
  CHECK(ss.ok[1].step.thread == child_thread_id(ThreadId{}, 0));

  // both interleavings of the two writes exist and end distinctly
  State a = successors(f.idx, ss.ok[0].effect.state).ok[0].effect.state;
  State b = successors(f.idx, ss.ok[1].effect.state).ok[0].effect.state;
  CHECK(a.globals.at("g") == 2);
  CHECK(b.globals.at("g") == 1);
  CHECK(!state_equal(a, b));
  CHECK(canonical_state(a) != canonical_state(b));
}

TEST_CASE("replay validates admissibility") {
  Fixture f(R"(
mutex m;

thread main {
  lock(m);
  unlock(m);
}
)");
  Interleaving good;
  const auto& t = *f.parsed.program.find_template("main");
  good.steps.push_back({ThreadId{}, EdgeRef{t.edges[0].source, t.edges[0].sink}});
  good.steps.push_back({ThreadId{}, EdgeRef{t.edges[1].source, t.edges[1].sink}});
  std::vector<State> states = replay(f.idx, good);
  CHECK(states.size() == 3);
  CHECK(states.back().held.empty());

  Interleaving bad;
  bad.steps.push_back({ThreadId{}, EdgeRef{t.edges[1].source, t.edges[1].sink}});
  CHECK_THROWS_AS(replay(f.idx, bad), std::logic_error);
}
