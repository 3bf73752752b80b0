#include <doctest.h>

#include "ghostwit/explore.hpp"
#include "ghostwit/parser.hpp"

using namespace ghostwit;

namespace {

const char* kCounter = R"(
global used : int = 0;
mutex m;

thread main {
  create(worker);
  lock(m);
  assert(used == 0);
  unlock(m);
}

thread worker {
  lock(m);
  used = 47;
  used = 0;
  unlock(m);
}
)";

const char* kRacyCounter = R"(
global used : int = 0;

thread main {
  create(worker);
  assert(used == 0);
}

thread worker {
  used = 47;
  used = 0;
}
)";

}  // namespace

TEST_CASE("mutex protection makes the counter safe") {
  Verdict v = explore(parse_program(kCounter).program);
  CHECK(v.kind == VerdictKind::Safe);
  CHECK(!v.cex.has_value());
  CHECK(v.stats.states > 1);
  CHECK(v.stats.deadlocked == 0);
}

TEST_CASE("removing the lock exposes the stale read") {
  Verdict v = explore(parse_program(kRacyCounter).program);
  REQUIRE(v.kind == VerdictKind::Unsafe);
  REQUIRE(v.cex.has_value());
  CHECK(v.cex->assert_id == "assert@6:3");
  // shortest violation: create, worker writes 47, read, assert
  CHECK(v.cex->interleaving.steps.size() == 4);
}

TEST_CASE("counterexamples replay to the violation") {
  Parsed p = parse_program(kRacyCounter);
  ProgramIndex idx(p.program);
  Verdict v = explore(p.program);
  REQUIRE(v.cex.has_value());
  std::vector<State> states = replay(idx, v.cex->interleaving);
  CHECK(states.size() == v.cex->interleaving.steps.size() + 1);
  // the last step is the assert over the stale temp
  const Edge& last = idx.edge(v.cex->interleaving.steps.back().edge);
  CHECK(std::holds_alternative<Assert>(last.action.node));
}

TEST_CASE("verdicts are independent of the worker count") {
  for (const char* src : {kCounter, kRacyCounter}) {
    Parsed p = parse_program(src);
    Bounds b1;
    Bounds b4;
    b4.jobs = 4;
    Verdict v1 = explore(p.program, b1);
    Verdict v4 = explore(p.program, b4);
    CHECK(v1.kind == v4.kind);
    CHECK(v1.stats.states == v4.stats.states);
    CHECK(v1.stats.transitions == v4.stats.transitions);
    if (v1.cex.has_value()) {
      REQUIRE(v4.cex.has_value());
      CHECK(v1.cex->assert_id == v4.cex->assert_id);
      REQUIRE(v1.cex->interleaving.steps.size() == v4.cex->interleaving.steps.size());
      for (size_t i = 0; i < v1.cex->interleaving.steps.size(); ++i) {
        CHECK(v1.cex->interleaving.steps[i].thread == v4.cex->interleaving.steps[i].thread);
        CHECK(v1.cex->interleaving.steps[i].edge == v4.cex->interleaving.steps[i].edge);
      }
    }
  }
}

TEST_CASE("step bound yields BoundExceeded on an endless loop") {
  Parsed p = parse_program(R"(
global g : int = 0;

thread main {
  while (0 == 0) {
    g = g + 1;
  }
}
)");
  Bounds b;
  b.max_steps = 25;
  Verdict v = explore(p.program, b);
  CHECK(v.kind == VerdictKind::BoundExceeded);
}

TEST_CASE("state bound yields BoundExceeded") {
  Parsed p = parse_program(R"(
global g : int = 0;

thread main {
  while (0 == 0) {
    g = g + 1;
  }
}
)");
  Bounds b;
  b.max_states = 10;
  Verdict v = explore(p.program, b);
  CHECK(v.kind == VerdictKind::BoundExceeded);
}

TEST_CASE("terminated programs are safe, not deadlocked") {
  Parsed p = parse_program(R"(
thread main {
  x = 1;
}
)");
  Verdict v = explore(p.program);
  CHECK(v.kind == VerdictKind::Safe);
  CHECK(v.stats.deadlocked == 0);
}

TEST_CASE("crossed lock order counts deadlocked leaves") {
  Parsed p = parse_program(R"(
mutex a;
mutex b;

thread main {
  create(w);
  lock(a);
  lock(b);
  unlock(b);
  unlock(a);
}

thread w {
  lock(b);
  lock(a);
  unlock(a);
  unlock(b);
}
)");
  Verdict v = explore(p.program);
  CHECK(v.kind == VerdictKind::Safe);  // no asserts to violate
  CHECK(v.stats.deadlocked > 0);
}

TEST_CASE("division fault is a distinct verdict") {
  Parsed p = parse_program(R"(
global g : int = 0;

thread main {
  x = g;
  y = 1 / x;
}
)");
  Verdict v = explore(p.program);
  REQUIRE(v.kind == VerdictKind::EvalError);
  REQUIRE(v.cex.has_value());
  CHECK(v.cex->assert_id.empty());
  CHECK(v.cex->message.find("division by zero") != std::string::npos);
  CHECK(v.cex->interleaving.steps.size() == 2);
}

TEST_CASE("collect mode gathers every violated assert") {
  Parsed p = parse_program(R"(
global g : int = 0;

thread main {
  create(w);
  x = g;
  assert(x == 0);
  assert(x < 5);
}

thread w {
  g = 7;
}
)");
  ExploreOptions opt;
  opt.collect_all = true;
  Verdict v = explore(p.program, Bounds{}, opt);
  CHECK(v.kind == VerdictKind::Unsafe);
  CHECK(v.all_violations == std::set<std::string>{"assert@7:3", "assert@8:3"});
  // the first-found counterexample is still minimal
  REQUIRE(v.cex.has_value());
  CHECK(v.cex->interleaving.steps.size() == 4);
}

TEST_CASE("relevance filter ignores chosen asserts") {
  Parsed p = parse_program(kRacyCounter);
  ExploreOptions opt;
  opt.relevant = [](const std::string&, AssertKind) { return false; };
  Verdict v = explore(p.program, Bounds{}, opt);
  CHECK(v.kind == VerdictKind::Safe);
}
