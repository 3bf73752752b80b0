#include "ghostwit/semantics.hpp"

#include <cassert>
#include <stdexcept>

namespace ghostwit {

State initial_state(const Program& p) {
  State s;
  ThreadEntry main;
  const ThreadTemplate* mt = p.find_template("main");
  if (!mt) throw std::invalid_argument("program has no main template");
  main.node = mt->entry;
  for (const auto& l : p.locals)
    if (l != "self") main.locals.vars[l] = 0;
  main.locals.self = ThreadId{};
  s.threads.emplace(ThreadId{}, std::move(main));
  for (const auto& g : p.globals) s.globals[g.name] = g.init;
  return s;
}

std::string canonical_state(const State& s) {
  std::string out;
  for (const auto& [t, e] : s.threads) {
    out += t.str();
    out += '@';
    out += std::to_string(e.node);
    out += '#';
    out += std::to_string(e.creates);
    out += '{';
    for (const auto& [k, v] : e.locals.vars) {
      out += k;
      out += '=';
      out += v.str();
      out += ',';
    }
    out += "self=";
    out += e.locals.self.str();
    out += "};";
  }
  out += '|';
  for (const auto& [m, t] : s.held) {
    out += m;
    out += '=';
    out += t.str();
    out += ';';
  }
  out += '|';
  for (const auto& [g, v] : s.globals) {
    out += g;
    out += '=';
    out += v.str();
    out += ';';
  }
  return out;
}

bool state_equal(const State& a, const State& b) {
  return canonical_state(a) == canonical_state(b);
}

namespace {

bool admissible_action(const State& s, const ThreadId& t, const Action& a) {
  struct V {
    const State& s;
    const ThreadId& t;

    bool operator()(const Lock& l) const { return s.held.find(l.mutex) == s.held.end(); }
    bool operator()(const Unlock& u) const {
      auto it = s.held.find(u.mutex);
      return it != s.held.end() && it->second == t;
    }
    bool operator()(const Guard& g) const {
      const auto& locals = s.threads.at(t).locals.vars;
      bool truth = eval(*g.cond, locals) != 0;
      return truth == g.expect;
    }
    bool operator()(const Create&) const { return true; }
    bool operator()(const LocalUpdate&) const { return true; }
    bool operator()(const GlobalRead&) const { return true; }
    bool operator()(const GlobalWrite&) const { return true; }
    bool operator()(const Assert&) const { return true; }
    bool operator()(const Atomic& at) const {
      return admissible_action(s, t, at.actions.front());
    }
  };
  return std::visit(V{s, t}, a.node);
}

// Applies one (non-atomic) action for t on s in place.
void apply_action(const ProgramIndex& idx, State& s, const ThreadId& t, const Action& a,
                  std::vector<std::pair<std::string, AssertKind>>& violated) {
  struct V {
    const ProgramIndex& idx;
    State& s;
    const ThreadId& t;
    std::vector<std::pair<std::string, AssertKind>>& violated;

    void operator()(const Lock& l) const { s.held[l.mutex] = t; }
    void operator()(const Unlock& u) const { s.held.erase(u.mutex); }

    void operator()(const Create& c) const {
      ThreadEntry& parent = s.threads.at(t);
      ThreadId child = child_thread_id(t, parent.creates);
      parent.creates += 1;
      const ThreadTemplate& tpl = idx.template_by_name(c.template_name);
      ThreadEntry e;
      e.node = tpl.entry;
      // The child starts from the parent's locals with self rebound.
      e.locals.vars = parent.locals.vars;
      e.locals.self = child;
      bool fresh = s.threads.emplace(std::move(child), std::move(e)).second;
      if (!fresh) throw std::logic_error("duplicate thread id on create");
    }

    void operator()(const LocalUpdate& u) const {
      auto& locals = s.threads.at(t).locals.vars;
      locals[u.target] = eval(*u.value, locals);
    }

    void operator()(const GlobalRead& r) const {
      auto& locals = s.threads.at(t).locals.vars;
      auto git = s.globals.find(r.global);
      if (git == s.globals.end()) throw std::logic_error("read of unknown global " + r.global);
      locals[r.target] = eval(*r.value, locals, &git->second);
    }

    void operator()(const GlobalWrite& w) const {
      auto& locals = s.threads.at(t).locals.vars;
      auto git = s.globals.find(w.global);
      if (git == s.globals.end()) throw std::logic_error("write of unknown global " + w.global);
      git->second = eval(*w.value, locals);
    }

    void operator()(const Assert& a) const {
      const auto& locals = s.threads.at(t).locals.vars;
      if (eval(*a.cond, locals) == 0) violated.emplace_back(a.id, a.kind);
    }

    void operator()(const Guard&) const {}

    void operator()(const Atomic&) const { throw std::logic_error("nested atomic"); }
  };
  std::visit(V{idx, s, t, violated}, a.node);
}

}  // namespace

bool admissible(const ProgramIndex& idx, const State& s, const ThreadId& t, const Edge& e) {
  auto it = s.threads.find(t);
  if (it == s.threads.end() || it->second.node != e.source)
    throw std::logic_error("thread not positioned at edge source");
  (void)idx;
  return admissible_action(s, t, e.action);
}

StepEffect apply_step(const ProgramIndex& idx, const State& s, const ThreadId& t, const Edge& e) {
  StepEffect out;
  out.state = s;
  if (auto* at = std::get_if<Atomic>(&e.action.node)) {
    for (const auto& m : at->actions) apply_action(idx, out.state, t, m, out.violated);
  } else {
    apply_action(idx, out.state, t, e.action, out.violated);
  }
  out.state.threads.at(t).node = e.sink;
  // Mutual exclusion is structural here (one owner per mutex by map shape);
  // owners must exist.
  for (const auto& [m, owner] : out.state.held)
    if (!out.state.threads.count(owner))
      throw std::logic_error("mutex " + m + " held by unknown thread");
  return out;
}

SuccessorSet successors(const ProgramIndex& idx, const State& s) {
  SuccessorSet out;
  for (const auto& [t, entry] : s.threads) {
    for (const Edge* e : idx.out_edges(entry.node)) {
      Step step{t, EdgeRef{e->source, e->sink}};
      try {
        if (!admissible(idx, s, t, *e)) continue;
        out.ok.push_back(Successor{step, apply_step(idx, s, t, *e)});
      } catch (const EvalError& err) {
        out.errors.emplace_back(step, err.what());
      }
    }
  }
  return out;
}

std::vector<State> replay(const ProgramIndex& idx, const Interleaving& i) {
  std::vector<State> states;
  states.push_back(initial_state(idx.program()));
  for (const Step& st : i.steps) {
    const Edge& e = idx.edge(st.edge);
    if (!admissible(idx, states.back(), st.thread, e))
      throw std::logic_error("inadmissible step " + st.thread.str() + " " +
                             render_action(e.action));
    states.push_back(apply_step(idx, states.back(), st.thread, e).state);
  }
  return states;
}

}  // namespace ghostwit
