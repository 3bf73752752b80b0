#include "ghostwit/program.hpp"

#include <algorithm>
#include <stdexcept>

namespace ghostwit {

std::string ThreadId::str() const {
  std::string out = "e";
  for (auto i : path) {
    out += '.';
    out += std::to_string(i);
  }
  return out;
}

ThreadId child_thread_id(const ThreadId& parent, std::uint32_t prior_creates) {
  ThreadId child = parent;
  child.path.push_back(prior_creates);
  return child;
}

std::string render_action(const Action& a) {
  struct V {
    std::string operator()(const Lock& l) const { return "lock(" + l.mutex + ");"; }
    std::string operator()(const Unlock& u) const { return "unlock(" + u.mutex + ");"; }
    std::string operator()(const Create& c) const { return "create(" + c.template_name + ");"; }
    std::string operator()(const LocalUpdate& u) const {
      return u.target + " = " + render_expr(u.value) + ";";
    }
    std::string operator()(const GlobalRead& r) const {
      std::map<std::string, ExprPtr> none;
      return r.target + " = " + render_expr(substitute(r.value, none, make_var(r.global))) + ";";
    }
    std::string operator()(const GlobalWrite& w) const {
      return w.global + " = " + render_expr(w.value) + ";";
    }
    std::string operator()(const Assert& a) const {
      return "assert(" + render_expr(a.cond) + ");";
    }
    std::string operator()(const Guard& g) const {
      return std::string("[") + (g.expect ? "" : "!") + "(" + render_expr(g.cond) + ")]";
    }
    std::string operator()(const Atomic& at) const {
      std::string out = "atomic {";
      for (const auto& m : at.actions) {
        out += ' ';
        out += render_action(m);
      }
      out += " }";
      return out;
    }
  };
  return std::visit(V{}, a.node);
}

bool action_equal(const Action& a, const Action& b) {
  // Guard expectation flips don't show in text for constant conditions, so
  // compare the variant alternative as well.
  if (a.node.index() != b.node.index()) return false;
  if (auto* ga = std::get_if<Guard>(&a.node)) {
    auto* gb = std::get_if<Guard>(&b.node);
    if (ga->expect != gb->expect) return false;
  }
  return render_action(a) == render_action(b);
}

const ThreadTemplate* Program::find_template(const std::string& name) const {
  for (const auto& t : templates)
    if (t.name == name) return &t;
  return nullptr;
}

const GlobalDecl* Program::find_global(const std::string& name) const {
  for (const auto& g : globals)
    if (g.name == name) return &g;
  return nullptr;
}

namespace {

bool always_admissible(const Action& a) {
  return std::holds_alternative<LocalUpdate>(a.node) ||
         std::holds_alternative<GlobalRead>(a.node) ||
         std::holds_alternative<GlobalWrite>(a.node) || std::holds_alternative<Assert>(a.node);
}

// Checks the expression mentions locals only; GlobalArg allowed iff permitted.
void check_expr_scope(const Program& p, const ExprPtr& e, bool allow_global_arg,
                      const std::string& where, std::vector<std::string>& errors) {
  for (const auto& name : referenced_vars(e)) {
    if (p.is_global(name))
      errors.push_back(where + ": expression mentions global '" + name + "' directly");
    if (p.mutexes.count(name))
      errors.push_back(where + ": expression mentions mutex '" + name + "'");
  }
  if (!allow_global_arg && contains_global_arg(e))
    errors.push_back(where + ": global placeholder outside a global read");
}

void check_action(const Program& p, const Action& a, const std::string& where, bool in_atomic,
                  std::vector<std::string>& errors) {
  struct V {
    const Program& p;
    const std::string& where;
    bool in_atomic;
    std::vector<std::string>& errors;

    void operator()(const Lock& l) const {
      if (!p.mutexes.count(l.mutex))
        errors.push_back(where + ": lock of undeclared mutex '" + l.mutex + "'");
    }
    void operator()(const Unlock& u) const {
      if (!p.mutexes.count(u.mutex))
        errors.push_back(where + ": unlock of undeclared mutex '" + u.mutex + "'");
    }
    void operator()(const Create& c) const {
      if (!p.find_template(c.template_name))
        errors.push_back(where + ": create of unknown template '" + c.template_name + "'");
    }
    void operator()(const LocalUpdate& u) const {
      if (p.is_global(u.target))
        errors.push_back(where + ": local update targets global '" + u.target + "'");
      check_expr_scope(p, u.value, false, where, errors);
    }
    void operator()(const GlobalRead& r) const {
      if (p.is_global(r.target))
        errors.push_back(where + ": read target '" + r.target + "' is a global");
      if (!p.is_global(r.global))
        errors.push_back(where + ": read of undeclared global '" + r.global + "'");
      check_expr_scope(p, r.value, true, where, errors);
    }
    void operator()(const GlobalWrite& w) const {
      if (!p.is_global(w.global))
        errors.push_back(where + ": write of undeclared global '" + w.global + "'");
      check_expr_scope(p, w.value, false, where, errors);
    }
    void operator()(const Assert& a) const { check_expr_scope(p, a.cond, false, where, errors); }
    void operator()(const Guard& g) const { check_expr_scope(p, g.cond, false, where, errors); }
    void operator()(const Atomic& at) const {
      if (in_atomic) {
        errors.push_back(where + ": nested atomic");
        return;
      }
      if (at.actions.empty()) {
        errors.push_back(where + ": empty atomic");
        return;
      }
      for (size_t i = 0; i < at.actions.size(); ++i) {
        if (i > 0 && !always_admissible(at.actions[i]))
          errors.push_back(where + ": atomic element " + std::to_string(i) +
                           " must be an update or assert");
        check_action(p, at.actions[i], where, true, errors);
      }
    }
  };
  std::visit(V{p, where, in_atomic, errors}, a.node);
}

}  // namespace

ValidationReport validate_program(const Program& p) {
  ValidationReport rep;
  auto& errors = rep.errors;

  if (!p.find_template("main")) errors.push_back("no 'main' template");

  std::set<std::string> names;
  std::map<NodeId, std::string> node_owner;
  for (const auto& t : p.templates) {
    if (!names.insert(t.name).second)
      errors.push_back("duplicate template name '" + t.name + "'");
    if (!t.nodes.count(t.entry))
      errors.push_back("template '" + t.name + "': entry node " + std::to_string(t.entry) +
                       " not in node set");
    for (NodeId n : t.nodes) {
      auto [it, fresh] = node_owner.emplace(n, t.name);
      if (!fresh && it->second != t.name)
        errors.push_back("node " + std::to_string(n) + " shared by templates '" + it->second +
                         "' and '" + t.name + "'");
    }
  }

  for (const auto& g : p.globals) {
    if (p.mutexes.count(g.name))
      errors.push_back("'" + g.name + "' declared as both global and mutex");
    if (p.locals.count(g.name))
      errors.push_back("'" + g.name + "' is both a global and a local");
  }
  for (const auto& m : p.mutexes)
    if (p.locals.count(m)) errors.push_back("'" + m + "' is both a mutex and a local");

  for (const auto& t : p.templates) {
    std::set<EdgeRef> seen;
    std::map<NodeId, std::vector<const Edge*>> out;
    for (const auto& e : t.edges) {
      std::string where = "template '" + t.name + "', edge " + std::to_string(e.source) + "->" +
                          std::to_string(e.sink);
      if (!t.nodes.count(e.source) || !t.nodes.count(e.sink))
        errors.push_back(where + ": endpoint outside template node set");
      if (!seen.insert(EdgeRef{e.source, e.sink}).second)
        errors.push_back(where + ": duplicate edge between the same node pair");
      check_action(p, e.action, where, false, errors);
      out[e.source].push_back(&e);
    }
    // Guards come in Pos/Neg sibling pairs over the same condition; a node
    // with any guard edge carries exactly those two edges.
    for (const auto& [n, es] : out) {
      bool any_guard = false;
      for (const Edge* e : es)
        if (std::holds_alternative<Guard>(e->action.node)) any_guard = true;
      if (!any_guard) continue;
      std::string where = "template '" + t.name + "', node " + std::to_string(n);
      if (es.size() != 2 || !std::holds_alternative<Guard>(es[0]->action.node) ||
          !std::holds_alternative<Guard>(es[1]->action.node)) {
        errors.push_back(where + ": guard edges must form exactly one Pos/Neg pair");
        continue;
      }
      const auto& g0 = std::get<Guard>(es[0]->action.node);
      const auto& g1 = std::get<Guard>(es[1]->action.node);
      if (g0.expect == g1.expect || !expr_equal(g0.cond, g1.cond))
        errors.push_back(where + ": guard pair must branch on one condition");
    }
  }

  return rep;
}

ProgramIndex::ProgramIndex(const Program& p) : p_(&p) {
  for (const auto& t : p.templates) {
    for (NodeId n : t.nodes) {
      node_template_[n] = &t;
      out_[n];  // ensure every node resolves, possibly to no edges
      max_node_ = std::max(max_node_, n);
    }
    for (const auto& e : t.edges) {
      edges_[EdgeRef{e.source, e.sink}] = &e;
      out_[e.source].push_back(&e);
    }
  }
}

const ThreadTemplate& ProgramIndex::template_of_node(NodeId n) const {
  auto it = node_template_.find(n);
  if (it == node_template_.end())
    throw std::out_of_range("no template owns node " + std::to_string(n));
  return *it->second;
}

const ThreadTemplate& ProgramIndex::template_by_name(const std::string& name) const {
  const ThreadTemplate* t = p_->find_template(name);
  if (!t) throw std::out_of_range("no template named '" + name + "'");
  return *t;
}

const Edge* ProgramIndex::find_edge(EdgeRef ref) const {
  auto it = edges_.find(ref);
  return it == edges_.end() ? nullptr : it->second;
}

const Edge& ProgramIndex::edge(EdgeRef ref) const {
  const Edge* e = find_edge(ref);
  if (!e)
    throw std::out_of_range("no edge " + std::to_string(ref.source) + "->" +
                            std::to_string(ref.sink));
  return *e;
}

const std::vector<const Edge*>& ProgramIndex::out_edges(NodeId n) const {
  auto it = out_.find(n);
  return it == out_.end() ? no_edges_ : it->second;
}

}  // namespace ghostwit
