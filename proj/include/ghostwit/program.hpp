#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "ghostwit/expr.hpp"

namespace ghostwit {

// Control-flow nodes are numbered globally; node sets of distinct thread
// templates are disjoint.
using NodeId = int;

// Thread identity: the initial thread is the empty sequence, the j-th thread
// created by t (counting that thread's own create steps from 0) is t ++ [j].
struct ThreadId {
  std::vector<std::uint32_t> path;

  auto operator<=>(const ThreadId&) const = default;

  // "e" for the initial thread, then dot-joined indices: e.0, e.0.1, ...
  std::string str() const;
};

ThreadId child_thread_id(const ThreadId& parent, std::uint32_t prior_creates);

struct Action;

struct Lock {
  std::string mutex;
};

struct Unlock {
  std::string mutex;
};

struct Create {
  std::string template_name;
};

// x := f(locals). Pure: no global access.
struct LocalUpdate {
  std::string target;
  ExprPtr value;
};

// x := f(locals, g): reads the single global named here; the GlobalArg
// placeholder in `value` stands for g's current value.
struct GlobalRead {
  std::string target;
  std::string global;
  ExprPtr value;
};

// g := f(locals).
struct GlobalWrite {
  std::string global;
  ExprPtr value;
};

enum class AssertKind { Program, Witness };

struct Assert {
  ExprPtr cond;          // over locals only
  std::string id;        // stable across transformations
  AssertKind kind = AssertKind::Program;
};

// Pos(expect=true) / Neg(expect=false) branch guard over locals.
struct Guard {
  ExprPtr cond;
  bool expect;
};

// Sequence executed indivisibly. Only the first element may be of a kind
// whose admissibility can fail (Lock/Unlock/Guard/Create); the rest are
// LocalUpdate/GlobalRead/GlobalWrite/Assert. Never nested.
struct Atomic {
  std::vector<Action> actions;
};

struct Action {
  std::variant<Lock, Unlock, Create, LocalUpdate, GlobalRead, GlobalWrite, Assert, Guard, Atomic>
      node;
};

// Renders the action as DSL statement text (without trailing newline).
// Guards are not surface syntax and render as [c] / [!c].
std::string render_action(const Action& a);

bool action_equal(const Action& a, const Action& b);

struct Edge {
  NodeId source = 0;
  Action action;
  NodeId sink = 0;
};

// Identifies an edge by endpoints; programs carry at most one edge per pair.
struct EdgeRef {
  NodeId source = 0;
  NodeId sink = 0;

  auto operator<=>(const EdgeRef&) const = default;
};

struct ThreadTemplate {
  std::string name;
  NodeId entry = 0;
  std::set<NodeId> nodes;  // includes entry and every edge endpoint
  std::vector<Edge> edges; // declaration order fixes successor order
};

struct GlobalDecl {
  std::string name;
  Value init;
};

struct Program {
  std::vector<GlobalDecl> globals;  // declaration order matters for rendering
  std::set<std::string> mutexes;
  std::set<std::string> locals;     // the shared local namespace, incl. "self"
  std::vector<ThreadTemplate> templates;  // "main" required; unique names

  const ThreadTemplate* find_template(const std::string& name) const;
  const GlobalDecl* find_global(const std::string& name) const;
  bool is_global(const std::string& name) const { return find_global(name) != nullptr; }
};

// Structural sanity report. Each finding is one line of text.
struct ValidationReport {
  std::vector<std::string> errors;

  bool ok() const { return errors.empty(); }
};

// Checks the program invariants: a main template exists, template names and
// node sets are disjoint, entry nodes belong to their template, edges connect
// member nodes, at most one edge per (source, sink) pair, Guard siblings are
// well formed, create targets name existing templates, mutex actions name
// declared mutexes, global accesses name declared globals, action payload
// expressions only mention locals (plus the placeholder inside GlobalRead),
// and atomic sequences obey the first-element rule and are not nested.
ValidationReport validate_program(const Program& p);

// Derived lookup structures over an immutable program.
class ProgramIndex {
 public:
  explicit ProgramIndex(const Program& p);

  const Program& program() const { return *p_; }
  const ThreadTemplate& template_of_node(NodeId n) const;
  const ThreadTemplate& template_by_name(const std::string& name) const;
  const Edge* find_edge(EdgeRef ref) const;        // null when absent
  const Edge& edge(EdgeRef ref) const;             // throws when absent
  const std::vector<const Edge*>& out_edges(NodeId n) const;
  NodeId max_node() const { return max_node_; }

 private:
  const Program* p_;
  std::map<NodeId, const ThreadTemplate*> node_template_;
  std::map<EdgeRef, const Edge*> edges_;
  std::map<NodeId, std::vector<const Edge*>> out_;
  std::vector<const Edge*> no_edges_;
  NodeId max_node_ = 0;
};

}  // namespace ghostwit
