#include "ghostwit/printer.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>

namespace ghostwit {

namespace {

constexpr NodeId kExit = -1;  // virtual node all terminals flow to

class TemplateRenderer {
 public:
  TemplateRenderer(const Program& p, const ThreadTemplate& t) : p_(p), t_(t) {
    for (const auto& e : t_.edges) {
      out_[e.source].push_back(&e);
      for (const auto& name : action_refs(e.action)) refs_[name].insert(&e);
    }
    compute_postdoms();
  }

  std::string run() {
    out_text_.clear();
    emitted_ = 0;
    region(t_.entry, std::nullopt, 1);
    return out_text_;
  }

 private:
  // -- graph helpers ---------------------------------------------------------

  const std::vector<const Edge*>& outs(NodeId n) const {
    static const std::vector<const Edge*> none;
    auto it = out_.find(n);
    return it == out_.end() ? none : it->second;
  }

  // Local names an action mentions (as targets or in expressions).
  static void collect_action_refs(const Action& a, std::vector<std::string>& out) {
    auto add_expr = [&out](const ExprPtr& e) {
      for (auto& n : referenced_vars(e)) out.push_back(n);
    };
    if (auto* u = std::get_if<LocalUpdate>(&a.node)) {
      out.push_back(u->target);
      add_expr(u->value);
    } else if (auto* r = std::get_if<GlobalRead>(&a.node)) {
      out.push_back(r->target);
      add_expr(r->value);
    } else if (auto* w = std::get_if<GlobalWrite>(&a.node)) {
      add_expr(w->value);
    } else if (auto* as = std::get_if<Assert>(&a.node)) {
      add_expr(as->cond);
    } else if (auto* g = std::get_if<Guard>(&a.node)) {
      add_expr(g->cond);
    } else if (auto* at = std::get_if<Atomic>(&a.node)) {
      for (const auto& m : at->actions) collect_action_refs(m, out);
    }
  }

  static std::vector<std::string> action_refs(const Action& a) {
    std::vector<std::string> out;
    collect_action_refs(a, out);
    return out;
  }

  void compute_postdoms() {
    std::set<NodeId> all(t_.nodes.begin(), t_.nodes.end());
    all.insert(kExit);
    for (NodeId n : t_.nodes) pd_[n] = all;
    pd_[kExit] = {kExit};
    bool changed = true;
    while (changed) {
      changed = false;
      for (NodeId n : t_.nodes) {
        std::set<NodeId> meet;
        bool first = true;
        const auto& es = outs(n);
        if (es.empty()) {
          meet = pd_[kExit];
        } else {
          for (const Edge* e : es) {
            if (first) {
              meet = pd_[e->sink];
              first = false;
            } else {
              std::set<NodeId> tmp;
              std::set_intersection(meet.begin(), meet.end(), pd_[e->sink].begin(),
                                    pd_[e->sink].end(), std::inserter(tmp, tmp.begin()));
              meet = std::move(tmp);
            }
          }
        }
        meet.insert(n);
        if (meet != pd_[n]) {
          pd_[n] = std::move(meet);
          changed = true;
        }
      }
    }
  }

  // Nearest node control must pass through after n.
  NodeId ipostdom(NodeId n) const {
    const auto& pds = pd_.at(n);
    NodeId best = kExit;
    size_t best_size = 0;
    for (NodeId v : pds) {
      if (v == n) continue;
      size_t sz = pd_.at(v).size();
      if (sz > best_size) {
        best_size = sz;
        best = v;
      }
    }
    return best;
  }

  bool reachable(NodeId from, NodeId to, NodeId forbidden) const {
    if (from == to) return true;
    std::set<NodeId> seen;
    std::vector<NodeId> stack{from};
    while (!stack.empty()) {
      NodeId n = stack.back();
      stack.pop_back();
      if (n == forbidden || !seen.insert(n).second) continue;
      for (const Edge* e : outs(n)) {
        if (e->sink == to) return true;
        stack.push_back(e->sink);
      }
    }
    return false;
  }

  // -- read-chain folding ----------------------------------------------------

  // A maximal run of pure temp reads (x = g) starting at `start`, ending at a
  // node whose single consumer statement (or guard pair) uses the temps. The
  // frontend's desugaring produces exactly these; folding them back yields
  // text that reparses to the identical graph.
  struct Chain {
    std::vector<const Edge*> reads;  // may be empty
    NodeId end = 0;                  // node holding the consumer
  };

  Chain read_chain(NodeId start) const {
    Chain c;
    c.end = start;
    NodeId n = start;
    while (true) {
      const auto& es = outs(n);
      if (es.size() != 1) break;
      const Edge* e = es[0];
      auto* r = std::get_if<GlobalRead>(&e->action.node);
      if (!r || !std::holds_alternative<GlobalArg>(r->value->node)) break;
      c.reads.push_back(e);
      n = e->sink;
      c.end = n;
    }
    return c;
  }

  // Checks the reads of `chain` can be folded into an expression that
  // mentions each read global, i.e. reparsing regenerates the same chain.
  // On success fills `subst` (temp -> global var) and returns true.
  bool fold_ok(const Chain& chain, const ExprPtr& consumer_expr,
               const std::set<const Edge*>& consumers,
               std::map<std::string, ExprPtr>* subst) const {
    if (chain.reads.empty()) {
      subst->clear();
      return true;
    }
    std::set<std::string> globals_seen;
    std::map<std::string, std::string> temp_global;  // temp -> global
    for (const Edge* e : chain.reads) {
      const auto& r = std::get<GlobalRead>(e->action.node);
      if (!globals_seen.insert(r.global).second) return false;  // dup global
      if (temp_global.count(r.target)) return false;
      temp_global[r.target] = r.global;
      // The temp must live only in this chain and its consumer.
      auto it = refs_.find(r.target);
      if (it == refs_.end()) return false;
      for (const Edge* ref : it->second)
        if (ref != e && !consumers.count(ref)) return false;
    }
    // Reparse reads globals in first-occurrence order of the folded
    // expression, which must match the chain order.
    std::map<std::string, ExprPtr> sub;
    for (auto& [temp, global] : temp_global) sub[temp] = make_var(global);
    ExprPtr folded = substitute(consumer_expr, sub);
    std::vector<std::string> order;
    for (const auto& name : referenced_vars(folded))
      if (p_.is_global(name)) order.push_back(name);
    if (order.size() != chain.reads.size()) return false;
    for (size_t i = 0; i < chain.reads.size(); ++i)
      if (order[i] != std::get<GlobalRead>(chain.reads[i]->action.node).global) return false;
    *subst = std::move(sub);
    return true;
  }

  // -- emission --------------------------------------------------------------

  void line(int indent, const std::string& text) {
    if (++emitted_ > 4 * t_.edges.size() + 8)
      throw std::invalid_argument("template '" + t_.name + "' has non-structured control flow");
    out_text_.append(static_cast<size_t>(indent) * 2, ' ');
    out_text_ += text;
    out_text_ += '\n';
  }

  void region(NodeId u, std::optional<NodeId> stop, int indent) {
    while (!(stop && u == *stop)) {
      const auto& es = outs(u);
      if (es.empty()) return;

      // Guard handling, possibly behind a chain of condition reads.
      Chain chain = read_chain(u);
      const auto& end_es = outs(chain.end);
      if (end_es.size() == 2 && std::holds_alternative<Guard>(end_es[0]->action.node)) {
        u = render_branch(u, chain, end_es, indent);
        continue;
      }
      if (es.size() == 2 && std::holds_alternative<Guard>(es[0]->action.node)) {
        // chain was non-trivial but didn't end in these guards; treat directly
        Chain direct;
        direct.end = u;
        u = render_branch(u, direct, es, indent);
        continue;
      }
      if (es.size() != 1)
        throw std::invalid_argument("template '" + t_.name + "' has non-structured control flow");

      // Foldable chain into a single consuming statement?
      if (!chain.reads.empty() && end_es.size() == 1) {
        const Edge* consumer = end_es[0];
        std::map<std::string, ExprPtr> subst;
        if (auto* a = std::get_if<Assert>(&consumer->action.node)) {
          if (fold_ok(chain, a->cond, {consumer}, &subst)) {
            line(indent, "assert(" + render_expr(substitute(a->cond, subst)) + ");");
            u = consumer->sink;
            continue;
          }
        } else if (auto* w = std::get_if<GlobalWrite>(&consumer->action.node)) {
          if (fold_ok(chain, w->value, {consumer}, &subst)) {
            line(indent, w->global + " = " + render_expr(substitute(w->value, subst)) + ";");
            u = consumer->sink;
            continue;
          }
        } else if (auto* l = std::get_if<LocalUpdate>(&consumer->action.node)) {
          // One-global local assignments reparse as a direct read, not a
          // chain, so only fold when two or more globals are involved.
          if (chain.reads.size() >= 2 && fold_ok(chain, l->value, {consumer}, &subst)) {
            line(indent, l->target + " = " + render_expr(substitute(l->value, subst)) + ";");
            u = consumer->sink;
            continue;
          }
        }
      }

      line(indent, render_stmt(es[0]->action));
      u = es[0]->sink;
    }
  }

  // Renders the if/while rooted at `u` (condition reads in `chain`, guard
  // pair in `guards`); returns the node rendering continues at.
  NodeId render_branch(NodeId u, const Chain& chain, const std::vector<const Edge*>& guards,
                       int indent) {
    const Edge* pos = guards[0];
    const Edge* neg = guards[1];
    if (!std::get<Guard>(pos->action.node).expect) std::swap(pos, neg);
    if (!std::holds_alternative<Guard>(pos->action.node) ||
        !std::holds_alternative<Guard>(neg->action.node) ||
        std::get<Guard>(pos->action.node).expect == std::get<Guard>(neg->action.node).expect)
      throw std::invalid_argument("template '" + t_.name + "': malformed guard pair");

    ExprPtr cond = std::get<Guard>(pos->action.node).cond;
    std::map<std::string, ExprPtr> subst;
    bool folded = fold_ok(chain, cond, {pos, neg}, &subst);
    if (!folded && !chain.reads.empty()) {
      // Render the reads as plain statements, then branch on the raw guard.
      for (const Edge* e : chain.reads) line(indent, render_stmt(e->action));
      Chain direct;
      direct.end = chain.end;
      return render_branch(chain.end, direct, guards, indent);
    }
    std::string cond_text = render_expr(substitute(cond, subst));

    NodeId c = chain.end;
    NodeId ipd = ipostdom(c);
    if (reachable(pos->sink, u, ipd)) {
      line(indent, "while (" + cond_text + ") {");
      region(pos->sink, u, indent + 1);
      line(indent, "}");
      return neg->sink;
    }
    line(indent, "if (" + cond_text + ") {");
    if (ipd == kExit) {
      region(pos->sink, std::nullopt, indent + 1);
      line(indent, "} else {");
      region(neg->sink, std::nullopt, indent + 1);
      line(indent, "}");
      return kExit;  // both branches ran to completion
    }
    region(pos->sink, ipd, indent + 1);
    if (neg->sink == ipd) {
      line(indent, "}");
    } else {
      line(indent, "} else {");
      region(neg->sink, ipd, indent + 1);
      line(indent, "}");
    }
    return ipd;
  }

  std::string render_stmt(const Action& a) const {
    if (auto* at = std::get_if<Atomic>(&a.node)) {
      for (const auto& m : at->actions)
        if (std::holds_alternative<Guard>(m.node) || std::holds_alternative<Atomic>(m.node))
          throw std::invalid_argument("atomic block contains unprintable action");
      return render_action(a);
    }
    if (std::holds_alternative<Guard>(a.node))
      throw std::invalid_argument("stray guard edge");
    return render_action(a);
  }

  const Program& p_;
  const ThreadTemplate& t_;
  std::map<NodeId, std::vector<const Edge*>> out_;
  std::map<std::string, std::set<const Edge*>> refs_;
  std::map<NodeId, std::set<NodeId>> pd_;
  std::string out_text_;
  size_t emitted_ = 0;
};

}  // namespace

std::string render_program(const Program& p) {
  std::string out;
  for (const auto& g : p.globals)
    out += "global " + g.name + " : int = " + g.init.str() + ";\n";
  if (!p.globals.empty()) out += '\n';
  for (const auto& m : p.mutexes) out += "mutex " + m + ";\n";
  if (!p.mutexes.empty()) out += '\n';
  bool first = true;
  for (const auto& t : p.templates) {
    if (!first) out += '\n';
    first = false;
    out += "thread " + t.name + " {\n";
    out += TemplateRenderer(p, t).run();
    out += "}\n";
  }
  return out;
}

bool programs_equal(const Program& a, const Program& b) {
  return render_program(a) == render_program(b);
}

}  // namespace ghostwit
