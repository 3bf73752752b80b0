#include "ghostwit/parser.hpp"

#include <cassert>
#include <functional>
#include <variant>
#include <vector>

namespace ghostwit {

Loc SourceMap::loc_of_node(NodeId n) const {
  auto it = node_loc.find(n);
  return it == node_loc.end() ? Loc{} : it->second;
}

Loc SourceMap::loc_of_edge(EdgeRef e) const {
  auto it = edge_loc.find(e);
  return it == edge_loc.end() ? Loc{} : it->second;
}

namespace {

enum class Tok { Id, Int, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  Loc loc;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_ws();
      Loc loc{line_, col_};
      if (pos_ >= text_.size()) {
        out.push_back({Tok::End, "", loc});
        return out;
      }
      char c = text_[pos_];
      if (isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::string id;
        while (pos_ < text_.size() &&
               (isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
          id += advance();
        out.push_back({Tok::Id, id, loc});
      } else if (isdigit(static_cast<unsigned char>(c))) {
        std::string num;
        while (pos_ < text_.size() && isdigit(static_cast<unsigned char>(text_[pos_])))
          num += advance();
        out.push_back({Tok::Int, num, loc});
      } else {
        out.push_back({Tok::Punct, punct(loc), loc});
      }
    }
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else {
        return;
      }
    }
  }

  char advance() {
    char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  std::string punct(Loc loc) {
    static const char* two[] = {"==", "!=", "<=", ">=", "&&", "||"};
    if (text_.compare(pos_, 3, "==>") == 0) {
      advance(); advance(); advance();
      return "==>";
    }
    for (const char* t : two) {
      if (text_.compare(pos_, 2, t) == 0) {
        advance(); advance();
        return t;
      }
    }
    char c = text_[pos_];
    static const std::string singles = "{}();:=<>+-*/%!,";
    if (singles.find(c) == std::string::npos)
      throw ParseError(loc, std::string("unexpected character '") + c + "'");
    advance();
    return std::string(1, c);
  }

  const std::string& text_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

bool is_keyword(const std::string& s) {
  static const std::set<std::string> kw = {"global", "mutex",  "thread", "lock",
                                           "unlock", "create", "assert", "if",
                                           "else",   "while",  "atomic", "int"};
  return kw.count(s) > 0;
}

// Surface statement tree; lowered to control-flow edges in a second pass so
// forward references to templates work and desugaring temps can be fresh.
struct AStmt;

struct ALock { std::string mutex; };
struct AUnlock { std::string mutex; };
struct ACreate { std::string template_name; };
struct AAssign { std::string target; ExprPtr rhs; };
struct AAssert { ExprPtr cond; };
struct AIf { ExprPtr cond; std::vector<AStmt> then_body, else_body; };
struct AWhile { ExprPtr cond; std::vector<AStmt> body; };
struct AAtomic { std::vector<AStmt> body; };

struct AStmt {
  Loc loc;
  std::variant<ALock, AUnlock, ACreate, AAssign, AAssert, AIf, AWhile, AAtomic> node;
};

struct ADecl {
  Loc loc;
  std::string name;
  // exactly one of:
  std::optional<Value> global_init;
  bool is_mutex = false;
  std::optional<std::vector<AStmt>> body;  // thread template
  Loc body_end;                            // loc of the closing brace
};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  std::vector<ADecl> parse_decls() {
    std::vector<ADecl> decls;
    while (!at_end()) decls.push_back(parse_decl());
    return decls;
  }

  ExprPtr parse_whole_expr() {
    ExprPtr e = parse_expr();
    if (!at_end()) throw ParseError(peek().loc, "trailing input after expression");
    return e;
  }

 private:
  const Token& peek(int k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool at_end() const { return peek().kind == Tok::End; }

  Token take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  bool at_punct(const std::string& p) const {
    return peek().kind == Tok::Punct && peek().text == p;
  }

  bool at_id(const std::string& id) const { return peek().kind == Tok::Id && peek().text == id; }

  Token expect_punct(const std::string& p) {
    if (!at_punct(p)) throw ParseError(peek().loc, "expected '" + p + "'");
    return take();
  }

  Token expect_id() {
    if (peek().kind != Tok::Id) throw ParseError(peek().loc, "expected identifier");
    if (is_keyword(peek().text))
      throw ParseError(peek().loc, "'" + peek().text + "' is a keyword");
    if (peek().text == "self") throw ParseError(peek().loc, "'self' is reserved");
    return take();
  }

  Token expect_keyword(const std::string& kw) {
    if (!at_id(kw)) throw ParseError(peek().loc, "expected '" + kw + "'");
    return take();
  }

  ADecl parse_decl() {
    ADecl d;
    d.loc = peek().loc;
    if (at_id("global")) {
      take();
      d.name = expect_id().text;
      expect_punct(":");
      expect_keyword("int");
      expect_punct("=");
      bool neg = false;
      if (at_punct("-")) {
        take();
        neg = true;
      }
      if (peek().kind != Tok::Int) throw ParseError(peek().loc, "expected integer literal");
      Value v(take().text);
      d.global_init = neg ? -v : v;
      expect_punct(";");
    } else if (at_id("mutex")) {
      take();
      d.name = expect_id().text;
      d.is_mutex = true;
      expect_punct(";");
    } else if (at_id("thread")) {
      take();
      d.name = expect_id().text;
      expect_punct("{");
      std::vector<AStmt> body;
      while (!at_punct("}")) body.push_back(parse_stmt());
      d.body_end = peek().loc;
      expect_punct("}");
      d.body = std::move(body);
    } else {
      throw ParseError(peek().loc, "expected 'global', 'mutex' or 'thread'");
    }
    return d;
  }

  AStmt parse_stmt() {
    Loc loc = peek().loc;
    if (at_id("lock") || at_id("unlock") || at_id("create")) {
      std::string kw = take().text;
      expect_punct("(");
      std::string name = expect_id().text;
      expect_punct(")");
      expect_punct(";");
      if (kw == "lock") return {loc, ALock{name}};
      if (kw == "unlock") return {loc, AUnlock{name}};
      return {loc, ACreate{name}};
    }
    if (at_id("assert")) {
      take();
      expect_punct("(");
      ExprPtr c = parse_expr();
      expect_punct(")");
      expect_punct(";");
      return {loc, AAssert{c}};
    }
    if (at_id("if")) {
      take();
      expect_punct("(");
      ExprPtr c = parse_expr();
      expect_punct(")");
      AIf s{c, {}, {}};
      expect_punct("{");
      while (!at_punct("}")) s.then_body.push_back(parse_stmt());
      expect_punct("}");
      if (at_id("else")) {
        take();
        expect_punct("{");
        while (!at_punct("}")) s.else_body.push_back(parse_stmt());
        expect_punct("}");
      }
      if (s.then_body.empty() && s.else_body.empty())
        throw ParseError(loc, "conditional with two empty branches");
      return {loc, std::move(s)};
    }
    if (at_id("while")) {
      take();
      expect_punct("(");
      ExprPtr c = parse_expr();
      expect_punct(")");
      AWhile s{c, {}};
      expect_punct("{");
      while (!at_punct("}")) s.body.push_back(parse_stmt());
      expect_punct("}");
      return {loc, std::move(s)};
    }
    if (at_id("atomic")) {
      take();
      AAtomic s;
      expect_punct("{");
      while (!at_punct("}")) s.body.push_back(parse_stmt());
      if (s.body.empty()) throw ParseError(loc, "empty atomic block");
      expect_punct("}");
      return {loc, std::move(s)};
    }
    // assignment
    Token id = expect_id();
    expect_punct("=");
    ExprPtr rhs = parse_expr();
    expect_punct(";");
    return {loc, AAssign{id.text, rhs}};
  }

  // Precedence climbing. ==> is lowest and right-associative; it desugars to
  // !(a) || (b) immediately.
  ExprPtr parse_expr() { return parse_implies(); }

  ExprPtr parse_implies() {
    ExprPtr lhs = parse_or();
    if (at_punct("==>")) {
      take();
      return make_implies(lhs, parse_implies());
    }
    return lhs;
  }

  ExprPtr parse_or() {
    ExprPtr e = parse_and();
    while (at_punct("||")) {
      take();
      e = make_binary(BinOp::Or, e, parse_and());
    }
    return e;
  }

  ExprPtr parse_and() {
    ExprPtr e = parse_eq();
    while (at_punct("&&")) {
      take();
      e = make_binary(BinOp::And, e, parse_eq());
    }
    return e;
  }

  ExprPtr parse_eq() {
    ExprPtr e = parse_rel();
    while (at_punct("==") || at_punct("!=")) {
      BinOp op = take().text == "==" ? BinOp::Eq : BinOp::Ne;
      e = make_binary(op, e, parse_rel());
    }
    return e;
  }

  ExprPtr parse_rel() {
    ExprPtr e = parse_add();
    while (true) {
      BinOp op;
      if (at_punct("<")) op = BinOp::Lt;
      else if (at_punct("<=")) op = BinOp::Le;
      else if (at_punct(">")) op = BinOp::Gt;
      else if (at_punct(">=")) op = BinOp::Ge;
      else return e;
      take();
      e = make_binary(op, e, parse_add());
    }
  }

  ExprPtr parse_add() {
    ExprPtr e = parse_mul();
    while (at_punct("+") || at_punct("-")) {
      BinOp op = take().text == "+" ? BinOp::Add : BinOp::Sub;
      e = make_binary(op, e, parse_mul());
    }
    return e;
  }

  ExprPtr parse_mul() {
    ExprPtr e = parse_unary();
    while (at_punct("*") || at_punct("/") || at_punct("%")) {
      std::string t = take().text;
      BinOp op = t == "*" ? BinOp::Mul : (t == "/" ? BinOp::Div : BinOp::Mod);
      e = make_binary(op, e, parse_unary());
    }
    return e;
  }

  ExprPtr parse_unary() {
    if (at_punct("!")) {
      take();
      return make_unary(UnOp::Not, parse_unary());
    }
    if (at_punct("-")) {
      take();
      return make_unary(UnOp::Neg, parse_unary());
    }
    return parse_primary();
  }

  ExprPtr parse_primary() {
    if (peek().kind == Tok::Int) return make_literal(Value(take().text));
    if (at_punct("(")) {
      take();
      ExprPtr e = parse_expr();
      expect_punct(")");
      return e;
    }
    if (peek().kind == Tok::Id) return make_var(expect_id().text);
    throw ParseError(peek().loc, "expected expression");
  }

  std::vector<Token> toks_;
  size_t pos_ = 0;
};

// Lowers statement trees to control-flow edges.
class Lowerer {
 public:
  Lowerer(const std::vector<ADecl>& decls, const std::string& filename,
          std::set<std::string> used_names)
      : decls_(decls), names_(std::move(used_names)) {
    smap_.filename = filename;
    std::set<std::string> declared;
    for (const auto& d : decls_) {
      if (!declared.insert(d.name).second)
        throw ParseError(d.loc, "duplicate declaration of '" + d.name + "'");
      if (d.global_init) {
        program_.globals.push_back({d.name, *d.global_init});
      } else if (d.is_mutex) {
        program_.mutexes.insert(d.name);
      } else {
        template_names_.insert(d.name);
      }
    }
    if (!template_names_.count("main"))
      throw ParseError(Loc{1, 1}, "no 'main' thread");
    program_.locals.insert("self");
  }

  Parsed run() {
    for (const auto& d : decls_) {
      if (!d.body) continue;
      cur_template_ = &program_.templates.emplace_back();
      cur_template_->name = d.name;
      NodeId entry = fresh_node();
      cur_template_->entry = entry;
      NodeId exit = lower_seq(*d.body, entry);
      // Statement starts claimed their nodes; whatever is left (the terminal,
      // plus loop exits and joins that end the body) sits at the closer.
      for (NodeId n : cur_template_->nodes)
        if (!smap_.node_loc.count(n)) smap_.node_loc.emplace(n, d.body_end);
      (void)exit;
    }
    return {std::move(program_), std::move(smap_)};
  }

 private:
  NodeId fresh_node() {
    NodeId n = next_node_++;
    cur_template_->nodes.insert(n);
    return n;
  }

  void add_edge(NodeId u, Action a, NodeId v, Loc loc) {
    cur_template_->edges.push_back({u, std::move(a), v});
    smap_.edge_loc.emplace(EdgeRef{u, v}, loc);
  }

  // Moves every edge sinking at `from` to sink at `to` and drops `from`.
  // `from` never has outgoing edges or a recorded location when this runs.
  void redirect(NodeId from, NodeId to) {
    if (from == to) return;
    for (auto& e : cur_template_->edges)
      if (e.sink == from) {
        smap_.edge_loc.emplace(EdgeRef{e.source, to}, smap_.edge_loc.at(EdgeRef{e.source, from}));
        smap_.edge_loc.erase(EdgeRef{e.source, from});
        e.sink = to;
      }
    for (auto& [loc, er] : smap_.stmt_edge) {
      if (er.sink == from) er.sink = to;
      if (er.source == from) er.source = to;
    }
    cur_template_->nodes.erase(from);
  }

  std::string fresh_temp() {
    std::string name;
    do {
      name = "__t" + std::to_string(next_temp_++);
    } while (names_.count(name));
    program_.locals.insert(name);
    return name;
  }

  void note_local(const std::string& name) {
    if (!program_.is_global(name)) program_.locals.insert(name);
  }

  // Validates identifier uses in an expression and replaces globals with
  // fresh temps, emitting one read edge per distinct global before `at`.
  // Returns the rewritten expression and the node after the reads.
  std::pair<ExprPtr, NodeId> extract_global_reads(ExprPtr e, NodeId at, Loc loc) {
    std::map<std::string, ExprPtr> subst;
    for (const auto& name : referenced_vars(e)) {
      if (program_.mutexes.count(name))
        throw ParseError(loc, "mutex '" + name + "' used in expression");
      if (template_names_.count(name))
        throw ParseError(loc, "thread '" + name + "' used in expression");
      if (!program_.is_global(name)) {
        note_local(name);
        continue;
      }
      std::string tmp = fresh_temp();
      NodeId next = fresh_node();
      add_edge(at, Action{GlobalRead{tmp, name, make_global_arg()}}, next, loc);
      at = next;
      subst.emplace(name, make_var(tmp));
    }
    if (!subst.empty()) e = substitute(e, subst);
    return {e, at};
  }

  // Same desugaring inside an atomic block: reads become leading actions.
  ExprPtr extract_global_reads_atomic(ExprPtr e, std::vector<Action>& actions, Loc loc) {
    std::map<std::string, ExprPtr> subst;
    for (const auto& name : referenced_vars(e)) {
      if (program_.mutexes.count(name))
        throw ParseError(loc, "mutex '" + name + "' used in expression");
      if (template_names_.count(name))
        throw ParseError(loc, "thread '" + name + "' used in expression");
      if (!program_.is_global(name)) {
        note_local(name);
        continue;
      }
      std::string tmp = fresh_temp();
      actions.push_back(Action{GlobalRead{tmp, name, make_global_arg()}});
      subst.emplace(name, make_var(tmp));
    }
    return subst.empty() ? e : substitute(e, subst);
  }

  NodeId lower_seq(const std::vector<AStmt>& stmts, NodeId at) {
    for (const auto& s : stmts) at = lower_stmt(s, at);
    return at;
  }

  void claim_stmt_start(NodeId n, Loc loc) {
    smap_.node_loc.emplace(n, loc);
    bool fresh = smap_.stmt_node.emplace(loc, n).second;
    if (!fresh) throw ParseError(loc, "two statements share a source position");
  }

  NodeId lower_stmt(const AStmt& s, NodeId at) {
    claim_stmt_start(at, s.loc);
    struct V {
      Lowerer& L;
      const AStmt& s;
      NodeId at;

      NodeId operator()(const ALock& a) {
        if (!L.program_.mutexes.count(a.mutex))
          throw ParseError(s.loc, "undeclared mutex '" + a.mutex + "'");
        NodeId next = L.fresh_node();
        L.add_edge(at, Action{Lock{a.mutex}}, next, s.loc);
        L.smap_.stmt_edge.emplace(s.loc, EdgeRef{at, next});
        return next;
      }

      NodeId operator()(const AUnlock& a) {
        if (!L.program_.mutexes.count(a.mutex))
          throw ParseError(s.loc, "undeclared mutex '" + a.mutex + "'");
        NodeId next = L.fresh_node();
        L.add_edge(at, Action{Unlock{a.mutex}}, next, s.loc);
        L.smap_.stmt_edge.emplace(s.loc, EdgeRef{at, next});
        return next;
      }

      NodeId operator()(const ACreate& a) {
        if (!L.template_names_.count(a.template_name))
          throw ParseError(s.loc, "undeclared thread '" + a.template_name + "'");
        NodeId next = L.fresh_node();
        L.add_edge(at, Action{Create{a.template_name}}, next, s.loc);
        L.smap_.stmt_edge.emplace(s.loc, EdgeRef{at, next});
        return next;
      }

      NodeId operator()(const AAssign& a) {
        if (L.program_.mutexes.count(a.target))
          throw ParseError(s.loc, "cannot assign to mutex '" + a.target + "'");
        if (L.template_names_.count(a.target))
          throw ParseError(s.loc, "cannot assign to thread '" + a.target + "'");
        bool global_target = L.program_.is_global(a.target);
        if (!global_target) L.note_local(a.target);

        // A local := expr over exactly one distinct global becomes a single
        // read action; everything else reads each global into a temp first.
        std::vector<std::string> globals;
        for (const auto& n : referenced_vars(a.rhs))
          if (L.program_.is_global(n)) globals.push_back(n);

        if (!global_target && globals.size() == 1) {
          // still validate the other identifiers
          for (const auto& n : referenced_vars(a.rhs)) {
            if (L.program_.mutexes.count(n))
              throw ParseError(s.loc, "mutex '" + n + "' used in expression");
            if (L.template_names_.count(n))
              throw ParseError(s.loc, "thread '" + n + "' used in expression");
            if (!L.program_.is_global(n)) L.note_local(n);
          }
          std::map<std::string, ExprPtr> subst{{globals[0], make_global_arg()}};
          NodeId next = L.fresh_node();
          L.add_edge(at, Action{GlobalRead{a.target, globals[0], substitute(a.rhs, subst)}}, next,
                     s.loc);
          L.smap_.stmt_edge.emplace(s.loc, EdgeRef{at, next});
          return next;
        }

        auto [rhs, mid] = L.extract_global_reads(a.rhs, at, s.loc);
        NodeId next = L.fresh_node();
        Action act = global_target ? Action{GlobalWrite{a.target, rhs}}
                                   : Action{LocalUpdate{a.target, rhs}};
        L.add_edge(mid, std::move(act), next, s.loc);
        L.smap_.stmt_edge.emplace(s.loc, EdgeRef{mid, next});
        return next;
      }

      NodeId operator()(const AAssert& a) {
        auto [cond, mid] = L.extract_global_reads(a.cond, at, s.loc);
        NodeId next = L.fresh_node();
        L.add_edge(mid, Action{Assert{cond, "assert@" + s.loc.str(), AssertKind::Program}}, next,
                   s.loc);
        return next;
      }

      NodeId operator()(const AIf& a) {
        auto [cond, c] = L.extract_global_reads(a.cond, at, s.loc);
        NodeId join = L.fresh_node();
        if (a.then_body.empty()) {
          L.add_edge(c, Action{Guard{cond, true}}, join, s.loc);
        } else {
          NodeId tb = L.fresh_node();
          L.add_edge(c, Action{Guard{cond, true}}, tb, s.loc);
          L.redirect(L.lower_seq(a.then_body, tb), join);
        }
        if (a.else_body.empty()) {
          L.add_edge(c, Action{Guard{cond, false}}, join, s.loc);
        } else {
          NodeId eb = L.fresh_node();
          L.add_edge(c, Action{Guard{cond, false}}, eb, s.loc);
          L.redirect(L.lower_seq(a.else_body, eb), join);
        }
        return join;
      }

      NodeId operator()(const AWhile& a) {
        // at is the loop head; condition reads rerun on every iteration.
        auto [cond, c] = L.extract_global_reads(a.cond, at, s.loc);
        NodeId exit = L.fresh_node();
        if (a.body.empty()) {
          L.add_edge(c, Action{Guard{cond, true}}, at, s.loc);
        } else {
          NodeId bb = L.fresh_node();
          L.add_edge(c, Action{Guard{cond, true}}, bb, s.loc);
          L.redirect(L.lower_seq(a.body, bb), at);
        }
        L.add_edge(c, Action{Guard{cond, false}}, exit, s.loc);
        return exit;
      }

      NodeId operator()(const AAtomic& a) {
        std::vector<Action> actions;
        for (const auto& m : a.body) L.lower_atomic_member(m, actions);
        for (size_t i = 1; i < actions.size(); ++i) {
          bool plain = std::holds_alternative<LocalUpdate>(actions[i].node) ||
                       std::holds_alternative<GlobalRead>(actions[i].node) ||
                       std::holds_alternative<GlobalWrite>(actions[i].node) ||
                       std::holds_alternative<Assert>(actions[i].node);
          if (!plain)
            throw ParseError(s.loc,
                             "lock/unlock/create must be the first statement of an atomic block");
        }
        NodeId next = L.fresh_node();
        L.add_edge(at, Action{Atomic{std::move(actions)}}, next, s.loc);
        L.smap_.stmt_edge.emplace(s.loc, EdgeRef{at, next});
        return next;
      }
    };
    return std::visit(V{*this, s, at}, s.node);
  }

  void lower_atomic_member(const AStmt& s, std::vector<Action>& actions) {
    struct V {
      Lowerer& L;
      const AStmt& s;
      std::vector<Action>& actions;

      void operator()(const ALock& a) {
        if (!L.program_.mutexes.count(a.mutex))
          throw ParseError(s.loc, "undeclared mutex '" + a.mutex + "'");
        actions.push_back(Action{Lock{a.mutex}});
      }
      void operator()(const AUnlock& a) {
        if (!L.program_.mutexes.count(a.mutex))
          throw ParseError(s.loc, "undeclared mutex '" + a.mutex + "'");
        actions.push_back(Action{Unlock{a.mutex}});
      }
      void operator()(const ACreate& a) {
        if (!L.template_names_.count(a.template_name))
          throw ParseError(s.loc, "undeclared thread '" + a.template_name + "'");
        actions.push_back(Action{Create{a.template_name}});
      }
      void operator()(const AAssign& a) {
        if (L.program_.mutexes.count(a.target))
          throw ParseError(s.loc, "cannot assign to mutex '" + a.target + "'");
        if (L.template_names_.count(a.target))
          throw ParseError(s.loc, "cannot assign to thread '" + a.target + "'");
        bool global_target = L.program_.is_global(a.target);
        if (!global_target) L.note_local(a.target);

        std::vector<std::string> globals;
        for (const auto& n : referenced_vars(a.rhs))
          if (L.program_.is_global(n)) globals.push_back(n);

        if (!global_target && globals.size() == 1) {
          for (const auto& n : referenced_vars(a.rhs))
            if (!L.program_.is_global(n)) L.note_local(n);
          std::map<std::string, ExprPtr> subst{{globals[0], make_global_arg()}};
          actions.push_back(Action{GlobalRead{a.target, globals[0], substitute(a.rhs, subst)}});
          return;
        }
        ExprPtr rhs = L.extract_global_reads_atomic(a.rhs, actions, s.loc);
        if (global_target)
          actions.push_back(Action{GlobalWrite{a.target, rhs}});
        else
          actions.push_back(Action{LocalUpdate{a.target, rhs}});
      }
      void operator()(const AAssert& a) {
        ExprPtr cond = L.extract_global_reads_atomic(a.cond, actions, s.loc);
        actions.push_back(Action{Assert{cond, "assert@" + s.loc.str(), AssertKind::Program}});
      }
      void operator()(const AIf&) {
        throw ParseError(s.loc, "control flow inside atomic block");
      }
      void operator()(const AWhile&) {
        throw ParseError(s.loc, "control flow inside atomic block");
      }
      void operator()(const AAtomic&) { throw ParseError(s.loc, "nested atomic block"); }
    };
    std::visit(V{*this, s, actions}, s.node);
  }

  const std::vector<ADecl>& decls_;
  Program program_;
  SourceMap smap_;
  std::set<std::string> names_;
  std::set<std::string> template_names_;
  ThreadTemplate* cur_template_ = nullptr;
  NodeId next_node_ = 0;
  int next_temp_ = 0;
};

}  // namespace

Parsed parse_program(const std::string& text, const std::string& filename) {
  std::vector<Token> toks = Lexer(text).run();
  // Desugaring temps must not collide with any identifier in the input.
  std::set<std::string> used;
  for (const auto& t : toks)
    if (t.kind == Tok::Id) used.insert(t.text);
  Parser parser(std::move(toks));
  std::vector<ADecl> decls = parser.parse_decls();
  Parsed out = Lowerer(decls, filename, std::move(used)).run();
  ValidationReport rep = validate_program(out.program);
  if (!rep.ok())
    throw ParseError(Loc{1, 1}, "internal: lowering produced invalid program: " + rep.errors[0]);
  return out;
}

ExprPtr parse_expr_text(const std::string& text) {
  Parser parser(Lexer(text).run());
  return parser.parse_whole_expr();
}

}  // namespace ghostwit
