#pragma once

#include <map>
#include <stdexcept>
#include <string>

#include "ghostwit/program.hpp"

namespace ghostwit {

struct Loc {
  int line = 0;  // 1-based
  int col = 0;   // 1-based

  auto operator<=>(const Loc&) const = default;

  std::string str() const { return std::to_string(line) + ":" + std::to_string(col); }
};

struct ParseError : std::runtime_error {
  Loc loc;

  ParseError(Loc l, const std::string& msg)
      : std::runtime_error(l.str() + ": " + msg), loc(l) {}
};

// Positions for everything the parser produced. node_loc/edge_loc are total
// over the program; statements are keyed by the location of their first
// token, which is unique per statement and canonical for resolving external
// references back into the program.
struct SourceMap {
  std::string filename;
  std::map<NodeId, Loc> node_loc;
  std::map<EdgeRef, Loc> edge_loc;
  // Statement start -> the node the statement begins at.
  std::map<Loc, NodeId> stmt_node;
  // Statement start -> the edge carrying the statement's main effect. Present
  // for lock/unlock/create/assignment/atomic statements only; these are the
  // statements ghost updates may attach to.
  std::map<Loc, EdgeRef> stmt_edge;

  Loc loc_of_node(NodeId n) const;
  Loc loc_of_edge(EdgeRef e) const;
};

struct Parsed {
  Program program;
  SourceMap smap;
};

// Parses DSL text. Throws ParseError (with position) on syntax errors,
// undeclared mutexes or thread templates, duplicate declarations, control
// flow inside atomic blocks, a non-leading lock/unlock/create inside an
// atomic block, and conditionals with two empty branches.
Parsed parse_program(const std::string& text, const std::string& filename = "<input>");

// Parses a single expression (the witness exchange format carries these).
// Identifiers come back as VarRef; the caller classifies them.
ExprPtr parse_expr_text(const std::string& text);

}  // namespace ghostwit
