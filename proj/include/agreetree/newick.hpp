#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <unordered_set>
#include <variant>
#include <vector>

#include "agreetree/error.hpp"
#include "agreetree/rooted_tree.hpp"
#include "agreetree/structure.hpp"
#include "agreetree/unrooted_tree.hpp"

namespace agreetree {

using Tree = std::variant<RootedTree, UnrootedTree>;

// Grammar accepted:
//   tree    := subtree ";"
//   subtree := LABEL | "(" subtree "," subtree ")"
//   the outermost node may also be "(" subtree "," subtree "," subtree ")"
//   LABEL   := [1-9][0-9]*
// Whitespace between tokens is ignored.

namespace detail {

struct NewickNode {
  Label label = 0;
  std::vector<int> kids;
};

class NewickParser {
 public:
  explicit NewickParser(std::string_view text) : text_(text) {}

  Tree parse() {
    parse_nodes();
    const NewickNode& top = nodes_[root_];
    if (top.kids.empty()) return RootedTree::leaf(top.label);
    if (top.kids.size() == 2) return build_rooted();
    return build_unrooted();
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  Label parse_label() {
    const std::size_t start = pos_;
    if (text_[pos_] == '0') fail("labels must not start with 0");
    Label value = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      if (value > 100'000'000'000'000'000LL) throw ParseError("label too large", start);
      value = value * 10 + (text_[pos_] - '0');
      ++pos_;
    }
    if (!labels_.insert(value).second) throw ParseError("duplicate leaf label " + std::to_string(value), start);
    return value;
  }

  void attach(std::vector<int>& open, int id) {
    if (open.empty()) {
      root_ = id;
      finished_ = true;
    } else {
      nodes_[open.back()].kids.push_back(id);
    }
  }

  void parse_nodes() {
    std::vector<int> open;
    bool expect_subtree = true;
    while (true) {
      char c = peek();
      if (expect_subtree) {
        if (c == '(') {
          nodes_.emplace_back();
          open.push_back(static_cast<int>(nodes_.size() - 1));
          ++pos_;
        } else if (c >= '0' && c <= '9') {
          nodes_.push_back(NewickNode{parse_label(), {}});
          attach(open, static_cast<int>(nodes_.size() - 1));
          expect_subtree = false;
        } else {
          fail(c == '\0' ? "unexpected end of input" : std::string("expected '(' or a label, found '") + c + "'");
        }
        continue;
      }
      if (finished_) {
        if (c != ';') fail(c == '\0' ? "missing ';'" : std::string("expected ';', found '") + c + "'");
        ++pos_;
        if (peek() != '\0') fail("trailing characters after ';'");
        return;
      }
      if (c == ',') {
        ++pos_;
        expect_subtree = true;
      } else if (c == ')') {
        const int id = open.back();
        const std::size_t k = nodes_[id].kids.size();
        if (open.size() == 1) {
          if (k != 2 && k != 3) fail("outermost node must have 2 or 3 children, found " + std::to_string(k));
        } else if (k != 2) {
          fail("non-binary internal node with " + std::to_string(k) + " children");
        }
        ++pos_;
        open.pop_back();
        attach(open, id);
      } else {
        fail(c == '\0' ? "unexpected end of input" : std::string("expected ',' or ')', found '") + c + "'");
      }
    }
  }

  RootedTree build_rooted() const {
    RootedTree::Builder b;
    std::vector<NodeId> id(nodes_.size(), kNoNode);
    // Children are created before parents, so ids are assigned in reverse
    // creation order of a postorder walk.
    std::vector<std::pair<int, bool>> stack{{root_, false}};
    while (!stack.empty()) {
      auto [u, done] = stack.back();
      stack.pop_back();
      const NewickNode& nd = nodes_[u];
      if (nd.kids.empty()) {
        id[u] = b.add_leaf(nd.label);
      } else if (done) {
        id[u] = b.add_internal(id[nd.kids[0]], id[nd.kids[1]]);
      } else {
        stack.emplace_back(u, true);
        stack.emplace_back(nd.kids[1], false);
        stack.emplace_back(nd.kids[0], false);
      }
    }
    return std::move(b).build(id[root_]);
  }

  UnrootedTree build_unrooted() const {
    UnrootedTree::Builder b;
    std::vector<VertexId> id(nodes_.size(), -1);
    for (std::size_t u = 0; u < nodes_.size(); ++u)
      id[u] = nodes_[u].kids.empty() ? b.add_leaf(nodes_[u].label) : b.add_internal();
    for (std::size_t u = 0; u < nodes_.size(); ++u)
      for (int k : nodes_[u].kids) b.connect(id[u], id[k]);
    return std::move(b).build();
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::vector<NewickNode> nodes_;
  std::unordered_set<Label> labels_;
  int root_ = -1;
  bool finished_ = false;
};

}  // namespace detail

/// Parses one tree. Two children at the outermost node give a rooted tree,
/// three give an unrooted one, a bare label gives a one-leaf rooted tree.
inline Tree parse_newick(std::string_view text) { return detail::NewickParser(text).parse(); }

inline RootedTree parse_rooted(std::string_view text) {
  Tree t = parse_newick(text);
  if (auto* r = std::get_if<RootedTree>(&t)) return std::move(*r);
  throw PreconditionError("expected a rooted tree, got an unrooted (trifurcating) one");
}

/// Rooted input with at least three leaves is accepted and unrooted.
inline UnrootedTree parse_unrooted(std::string_view text) {
  Tree t = parse_newick(text);
  if (auto* u = std::get_if<UnrootedTree>(&t)) return std::move(*u);
  return unroot(std::get<RootedTree>(t));
}

/// Splits a text holding several ';'-terminated trees and parses each.
inline std::vector<Tree> parse_newick_all(std::string_view text) {
  std::vector<Tree> out;
  std::size_t start = 0;
  while (true) {
    std::size_t semi = text.find(';', start);
    std::string_view chunk = text.substr(start, semi == std::string_view::npos ? std::string_view::npos : semi + 1 - start);
    bool blank = true;
    for (char c : chunk) blank = blank && std::isspace(static_cast<unsigned char>(c));
    if (!blank) {
      try {
        out.push_back(parse_newick(chunk));
      } catch (const ParseError& e) {
        throw ParseError(std::string(e.what()).substr(0, std::string(e.what()).rfind(" at position")),
                         start + e.position());
      }
    }
    if (semi == std::string_view::npos) break;
    start = semi + 1;
  }
  return out;
}

/// Canonical form: children ordered by their smallest leaf label.
inline std::string to_newick(const RootedTree& t) {
  std::string out;
  // A negative entry encodes a literal character to emit.
  std::vector<NodeId> stack{t.root()};
  while (!stack.empty()) {
    NodeId u = stack.back();
    stack.pop_back();
    if (u < 0) {
      out += static_cast<char>(-u);
      continue;
    }
    if (t.is_leaf(u)) {
      out += std::to_string(t.label(u));
      continue;
    }
    NodeId a = t.left(u), b = t.right(u);
    if (t.min_label(b) < t.min_label(a)) std::swap(a, b);
    out += '(';
    stack.push_back(-')');
    stack.push_back(b);
    stack.push_back(-',');
    stack.push_back(a);
  }
  return out + ";";
}

/// Canonical form: trifurcation at the internal neighbour of the smallest leaf,
/// branches ordered by smallest leaf label.
inline std::string to_newick(const UnrootedTree& t) {
  const VertexId top = t.neighbors(t.leaf_vertex(t.leaves().min()))[0];
  const auto n = t.vertex_count();
  std::vector<VertexId> parent(n, -1), order;
  std::vector<Label> min_label(n, 0);
  order.reserve(n);
  std::vector<VertexId> stack{top};
  parent[top] = top;
  while (!stack.empty()) {
    VertexId v = stack.back();
    stack.pop_back();
    order.push_back(v);
    for (VertexId w : t.neighbors(v))
      if (parent[w] < 0) {
        parent[w] = v;
        stack.push_back(w);
      }
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    VertexId v = *it;
    if (t.is_leaf(v)) {
      min_label[v] = t.label(v);
      continue;
    }
    Label best = 0;
    for (VertexId w : t.neighbors(v))
      if (w != parent[v] || v == top) best = best == 0 ? min_label[w] : std::min(best, min_label[w]);
    min_label[v] = best;
  }
  auto kids_of = [&](VertexId v) {
    std::vector<VertexId> kids;
    for (VertexId w : t.neighbors(v))
      if (v == top || w != parent[v]) kids.push_back(w);
    std::sort(kids.begin(), kids.end(), [&](VertexId x, VertexId y) { return min_label[x] < min_label[y]; });
    return kids;
  };
  std::string out;
  std::vector<VertexId> emit{top};
  while (!emit.empty()) {
    VertexId v = emit.back();
    emit.pop_back();
    if (v < 0) {
      out += static_cast<char>(-v);
      continue;
    }
    if (t.is_leaf(v)) {
      out += std::to_string(t.label(v));
      continue;
    }
    std::vector<VertexId> kids = kids_of(v);
    out += '(';
    emit.push_back(-')');
    for (std::size_t i = kids.size(); i-- > 0;) {
      emit.push_back(kids[i]);
      if (i > 0) emit.push_back(-',');
    }
  }
  return out + ";";
}

inline std::string to_newick(const Tree& t) {
  return std::visit([](const auto& x) { return to_newick(x); }, t);
}

}  // namespace agreetree
