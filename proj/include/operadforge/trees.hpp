#pragma once

// Dendroidal tree calculus: rooted trees with colour-labeled edges, planar
// structures, vertex markings and global leaf orders; grafting, elementary
// morphisms, canonical forms, the tree operad Omega(T), and composition of
// operad elements along a tree.
//
// Trees are stored in rooted normal form: every vertex records its output
// edge and its ordered input edges (the order IS the planar structure).
// The raw (E,V) presentation of a tree is accepted on input and can be
// reconstructed for output.

#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "operadforge/core.hpp"

namespace operadforge {

struct TreeVertex {
  int out_edge = -1;
  std::vector<int> in_edges;  // planar order
  auto operator<=>(const TreeVertex&) const = default;
};

struct Tree {
  int n_edges = 1;
  int root = 0;
  std::vector<TreeVertex> vertices;
  auto operator<=>(const Tree&) const = default;

  bool is_empty() const { return vertices.empty(); }

  int vertex_above(int e) const {
    for (size_t i = 0; i < vertices.size(); ++i)
      if (vertices[i].out_edge == e) return static_cast<int>(i);
    return -1;
  }
  int vertex_below(int e) const {
    for (size_t i = 0; i < vertices.size(); ++i)
      for (int x : vertices[i].in_edges)
        if (x == e) return static_cast<int>(i);
    return -1;
  }

  // Leaves in increasing edge order. The lone edge of the empty tree counts
  // as both root and leaf, matching the unit operation of signature (c;c).
  std::vector<int> leaves() const {
    if (is_empty()) return {root};
    std::vector<char> is_out(n_edges, 0);
    for (const auto& v : vertices) is_out[v.out_edge] = 1;
    std::vector<int> out;
    for (int e = 0; e < n_edges; ++e)
      if (!is_out[e]) out.push_back(e);
    return out;
  }

  bool is_inner_edge(int e) const { return vertex_above(e) >= 0 && vertex_below(e) >= 0; }

  std::optional<std::string> structural_error() const {
    if (n_edges <= 0) return "tree needs at least one edge";
    if (root < 0 || root >= n_edges) return "root out of range";
    std::vector<int> out_count(n_edges, 0), in_count(n_edges, 0);
    for (const auto& v : vertices) {
      if (v.out_edge < 0 || v.out_edge >= n_edges) return "vertex output out of range";
      out_count[v.out_edge]++;
      std::set<int> seen;
      for (int e : v.in_edges) {
        if (e < 0 || e >= n_edges) return "vertex input out of range";
        if (!seen.insert(e).second) return "repeated edge in vertex";
        if (e == v.out_edge) return "edge repeated as input and output of one vertex";
        in_count[e]++;
      }
    }
    for (int e = 0; e < n_edges; ++e) {
      if (out_count[e] > 1 || in_count[e] > 1) return "edge in more than two vertices";
      if (e == root) {
        if (in_count[e] != 0) return "root is an input";
        if (!is_empty() && out_count[e] != 1) return "root not attached to a vertex";
      } else {
        if (in_count[e] != 1) return "non-root edge must be the input of exactly one vertex";
      }
    }
    // acyclicity + connectivity: walking down from any vertex reaches root
    for (size_t i = 0; i < vertices.size(); ++i) {
      int e = vertices[i].out_edge;
      int steps = 0;
      while (e != root) {
        int w = vertex_below(e);
        if (w < 0) return "disconnected vertex";
        e = vertices[w].out_edge;
        if (++steps > n_edges) return "cycle";
      }
    }
    return std::nullopt;
  }
};

struct CTree {
  Tree tree;
  std::vector<Colour> labels;  // per edge

  Signature vertex_signature(int v) const {
    Signature s;
    s.output = labels[tree.vertices[v].out_edge];
    for (int e : tree.vertices[v].in_edges) s.inputs.push_back(labels[e]);
    return s;
  }
};

// Ordered marked tree: labeled + per-vertex mark + planar structure (the
// stored input orders) + a total order on the leaves. No compatibility is
// required between the planar structure and the leaf order.
struct OMTree {
  Tree tree;
  std::vector<Colour> labels;       // per edge
  std::vector<std::string> marks;   // per vertex
  std::vector<int> leaf_order;      // position -> leaf edge

  CTree ctree() const { return CTree{tree, labels}; }

  Signature arity() const {
    Signature s;
    s.output = labels[tree.root];
    for (int e : leaf_order) s.inputs.push_back(labels[e]);
    return s;
  }

  Signature vertex_signature(int v) const {
    Signature s;
    s.output = labels[tree.vertices[v].out_edge];
    for (int e : tree.vertices[v].in_edges) s.inputs.push_back(labels[e]);
    return s;
  }

  std::optional<std::string> validate() const {
    if (auto e = tree.structural_error()) return e;
    if (static_cast<int>(labels.size()) != tree.n_edges) return "label table size";
    if (marks.size() != tree.vertices.size()) return "mark table size";
    auto lv = tree.leaves();
    if (leaf_order.size() != lv.size()) return "leaf order size";
    std::set<int> s(leaf_order.begin(), leaf_order.end());
    if (s != std::set<int>(lv.begin(), lv.end())) return "leaf order is not a bijection on the leaves";
    return std::nullopt;
  }
};

// Planar-induced order on the leaves: depth-first traversal following the
// stored input orders.
inline std::vector<int> planar_leaf_positions(const Tree& t) {
  if (t.is_empty()) return {t.root};
  std::vector<int> out;
  std::function<void(int)> walk = [&](int e) {
    int v = t.vertex_above(e);
    if (v < 0) {
      out.push_back(e);
      return;
    }
    for (int c : t.vertices[v].in_edges) walk(c);
  };
  walk(t.root);
  return out;
}

inline OMTree empty_tree(const Colour& c) {
  OMTree t;
  t.tree = Tree{};
  t.labels = {c};
  t.leaf_order = {0};
  return t;
}

// Corolla with planar inputs labelled in order; leaf order = planar order.
inline OMTree corolla(const std::vector<Colour>& inputs, const Colour& output,
                      const std::string& mark = "x") {
  OMTree t;
  int n = static_cast<int>(inputs.size());
  t.tree.n_edges = n + 1;
  t.tree.root = n;
  TreeVertex v;
  v.out_edge = n;
  for (int i = 0; i < n; ++i) v.in_edges.push_back(i);
  t.tree.vertices.push_back(v);
  t.labels = inputs;
  t.labels.push_back(output);
  t.marks = {mark};
  for (int i = 0; i < n; ++i) t.leaf_order.push_back(i);
  return t;
}

// ---------------------------------------------------------------------------
// Grafting

// Glue the roots of `subs` onto the leaves of `base`: subs[i] lands on the
// leaf at position i of `order` (a position -> leaf-edge vector for base).
inline OMTree graft(const OMTree& base, const std::vector<int>& order,
                    const std::vector<OMTree>& subs) {
  auto lv = base.tree.leaves();
  if (order.size() != lv.size() || subs.size() != lv.size())
    throw Error("ArityMismatch", "grafting expects one subtree per leaf");
  for (size_t i = 0; i < subs.size(); ++i)
    if (subs[i].labels[subs[i].tree.root] != base.labels[order[i]])
      throw Error("LabelMismatch", "root label of subtree " + std::to_string(i) +
                                       " does not match leaf label");

  if (base.tree.is_empty()) return subs[0];

  OMTree out;
  out.tree.n_edges = base.tree.n_edges;
  out.tree.root = base.tree.root;
  out.tree.vertices = base.tree.vertices;
  out.labels = base.labels;
  out.marks = base.marks;

  std::vector<std::vector<int>> sub_edge_map(subs.size());
  for (size_t i = 0; i < subs.size(); ++i) {
    const OMTree& s = subs[i];
    sub_edge_map[i].assign(s.tree.n_edges, -1);
    for (int e = 0; e < s.tree.n_edges; ++e) {
      if (e == s.tree.root)
        sub_edge_map[i][e] = order[i];
      else {
        sub_edge_map[i][e] = out.tree.n_edges++;
        out.labels.push_back(s.labels[e]);
      }
    }
    for (size_t vi = 0; vi < s.tree.vertices.size(); ++vi) {
      TreeVertex v;
      v.out_edge = sub_edge_map[i][s.tree.vertices[vi].out_edge];
      for (int e : s.tree.vertices[vi].in_edges) v.in_edges.push_back(sub_edge_map[i][e]);
      out.tree.vertices.push_back(v);
      out.marks.push_back(s.marks[vi]);
    }
  }
  // concatenated leaf orders
  for (size_t i = 0; i < subs.size(); ++i)
    for (int e : subs[i].leaf_order) out.leaf_order.push_back(sub_edge_map[i][e]);
  return out;
}

// ---------------------------------------------------------------------------
// Canonical forms

struct CanonicalOptions {
  // vertices where the planar structure is data; at non-rigid vertices the
  // input order is quotiented out (the decoration transported by `act`)
  std::function<bool(int)> rigid = [](int) { return true; };
  std::function<OpId(int, const Perm&, const OpId&)> act;  // decoration transport
};

struct CanonicalResult {
  std::string form;
  std::vector<int> edge_map;    // original edge -> canonical edge
  std::vector<int> vertex_map;  // original vertex -> canonical vertex
  OMTree canon;
  std::vector<OpId> canon_decoration;
};

namespace detail {

struct CanonWork {
  const OMTree* t;
  const std::vector<OpId>* dec;
  const CanonicalOptions* opt;
  std::vector<int> leaf_pos;  // edge -> position in leaf order (-1 otherwise)
  std::vector<Perm> choice;   // per vertex: chosen reorder of in_edges
};

inline void canon_serialize(CanonWork& w, int edge, std::string& out, std::vector<int>& edge_seq,
                            std::vector<int>& vertex_seq) {
  const Tree& tr = w.t->tree;
  edge_seq.push_back(edge);
  out += w.t->labels[edge].id;
  int v = tr.vertex_above(edge);
  if (v < 0) {
    out += "#";
    out += std::to_string(w.leaf_pos[edge]);
    out += ";";
    return;
  }
  vertex_seq.push_back(v);
  out += "(";
  out += w.t->marks[v];
  if (w.dec) {
    out += "=";
    const Perm& p = w.choice[v];
    OpId d = (*w.dec)[v];
    if (!perm_is_identity(p) && w.opt->act) d = w.opt->act(v, p, d);
    out += d;
  }
  out += ":";
  const auto& ins = tr.vertices[v].in_edges;
  for (int i = 0; i < static_cast<int>(ins.size()); ++i)
    canon_serialize(w, ins[w.choice[v][i]], out, edge_seq, vertex_seq);
  out += ")";
}

}  // namespace detail

// Lexicographically minimal serialization over the admissible relabelings:
// edge ids are erased (replaced by traversal indices) and non-rigid vertices
// range over all input reorderings. The returned edge map witnesses the
// isomorphism onto the canonical representative.
inline CanonicalResult canonicalize(const OMTree& t, const std::vector<OpId>* decoration = nullptr,
                                    CanonicalOptions opt = {}) {
  detail::CanonWork w;
  w.t = &t;
  w.dec = decoration;
  w.opt = &opt;
  w.leaf_pos.assign(t.tree.n_edges, -1);
  for (size_t i = 0; i < t.leaf_order.size(); ++i) w.leaf_pos[t.leaf_order[i]] = static_cast<int>(i);
  const size_t nv = t.tree.vertices.size();

  std::vector<std::vector<Perm>> options(nv);
  for (size_t v = 0; v < nv; ++v) {
    int k = static_cast<int>(t.tree.vertices[v].in_edges.size());
    if (opt.rigid(static_cast<int>(v)))
      options[v] = {perm_identity(k)};
    else
      options[v] = all_perms(k);
  }

  std::string best;
  std::vector<int> best_edges, best_vertices;
  std::vector<Perm> best_choice;
  w.choice.assign(nv, {});

  std::function<void(size_t)> rec = [&](size_t v) {
    if (v == nv) {
      std::string s;
      std::vector<int> eseq, vseq;
      detail::canon_serialize(w, t.tree.root, s, eseq, vseq);
      if (best.empty() || s < best) {
        best = s;
        best_edges = eseq;
        best_vertices = vseq;
        best_choice = w.choice;
      }
      return;
    }
    for (const auto& p : options[v]) {
      w.choice[v] = p;
      rec(v + 1);
    }
  };
  rec(0);

  CanonicalResult r;
  r.form = best;
  r.edge_map.assign(t.tree.n_edges, -1);
  for (size_t i = 0; i < best_edges.size(); ++i) r.edge_map[best_edges[i]] = static_cast<int>(i);
  r.vertex_map.assign(nv, -1);
  for (size_t i = 0; i < best_vertices.size(); ++i) r.vertex_map[best_vertices[i]] = static_cast<int>(i);

  // rebuild the canonical representative
  r.canon.tree.n_edges = t.tree.n_edges;
  r.canon.tree.root = r.edge_map[t.tree.root];
  r.canon.labels.assign(t.tree.n_edges, Colour{});
  for (int e = 0; e < t.tree.n_edges; ++e) r.canon.labels[r.edge_map[e]] = t.labels[e];
  r.canon.tree.vertices.assign(nv, {});
  r.canon.marks.assign(nv, "");
  if (decoration) r.canon_decoration.assign(nv, "");
  for (size_t v = 0; v < nv; ++v) {
    TreeVertex nv2;
    nv2.out_edge = r.edge_map[t.tree.vertices[v].out_edge];
    const Perm& p = best_choice[v];
    for (size_t i = 0; i < t.tree.vertices[v].in_edges.size(); ++i)
      nv2.in_edges.push_back(r.edge_map[t.tree.vertices[v].in_edges[p[i]]]);
    r.canon.tree.vertices[r.vertex_map[v]] = nv2;
    r.canon.marks[r.vertex_map[v]] = t.marks[v];
    if (decoration) {
      OpId d = (*decoration)[v];
      if (!perm_is_identity(p) && opt.act) d = opt.act(static_cast<int>(v), p, d);
      r.canon_decoration[r.vertex_map[v]] = d;
    }
  }
  r.canon.leaf_order.resize(t.leaf_order.size());
  for (size_t i = 0; i < t.leaf_order.size(); ++i) r.canon.leaf_order[i] = r.edge_map[t.leaf_order[i]];
  return r;
}

// ---------------------------------------------------------------------------
// Elementary morphisms

struct GenStep {
  enum class Kind { inner_face, outer_face_vertex, outer_face_corolla, degeneracy, isomorphism };
  Kind kind;
  int edge = -1;    // inner_face / outer_face_corolla: edge in the step target
  int vertex = -1;  // outer_face_vertex (in target), degeneracy (in source)
  std::vector<int> edge_map;  // step source edge -> step target edge
};

struct TreeMorphism {
  CTree source;
  CTree target;
  std::vector<int> edge_map;
  std::vector<GenStep> word;  // degeneracies, then one isomorphism, then faces
};

// T/e for an inner edge e, with the inclusion T/e -> T.
inline std::pair<CTree, TreeMorphism> inner_face(const CTree& t, int e) {
  if (!t.tree.is_inner_edge(e)) throw Error("NotInner", "edge is not inner");
  int below = t.tree.vertex_below(e);
  int above = t.tree.vertex_above(e);
  CTree s;
  std::vector<int> emap(t.tree.n_edges, -1);  // new -> old is implicit; this is old -> new
  int k = 0;
  for (int x = 0; x < t.tree.n_edges; ++x)
    if (x != e) emap[x] = k++;
  s.tree.n_edges = t.tree.n_edges - 1;
  s.tree.root = emap[t.tree.root];
  s.labels.resize(s.tree.n_edges);
  for (int x = 0; x < t.tree.n_edges; ++x)
    if (x != e) s.labels[emap[x]] = t.labels[x];
  for (int v = 0; v < static_cast<int>(t.tree.vertices.size()); ++v) {
    if (v == above) continue;
    TreeVertex nv;
    if (v == below) {
      nv.out_edge = emap[t.tree.vertices[v].out_edge];
      for (int x : t.tree.vertices[v].in_edges) {
        if (x == e) {
          for (int y : t.tree.vertices[above].in_edges) nv.in_edges.push_back(emap[y]);
        } else {
          nv.in_edges.push_back(emap[x]);
        }
      }
    } else {
      nv.out_edge = emap[t.tree.vertices[v].out_edge];
      for (int x : t.tree.vertices[v].in_edges) nv.in_edges.push_back(emap[x]);
    }
    s.tree.vertices.push_back(nv);
  }
  TreeMorphism m;
  m.source = s;
  m.target = t;
  m.edge_map.assign(s.tree.n_edges, -1);
  for (int x = 0; x < t.tree.n_edges; ++x)
    if (x != e) m.edge_map[emap[x]] = x;
  GenStep st;
  st.kind = GenStep::Kind::inner_face;
  st.edge = e;
  st.edge_map = m.edge_map;
  m.word = {st};
  return {s, m};
}

// T/v for a vertex with exactly one inner edge, with the inclusion T/v -> T.
inline std::pair<CTree, TreeMorphism> outer_face(const CTree& t, int v) {
  const auto& vert = t.tree.vertices[v];
  std::vector<int> vedges = vert.in_edges;
  vedges.push_back(vert.out_edge);
  std::vector<int> inner;
  for (int e : vedges)
    if (t.tree.is_inner_edge(e)) inner.push_back(e);
  if (inner.size() != 1) throw Error("NotPrunable", "vertex does not have exactly one inner edge");
  int keep = inner.front();
  CTree s;
  std::vector<int> emap(t.tree.n_edges, -1);
  int k = 0;
  std::set<int> drop(vedges.begin(), vedges.end());
  drop.erase(keep);
  for (int x = 0; x < t.tree.n_edges; ++x)
    if (!drop.count(x)) emap[x] = k++;
  s.tree.n_edges = k;
  bool root_in_v = drop.count(t.tree.root) || keep == t.tree.root;
  s.tree.root = (std::find(vedges.begin(), vedges.end(), t.tree.root) != vedges.end())
                    ? emap[keep]
                    : emap[t.tree.root];
  (void)root_in_v;
  s.labels.resize(s.tree.n_edges);
  for (int x = 0; x < t.tree.n_edges; ++x)
    if (emap[x] >= 0) s.labels[emap[x]] = t.labels[x];
  for (int w = 0; w < static_cast<int>(t.tree.vertices.size()); ++w) {
    if (w == v) continue;
    TreeVertex nv;
    nv.out_edge = emap[t.tree.vertices[w].out_edge];
    for (int x : t.tree.vertices[w].in_edges) nv.in_edges.push_back(emap[x]);
    s.tree.vertices.push_back(nv);
  }
  TreeMorphism m;
  m.source = s;
  m.target = t;
  m.edge_map.assign(s.tree.n_edges, -1);
  for (int x = 0; x < t.tree.n_edges; ++x)
    if (emap[x] >= 0) m.edge_map[emap[x]] = x;
  GenStep st;
  st.kind = GenStep::Kind::outer_face_vertex;
  st.vertex = v;
  st.edge_map = m.edge_map;
  m.word = {st};
  return {s, m};
}

// The outer face | -> T for a corolla T, hitting edge e.
inline TreeMorphism outer_face_corolla(const CTree& t, int e) {
  if (t.tree.vertices.size() != 1) throw Error("NotPrunable", "corolla outer face needs a corolla");
  CTree s;
  s.tree = Tree{};
  s.labels = {t.labels[e]};
  TreeMorphism m;
  m.source = s;
  m.target = t;
  m.edge_map = {e};
  GenStep st;
  st.kind = GenStep::Kind::outer_face_corolla;
  st.edge = e;
  st.edge_map = {e};
  m.word = {st};
  return m;
}

// T.v for a vertex with exactly two edges, with the projection T -> T.v.
inline std::pair<CTree, TreeMorphism> degeneracy(const CTree& t, int v) {
  const auto& vert = t.tree.vertices[v];
  if (vert.in_edges.size() != 1) throw Error("NotUnary", "degeneracy needs a two-edge vertex");
  int d = vert.in_edges[0];
  int e = vert.out_edge;
  if (t.labels[d] != t.labels[e]) throw Error("LabelMismatch", "degeneracy merges differently labeled edges");
  CTree s;
  std::vector<int> emap(t.tree.n_edges, -1);
  int k = 0;
  for (int x = 0; x < t.tree.n_edges; ++x) {
    if (x == d) continue;  // d is identified with e
    emap[x] = k++;
  }
  emap[d] = emap[e];
  s.tree.n_edges = t.tree.n_edges - 1;
  s.tree.root = emap[t.tree.root];
  s.labels.resize(s.tree.n_edges);
  for (int x = 0; x < t.tree.n_edges; ++x) s.labels[emap[x]] = t.labels[x];
  for (int w = 0; w < static_cast<int>(t.tree.vertices.size()); ++w) {
    if (w == v) continue;
    TreeVertex nv;
    nv.out_edge = emap[t.tree.vertices[w].out_edge];
    for (int x : t.tree.vertices[w].in_edges) nv.in_edges.push_back(emap[x]);
    s.tree.vertices.push_back(nv);
  }
  TreeMorphism m;
  m.source = t;
  m.target = s;
  m.edge_map = emap;
  GenStep st;
  st.kind = GenStep::Kind::degeneracy;
  st.vertex = v;
  st.edge_map = emap;
  m.word = {st};
  return {s, m};
}

// ---------------------------------------------------------------------------
// Subtrees

struct Subtree {
  std::vector<int> vertices;  // sorted; empty for the edge subtree
  int root_edge;
  std::vector<int> edges;  // sorted
  std::vector<int> leaf_set;  // sorted; for the empty subtree this is {root_edge}
};

inline std::vector<Subtree> all_subtrees(const Tree& t) {
  std::vector<Subtree> out;
  for (int e = 0; e < t.n_edges; ++e) {
    Subtree s;
    s.root_edge = e;
    s.edges = {e};
    s.leaf_set = {e};
    out.push_back(std::move(s));
  }
  // connected vertex subsets: grow from each vertex upward/downward
  int nv = static_cast<int>(t.vertices.size());
  for (int mask = 1; mask < (1 << nv); ++mask) {
    std::vector<int> vs;
    for (int v = 0; v < nv; ++v)
      if (mask & (1 << v)) vs.push_back(v);
    // connectivity: each vertex except the top one must hang off another
    // chosen vertex through its output edge
    int top = -1;
    bool ok = true;
    for (int v : vs) {
      int below = t.vertex_below(t.vertices[v].out_edge);
      bool attached = below >= 0 && (mask & (1 << below));
      if (!attached) {
        if (top >= 0) {
          ok = false;
          break;
        }
        top = v;
      }
    }
    if (!ok || top < 0) continue;
    Subtree s;
    s.vertices = vs;
    s.root_edge = t.vertices[top].out_edge;
    std::set<int> edges, outs;
    for (int v : vs) {
      edges.insert(t.vertices[v].out_edge);
      outs.insert(t.vertices[v].out_edge);
      for (int e : t.vertices[v].in_edges) edges.insert(e);
    }
    s.edges.assign(edges.begin(), edges.end());
    for (int e : s.edges)
      if (!outs.count(e)) s.leaf_set.push_back(e);
    out.push_back(std::move(s));
  }
  return out;
}

// ---------------------------------------------------------------------------
// The tree operad Omega(T)

// Operations correspond to pairs (subtree, leaf order); since the leaf order
// is forced by the signature (colours are the edges of T, all distinct),
// every component has at most one element, named "o". Tables are built
// directly from the subtree lattice.
inline FinOperad tree_operad(const CTree& t, int bound = 4,
                             const std::vector<std::string>& edge_names = {}) {
  auto ename = [&](int e) {
    return edge_names.empty() ? Colour{"e" + std::to_string(e)} : Colour{edge_names[e]};
  };
  FinOperad o;
  o.variant = Variant::symmetric;
  o.max_valence = bound;
  for (int e = 0; e < t.tree.n_edges; ++e) o.colours.push_back(ename(e));
  std::sort(o.colours.begin(), o.colours.end());

  auto subs = all_subtrees(t.tree);
  std::map<std::pair<int, std::vector<int>>, int> by_shape;  // (root, sorted leaves) -> index
  for (size_t i = 0; i < subs.size(); ++i)
    by_shape[{subs[i].root_edge, subs[i].leaf_set}] = static_cast<int>(i);

  struct Op {
    int sub;
    std::vector<int> order;  // position -> leaf edge
  };
  std::vector<Op> ops;
  auto sig_of = [&](const Op& op) {
    Signature s;
    s.output = ename(subs[op.sub].root_edge);
    for (int e : op.order) s.inputs.push_back(ename(e));
    return s;
  };
  std::map<Signature, Op> op_at;
  for (size_t i = 0; i < subs.size(); ++i) {
    if (static_cast<int>(subs[i].leaf_set.size()) > bound) continue;
    std::vector<int> order = subs[i].leaf_set;
    std::sort(order.begin(), order.end());
    do {
      Op op{static_cast<int>(i), order};
      Signature s = sig_of(op);
      o.components[s] = {"o"};
      op_at[s] = op;
      ops.push_back(op);
    } while (std::next_permutation(order.begin(), order.end()));
  }
  for (const auto& c : o.colours) o.units[c] = "o";

  for (const auto& [s, op] : op_at) {
    // symmetry: re-seat the order
    for (const auto& sigma : all_perms(s.valence()))
      o.symmetry_table[SymKey{s, sigma, "o"}] = "o";
    // composition: plug a subtree rooted at each leaf slot
    std::vector<std::vector<Signature>> slot_sigs(op.order.size());
    for (size_t i = 0; i < op.order.size(); ++i) {
      for (const auto& [s2, op2] : op_at)
        if (subs[op2.sub].root_edge == op.order[i]) slot_sigs[i].push_back(s2);
    }
    std::vector<Signature> pick(op.order.size());
    std::function<void(size_t, int)> rec = [&](size_t i, int total) {
      if (total > bound) return;
      if (i == op.order.size()) {
        std::set<int> leaves;
        std::vector<int> order2;
        std::set<int> vs(subs[op.sub].vertices.begin(), subs[op.sub].vertices.end());
        for (const auto& ts : pick) {
          const Op& inner = op_at.at(ts);
          for (int v : subs[inner.sub].vertices) vs.insert(v);
          for (int e : inner.order) order2.push_back(e);
          for (int e : subs[inner.sub].leaf_set) leaves.insert(e);
        }
        std::vector<int> sorted_leaves(leaves.begin(), leaves.end());
        auto it = by_shape.find({subs[op.sub].root_edge, sorted_leaves});
        if (it == by_shape.end()) return;  // cannot happen for valid grafts
        std::vector<OpId> inner_ops(pick.size(), "o");
        o.compose_table[ComposeKey{s, "o", pick, inner_ops}] = "o";
        return;
      }
      for (const auto& ts : slot_sigs[i]) {
        pick[i] = ts;
        rec(i + 1, total + ts.valence());
      }
    };
    rec(0, 0);
  }
  return o;
}

// ---------------------------------------------------------------------------
// Planar invariants and composition along a tree

// Pullback planar order at a source vertex: the order its inputs inherit
// from the target planar structure through the image subtree.
inline std::vector<int> pullback_vertex_positions(const TreeMorphism& f, int v) {
  const auto& sv = f.source.tree.vertices[v];
  int img_root = f.edge_map[sv.out_edge];
  if (sv.in_edges.size() == 1 && f.edge_map[sv.in_edges[0]] == img_root)
    return {sv.in_edges[0]};  // collapsed to a unit
  // image subtree: hull between img_root and the images of the inputs
  std::set<int> img_leaves;
  for (int e : sv.in_edges) img_leaves.insert(f.edge_map[e]);
  // planar traversal of the target restricted to the hull
  std::vector<int> seq;
  std::function<void(int)> walk = [&](int e) {
    if (img_leaves.count(e)) {
      seq.push_back(e);
      return;
    }
    int w = f.target.tree.vertex_above(e);
    if (w < 0) return;  // outside the hull; cannot happen for valid morphisms
    for (int c : f.target.tree.vertices[w].in_edges) walk(c);
  };
  walk(img_root);
  std::vector<int> out;
  for (int ie : seq)
    for (int e : sv.in_edges)
      if (f.edge_map[e] == ie) out.push_back(e);
  return out;
}

struct PlanarInvariants {
  std::vector<Perm> sigma;  // per source vertex: the planar change
  Perm leaf_perm;           // pi_f on the arities
};

// sigma_f and pi_f of a morphism between ordered trees. The leaf orders are
// supplied as position vectors for source and target.
inline PlanarInvariants planar_invariants(const TreeMorphism& f, const std::vector<int>& src_leaf_order,
                                          const std::vector<int>& tgt_leaf_order) {
  PlanarInvariants inv;
  for (int v = 0; v < static_cast<int>(f.source.tree.vertices.size()); ++v) {
    auto pulled = pullback_vertex_positions(f, v);
    inv.sigma.push_back(reseat_perm(f.source.tree.vertices[v].in_edges, pulled));
  }
  // pi_f: planar change of the induced map on arities
  std::vector<int> pulled_ar;
  for (int e : tgt_leaf_order) {
    for (int s : src_leaf_order)
      if (f.edge_map[s] == e) pulled_ar.push_back(s);
  }
  if (pulled_ar.size() == src_leaf_order.size())
    inv.leaf_perm = reseat_perm(src_leaf_order, pulled_ar);
  return inv;
}

// The twisting of (t, lambda, tau): the planar change of the identity map
// from the arity with the planar-induced order to the arity with tau.
inline Perm twisting(const OMTree& t) {
  return reseat_perm(planar_leaf_positions(t.tree), t.leaf_order);
}

struct TreeComposite {
  Signature signature;
  OpId op;
};

// Composition along t: decorate every vertex with an operation of its planar
// arity, compose following the shape, then re-seat from the planar-induced
// leaf order to the tree's own leaf order.
inline TreeComposite compose_along_tree(const FinOperad& o, const OMTree& t,
                                        const std::vector<OpId>& decoration) {
  if (decoration.size() != t.tree.vertices.size())
    throw Error("DecorationMismatch", "one operation per vertex required");

  struct Part {
    Signature sig;
    OpId op;
    std::vector<int> seat;  // position -> leaf edge
  };
  std::function<Part(int)> walk = [&](int edge) -> Part {
    int v = t.tree.vertex_above(edge);
    if (v < 0) {
      Part p;
      p.sig = Signature{{t.labels[edge]}, t.labels[edge]};
      p.op = o.unit(t.labels[edge]);
      p.seat = {edge};
      return p;
    }
    Signature vs = t.vertex_signature(v);
    if (!o.has_op(vs, decoration[v]))
      throw Error("DecorationMismatch",
                  "decoration at vertex " + std::to_string(v) + " is not in O(" + vs.key() + ")");
    std::vector<Signature> ts;
    std::vector<OpId> ops;
    Part p;
    for (int c : t.tree.vertices[v].in_edges) {
      Part q = walk(c);
      ts.push_back(q.sig);
      ops.push_back(q.op);
      for (int x : q.seat) p.seat.push_back(x);
    }
    p.sig = compose_signatures(vs, ts);
    p.op = o.compose(vs, ts, decoration[v], ops);
    return p;
  };

  if (t.tree.is_empty()) {
    TreeComposite r;
    r.signature = Signature{{t.labels[t.tree.root]}, t.labels[t.tree.root]};
    r.op = o.unit(t.labels[t.tree.root]);
    return r;
  }
  Part p = walk(t.tree.root);
  Perm tw = reseat_perm(p.seat, t.leaf_order);
  TreeComposite r;
  r.signature = p.sig.permuted(tw);
  if (perm_is_identity(tw)) {
    r.op = p.op;
  } else {
    if (o.variant == Variant::nonsymmetric)
      throw Error("DecorationMismatch", "nonsymmetric composition requires the planar leaf order");
    r.op = o.sym(p.sig, tw, p.op);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Tree enumeration

struct EnumTreeOptions {
  int max_arity = 3;
  bool reduced = false;  // forbid valence-0 vertices
};

namespace detail {

// All labeled planar marked trees with root label c, exactly n leaves and at
// most `budget` vertices.
inline std::vector<OMTree> gen_shapes(const std::vector<Colour>& colours,
                                      const std::vector<std::string>& marks, const Colour& c, int n,
                                      int budget, const EnumTreeOptions& o) {
  std::vector<OMTree> out;
  if (n == 1) out.push_back(empty_tree(c));
  if (budget == 0) return out;
  for (int k = 0; k <= o.max_arity; ++k) {
    if (o.reduced && k == 0) continue;
    // split n leaves into k ordered parts (0 allowed unless reduced)
    std::vector<int> parts(k, 0);
    std::function<void(int, int)> split = [&](int i, int left) {
      if (i == k) {
        if (left != 0) return;
        // choose labels and subtrees per part
        std::vector<std::vector<OMTree>> cand(k);
        std::function<void(int, int, std::vector<OMTree>&)> pick = [&](int j, int vleft,
                                                                       std::vector<OMTree>& acc) {
          if (j == k) {
            std::vector<Colour> ins;
            for (const auto& s : acc) ins.push_back(s.labels[s.tree.root]);
            for (const auto& mk : marks) {
              OMTree base = corolla(ins, c, mk);
              std::vector<int> order = base.tree.leaves();
              out.push_back(graft(base, order, acc));
            }
            return;
          }
          int min_v = (o.reduced && parts[j] == 0) ? 1 : (parts[j] == 0 ? 1 : 0);
          for (const auto& d : colours) {
            auto subs = gen_shapes(colours, marks, d, parts[j], vleft - (k - 1 - j) * 0, o);
            for (const auto& s : subs) {
              int used = static_cast<int>(s.tree.vertices.size());
              if (used > vleft) continue;
              if (parts[j] == 0 && used == 0) continue;  // a 0-leaf subtree needs a vertex
              (void)min_v;
              acc.push_back(s);
              pick(j + 1, vleft - used, acc);
              acc.pop_back();
            }
          }
        };
        std::vector<OMTree> acc;
        pick(0, budget - 1, acc);
        return;
      }
      for (int take = 0; take <= left; ++take) {
        parts[i] = take;
        split(i + 1, left - take);
      }
    };
    split(0, n);
  }
  return out;
}

}  // namespace detail

// Exactly one representative per canonical form with the requested arity,
// labels, marks and vertex bound. Deterministic order (sorted by canonical
// form).
inline std::vector<OMTree> enumerate_trees(const std::vector<Colour>& colours, const Signature& s,
                                           const std::vector<std::string>& marks, int max_vertices,
                                           EnumTreeOptions opt = {}) {
  std::map<std::string, OMTree> seen;
  auto shapes = detail::gen_shapes(colours, marks, s.output, s.valence(), max_vertices, opt);
  for (auto& sh : shapes) {
    auto lv = sh.tree.leaves();
    // all assignments of leaves to positions matching the input colours
    std::vector<int> order(s.valence(), -1);
    std::vector<char> used(sh.tree.n_edges, 0);
    std::function<void(int)> assign = [&](int i) {
      if (i == s.valence()) {
        OMTree t = sh;
        t.leaf_order = order;
        auto c = canonicalize(t);
        if (!seen.count(c.form)) seen[c.form] = c.canon;
        return;
      }
      for (int e : lv) {
        if (used[e] || !(sh.labels[e] == s.inputs[i])) continue;
        used[e] = 1;
        order[i] = e;
        assign(i + 1);
        used[e] = 0;
      }
    };
    if (static_cast<int>(lv.size()) == s.valence()) assign(0);
  }
  std::vector<OMTree> out;
  for (auto& [form, t] : seen) out.push_back(std::move(t));
  return out;
}

// The component of the operad-for-operads at (inputs; output): canonical
// C-trees with one vertex per input slot (slots recorded as marks) whose
// vertex arities realize the input signatures.
inline std::vector<OMTree> operad_of_operads_component(const std::vector<Colour>& colours,
                                                       const std::vector<Signature>& inputs,
                                                       const Signature& output,
                                                       EnumTreeOptions opt = {}) {
  std::vector<std::string> marks;
  for (size_t i = 0; i < inputs.size(); ++i) marks.push_back(std::to_string(i));
  if (marks.empty()) marks.push_back("none");
  int maxval = 0;
  for (const auto& s : inputs) maxval = std::max(maxval, s.valence());
  opt.max_arity = std::max(opt.max_arity, maxval);
  auto trees = enumerate_trees(colours, output, marks, static_cast<int>(inputs.size()), opt);
  std::vector<OMTree> out;
  for (const auto& t : trees) {
    if (t.tree.vertices.size() != inputs.size()) continue;
    bool ok = true;
    std::vector<char> used(inputs.size(), 0);
    for (size_t v = 0; v < t.tree.vertices.size() && ok; ++v) {
      int slot = std::stoi(t.marks[v]);
      if (slot < 0 || slot >= static_cast<int>(inputs.size()) || used[slot]) {
        ok = false;
        break;
      }
      used[slot] = 1;
      if (!(t.vertex_signature(static_cast<int>(v)) == inputs[slot])) ok = false;
    }
    if (ok) out.push_back(t);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Morphism enumeration Omega(T) -> Omega(T')

namespace detail {

// hull of (root_edge, leaf set) in t; nullopt when no subtree has exactly
// this boundary
inline std::optional<Subtree> subtree_with(const Tree& t, int root_edge, const std::vector<int>& leaves) {
  std::vector<int> sorted = leaves;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  if (sorted.size() != leaves.size()) return std::nullopt;
  if (sorted.size() == 1 && sorted[0] == root_edge) {
    Subtree s;
    s.root_edge = root_edge;
    s.edges = {root_edge};
    s.leaf_set = {root_edge};
    return s;
  }
  std::set<int> vs;
  if (sorted.empty()) {
    // zero-leaf subtree: forced to contain everything above the root edge
    std::deque<int> q;
    if (int v = t.vertex_above(root_edge); v >= 0) q.push_back(v);
    while (!q.empty()) {
      int v = q.front();
      q.pop_front();
      vs.insert(v);
      for (int e : t.vertices[v].in_edges)
        if (int w = t.vertex_above(e); w >= 0) q.push_back(w);
    }
  }
  for (int l : sorted) {
    int e = l;
    int guard = 0;
    while (e != root_edge) {
      int w = t.vertex_below(e);
      if (w < 0) return std::nullopt;
      vs.insert(w);
      e = t.vertices[w].out_edge;
      if (++guard > t.n_edges) return std::nullopt;
    }
  }
  if (vs.empty()) return std::nullopt;
  Subtree s;
  s.vertices.assign(vs.begin(), vs.end());
  s.root_edge = root_edge;
  std::set<int> edges, outs;
  for (int v : s.vertices) {
    outs.insert(t.vertices[v].out_edge);
    edges.insert(t.vertices[v].out_edge);
    for (int e : t.vertices[v].in_edges) edges.insert(e);
  }
  if (!edges.count(root_edge)) return std::nullopt;
  s.edges.assign(edges.begin(), edges.end());
  for (int e : s.edges)
    if (!outs.count(e)) s.leaf_set.push_back(e);
  if (s.leaf_set != sorted) return std::nullopt;
  return s;
}

}  // namespace detail

// Factor an edge map as degeneracies, an isomorphism and face maps
// (f = sigma theta partial) and return the step list.
std::vector<GenStep> factor_tree_morphism(const CTree& src, const CTree& tgt,
                                          const std::vector<int>& edge_map);

// All operad morphisms Omega(T) -> Omega(T') respecting the labelings,
// presented by their edge maps with a generator-word factorization.
inline std::vector<TreeMorphism> enumerate_tree_morphisms(const CTree& src, const CTree& tgt,
                                                          int max_vertices = 6) {
  if (static_cast<int>(src.tree.vertices.size()) > max_vertices ||
      static_cast<int>(tgt.tree.vertices.size()) > max_vertices)
    throw Error("BoundExceeded", "tree morphism enumeration bound");
  std::vector<TreeMorphism> out;
  std::vector<int> emap(src.tree.n_edges, -1);

  // order the vertices top-down from the root so each out-edge image is
  // known before its vertex is processed
  std::vector<int> vorder;
  if (!src.tree.is_empty()) {
    std::deque<int> q{src.tree.vertex_above(src.tree.root)};
    while (!q.empty()) {
      int v = q.front();
      q.pop_front();
      vorder.push_back(v);
      for (int e : src.tree.vertices[v].in_edges) {
        int w = src.tree.vertex_above(e);
        if (w >= 0) q.push_back(w);
      }
    }
  }

  std::function<void(size_t)> place = [&](size_t i) {
    if (i == vorder.size()) {
      TreeMorphism m;
      m.source = src;
      m.target = tgt;
      m.edge_map = emap;
      m.word = factor_tree_morphism(src, tgt, emap);
      out.push_back(std::move(m));
      return;
    }
    int v = vorder[i];
    const auto& vert = src.tree.vertices[v];
    int b = emap[vert.out_edge];
    // unit image (vertex collapses)
    if (vert.in_edges.size() == 1 && src.labels[vert.in_edges[0]] == tgt.labels[b]) {
      emap[vert.in_edges[0]] = b;
      place(i + 1);
      emap[vert.in_edges[0]] = -1;
    }
    // subtree images: all subtrees of tgt rooted at b with |in| leaves
    for (const auto& s : all_subtrees(tgt.tree)) {
      if (s.root_edge != b) continue;
      if (s.vertices.empty()) continue;  // the unit case is handled above
      if (s.leaf_set.size() != vert.in_edges.size()) continue;
      // all label-respecting bijections in -> leaf_set
      std::vector<char> used(s.leaf_set.size(), 0);
      std::function<void(size_t)> match = [&](size_t j) {
        if (j == vert.in_edges.size()) {
          place(i + 1);
          return;
        }
        for (size_t l = 0; l < s.leaf_set.size(); ++l) {
          if (used[l]) continue;
          if (!(src.labels[vert.in_edges[j]] == tgt.labels[s.leaf_set[l]])) continue;
          used[l] = 1;
          emap[vert.in_edges[j]] = s.leaf_set[l];
          match(j + 1);
          emap[vert.in_edges[j]] = -1;
          used[l] = 0;
        }
      };
      match(0);
    }
  };

  for (int e = 0; e < tgt.tree.n_edges; ++e) {
    if (!(src.labels[src.tree.root] == tgt.labels[e])) continue;
    emap[src.tree.root] = e;
    place(0);
    emap[src.tree.root] = -1;
  }
  return out;
}

inline std::vector<int> compose_edge_maps(const std::vector<int>& second, const std::vector<int>& first) {
  std::vector<int> out(first.size());
  for (size_t i = 0; i < first.size(); ++i) out[i] = second[first[i]];
  return out;
}

inline std::vector<GenStep> factor_tree_morphism(const CTree& src, const CTree& tgt,
                                                 const std::vector<int>& edge_map) {
  std::vector<GenStep> word;
  // 1. degeneracies: remove unary vertices collapsed by the map
  CTree cur = src;
  std::vector<int> g = edge_map;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int v = 0; v < static_cast<int>(cur.tree.vertices.size()); ++v) {
      const auto& vert = cur.tree.vertices[v];
      if (vert.in_edges.size() == 1 && g[vert.in_edges[0]] == g[vert.out_edge]) {
        auto [next, step] = degeneracy(cur, v);
        word.push_back(step.word.front());
        // transport g along the degeneracy's edge map: new tree edge x came
        // from any old edge with emap = x; all collapsed edges agree on g
        std::vector<int> g2(next.tree.n_edges, -1);
        for (int x = 0; x < cur.tree.n_edges; ++x) g2[step.edge_map[x]] = g[x];
        cur = next;
        g = g2;
        changed = true;
        break;
      }
    }
  }

  // 2. target-side chain: prune everything outside the image hull, then
  // contract the inner edges that are not hit
  std::set<int> hit;
  for (int x : g) hit.insert(x);
  int img_root = g[cur.tree.root];

  // the image subtree is the union of the per-vertex image hulls
  std::set<int> hull_vs;
  for (int v = 0; v < static_cast<int>(cur.tree.vertices.size()); ++v) {
    std::vector<int> img_in;
    for (int e : cur.tree.vertices[v].in_edges) img_in.push_back(g[e]);
    auto h = detail::subtree_with(tgt.tree, g[cur.tree.vertices[v].out_edge], img_in);
    if (!h) throw Error("InternalError", "edge map is not a tree morphism");
    for (int w : h->vertices) hull_vs.insert(w);
  }
  std::set<int> hull_edges;
  hull_edges.insert(img_root);
  for (int w : hull_vs) {
    hull_edges.insert(tgt.tree.vertices[w].out_edge);
    for (int e : tgt.tree.vertices[w].in_edges) hull_edges.insert(e);
  }

  struct Stage {
    CTree tree;
    std::vector<int> to_target;  // edge -> original target edge
  };
  Stage st;
  st.tree = tgt;
  st.to_target.resize(tgt.tree.n_edges);
  for (int i = 0; i < tgt.tree.n_edges; ++i) st.to_target[i] = i;

  std::vector<GenStep> faces;  // collected from target downward; reversed later

  // prune: repeatedly strip vertices outside the hull via outer faces,
  // never dropping a hull edge
  while (true) {
    bool did = false;
    for (int v = 0; v < static_cast<int>(st.tree.tree.vertices.size()); ++v) {
      int orig_out = st.to_target[st.tree.tree.vertices[v].out_edge];
      int orig_v = tgt.tree.vertex_above(orig_out);
      if (orig_v >= 0 && hull_vs.count(orig_v)) continue;
      try {
        auto [next, step] = outer_face(st.tree, v);
        GenStep gs = step.word.front();
        std::set<int> kept;
        for (int x = 0; x < next.tree.n_edges; ++x) kept.insert(st.to_target[gs.edge_map[x]]);
        bool drops_hull = false;
        for (int he : hull_edges)
          if (!kept.count(he)) drops_hull = true;
        if (drops_hull) continue;
        std::vector<int> to2(next.tree.n_edges);
        for (int x = 0; x < next.tree.n_edges; ++x) to2[x] = st.to_target[gs.edge_map[x]];
        faces.push_back(gs);
        st.tree = next;
        st.to_target = to2;
        did = true;
        break;
      } catch (const Error&) {
        continue;
      }
    }
    if (!did) break;
  }
  // corolla-to-empty case: the source degenerated to the empty tree
  if (cur.tree.is_empty() && !st.tree.tree.is_empty()) {
    int e = -1;
    for (int x = 0; x < st.tree.tree.n_edges; ++x)
      if (st.to_target[x] == img_root) e = x;
    auto m = outer_face_corolla(st.tree, e);
    faces.push_back(m.word.front());
    Stage s2;
    s2.tree = m.source;
    s2.to_target = {img_root};
    st = s2;
  }

  // contract: inner faces at inner edges not hit by g
  while (true) {
    bool did = false;
    for (int e = 0; e < st.tree.tree.n_edges; ++e) {
      if (!st.tree.tree.is_inner_edge(e)) continue;
      if (hit.count(st.to_target[e])) continue;
      auto [next, step] = inner_face(st.tree, e);
      GenStep gs = step.word.front();
      std::vector<int> to2(next.tree.n_edges);
      for (int x = 0; x < next.tree.n_edges; ++x) to2[x] = st.to_target[gs.edge_map[x]];
      faces.push_back(gs);
      st.tree = next;
      st.to_target = to2;
      did = true;
      break;
    }
    if (!did) break;
  }

  // 3. isomorphism from the degenerated source onto the contracted stage
  GenStep iso;
  iso.kind = GenStep::Kind::isomorphism;
  iso.edge_map.assign(cur.tree.n_edges, -1);
  for (int x = 0; x < cur.tree.n_edges; ++x) {
    int want = g[x];
    for (int y = 0; y < st.tree.tree.n_edges; ++y)
      if (st.to_target[y] == want) iso.edge_map[x] = y;
    if (iso.edge_map[x] < 0) throw Error("InternalError", "factorization lost an edge");
  }
  word.push_back(iso);
  for (auto it = faces.rbegin(); it != faces.rend(); ++it) word.push_back(*it);
  return word;
}

// Replay a generator word and return the composed edge map; used to check
// that the word composes to the morphism's edge map.
inline std::vector<int> replay_word(const CTree& src, const std::vector<GenStep>& word) {
  std::vector<int> g(src.tree.n_edges);
  for (int i = 0; i < src.tree.n_edges; ++i) g[i] = i;
  for (const auto& step : word) {
    std::vector<int> g2(g.size());
    switch (step.kind) {
      case GenStep::Kind::degeneracy:
        for (size_t i = 0; i < g.size(); ++i) g2[i] = step.edge_map[g[i]];
        break;
      case GenStep::Kind::isomorphism:
      case GenStep::Kind::inner_face:
      case GenStep::Kind::outer_face_vertex:
      case GenStep::Kind::outer_face_corolla:
        for (size_t i = 0; i < g.size(); ++i) g2[i] = step.edge_map[g[i]];
        break;
    }
    g = g2;
  }
  return g;
}

// ---------------------------------------------------------------------------
// Raw (E,V) ingestion

struct RawTree {
  std::vector<std::string> edges;
  std::vector<std::vector<std::string>> vertices;  // each vertex as a set of edge names
  std::string root;
};

// Orient a raw (edges, vertices, root) presentation into rooted normal form.
// Vertex input orders are taken from the listing order (minus the output
// edge), which is how a planar structure is communicated in files.
inline Tree tree_from_raw(const RawTree& raw) {
  std::map<std::string, int> idx;
  for (size_t i = 0; i < raw.edges.size(); ++i) {
    if (idx.count(raw.edges[i])) throw Error("SchemaError", "repeated edge name " + raw.edges[i]);
    idx[raw.edges[i]] = static_cast<int>(i);
  }
  if (!idx.count(raw.root)) throw Error("SchemaError", "root is not an edge");
  Tree t;
  t.n_edges = static_cast<int>(raw.edges.size());
  t.root = idx.at(raw.root);

  std::vector<std::vector<int>> vsets;
  for (const auto& v : raw.vertices) {
    std::vector<int> s;
    for (const auto& e : v) {
      if (!idx.count(e)) throw Error("SchemaError", "vertex references unknown edge " + e);
      s.push_back(idx.at(e));
    }
    vsets.push_back(s);
  }
  // orient away from the root
  std::vector<char> placed(vsets.size(), 0);
  std::vector<int> frontier{t.root};
  std::set<int> known{t.root};
  while (!frontier.empty()) {
    int e = frontier.back();
    frontier.pop_back();
    for (size_t v = 0; v < vsets.size(); ++v) {
      if (placed[v]) continue;
      if (std::find(vsets[v].begin(), vsets[v].end(), e) == vsets[v].end()) continue;
      placed[v] = 1;
      TreeVertex tv;
      tv.out_edge = e;
      for (int x : vsets[v])
        if (x != e) {
          tv.in_edges.push_back(x);
          if (!known.insert(x).second) throw Error("SchemaError", "loop detected at edge " + raw.edges[x]);
          frontier.push_back(x);
        }
      t.vertices.push_back(tv);
      break;  // an edge has at most one unplaced vertex on its far side
    }
  }
  for (size_t v = 0; v < vsets.size(); ++v)
    if (!placed[v]) throw Error("SchemaError", "disconnected vertex");
  if (static_cast<int>(known.size()) != t.n_edges) throw Error("SchemaError", "disconnected edge");
  if (auto err = t.structural_error()) throw Error("SchemaError", *err);
  return t;
}

inline RawTree tree_to_raw(const Tree& t, const std::vector<std::string>& names) {
  RawTree raw;
  raw.edges = names;
  raw.root = names[t.root];
  for (const auto& v : t.vertices) {
    std::vector<std::string> s{names[v.out_edge]};
    for (int e : v.in_edges) s.push_back(names[e]);
    raw.vertices.push_back(s);
  }
  return raw;
}

// ---------------------------------------------------------------------------
// ASCII rendering

inline std::string render_tree(const OMTree& t) {
  std::ostringstream os;
  std::vector<int> pos(t.tree.n_edges, -1);
  for (size_t i = 0; i < t.leaf_order.size(); ++i) pos[t.leaf_order[i]] = static_cast<int>(i);
  std::function<void(int, int)> walk = [&](int e, int depth) {
    os << std::string(2 * depth, ' ') << t.labels[e].id;
    int v = t.tree.vertex_above(e);
    if (v < 0) {
      if (pos[e] >= 0) os << "  @" << pos[e] + 1;
      os << "\n";
      return;
    }
    os << "  [" << t.marks[v] << "]\n";
    for (int c : t.tree.vertices[v].in_edges) walk(c, depth + 1);
  };
  walk(t.tree.root, 0);
  return os.str();
}

}  // namespace operadforge
