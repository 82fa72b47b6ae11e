#pragma once

// Exact-or-bounded colimits of finite operads: push-outs via saturation
// over decorated marked trees, finite coequalizers by congruence closure,
// pullbacks, filtered colimits by the comma-category formula, bifibration
// colimits (colour colimit first, then the fiber), and the free-map
// push-out filtration with punctured-cube stages.
//
// Saturation identifications are unoriented: colimit classes of sets depend
// only on the generated equivalence relation, so each index-category
// morphism or value map contributes one recorded edge in a union-find.

#include <deque>

#include "operadforge/freeops.hpp"
#include "operadforge/trees.hpp"

namespace operadforge {

inline bool operator==(const FinOperad& a, const FinOperad& b) {
  return a.colours == b.colours && a.variant == b.variant && a.max_valence == b.max_valence &&
         a.components == b.components && a.compose_table == b.compose_table &&
         a.symmetry_table == b.symmetry_table && a.units == b.units;
}

// ---------------------------------------------------------------------------
// Union-find

class UnionFind {
 public:
  explicit UnionFind(int n = 0) : parent_(n) {
    for (int i = 0; i < n; ++i) parent_[i] = i;
  }
  int find(int x) const {
    while (parent_[x] != x) x = parent_[x];
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
    return true;
  }
  int size() const { return static_cast<int>(parent_.size()); }

 private:
  mutable std::vector<int> parent_;
};

// ---------------------------------------------------------------------------
// Saturation engine

// One vertex decoration: an operation of the marked family member, indexed
// by its local signature (the colour map to the ambient set need not be
// injective, so the local signature is part of the data).
using LocalDec = std::pair<Signature, OpId>;

inline OpId encode_dec(const LocalDec& d) { return d.first.key() + "|" + d.second; }
inline LocalDec decode_dec(const OpId& s) {
  auto bar = s.rfind('|');
  return {parse_signature_key(s.substr(0, bar)), s.substr(bar + 1)};
}

struct AmbientMark {
  bool is_operad = true;  // multigraph members decorate but never compose
  FinOperad op;
  MultiGraph mg;
  std::map<Colour, Colour> to_ambient;

  const std::vector<Colour>& local_colours() const { return is_operad ? op.colours : mg.colours; }
  Colour ambient_colour(const Colour& c) const {
    auto it = to_ambient.find(c);
    if (it == to_ambient.end()) throw Error("DanglingReference", "mark colour map undefined at " + c.id);
    return it->second;
  }
  const std::map<Signature, std::vector<OpId>>& components() const {
    return is_operad ? op.components : mg.components;
  }
};

// A value map along a mark arrow of the index category.
struct MarkMoveSpec {
  std::string from, to;
  std::map<Colour, Colour> cmap;  // between local colour sets
  std::map<Signature, std::map<OpId, OpId>> comp;

  Signature map_signature(const Signature& s) const {
    Signature r;
    r.output = cmap.at(s.output);
    for (const auto& c : s.inputs) r.inputs.push_back(cmap.at(c));
    return r;
  }
  OpId map_op(const Signature& s, const OpId& op) const { return comp.at(s).at(op); }
};

struct SaturationConfig {
  std::vector<Colour> ambient;
  std::map<std::string, AmbientMark> marks;
  std::vector<MarkMoveSpec> moves;
  bool include_empty_tree = true;
  bool planar_moves = true;  // disabled for the nonsymmetric variant
  long max_states = 500000;
};

struct DecoratedState {
  OMTree shape;
  std::vector<LocalDec> dec;  // per vertex
  std::string form;
};

struct SaturationWitness {
  int from_state;
  int to_state;
  std::string kind;  // mark_move / inner_face / degeneracy / planar_iso
  std::string detail;
};

struct SaturationOutcome {
  Signature arity;
  int bound = 0;
  std::vector<DecoratedState> states;
  std::map<std::string, int> index_of;
  std::vector<int> class_of;  // state -> class id (0..n_classes-1)
  int n_classes = 0;
  bool exact = false;
  bool clipped = false;  // an identification was blocked by a valence bound
  std::vector<SaturationWitness> witnesses;
};

namespace detail {

inline std::string canon_form_of(const OMTree& shape, const std::vector<LocalDec>& dec) {
  std::vector<OpId> enc;
  for (const auto& d : dec) enc.push_back(encode_dec(d));
  return canonicalize(shape, &enc).form;
}

struct SatRun {
  const SaturationConfig* cfg;
  Signature S;
  int bound;
  std::vector<DecoratedState> states;
  std::map<std::string, int> index_of;
  UnionFind uf{0};
  std::vector<SaturationWitness> witnesses;
  bool clipped = false;

  int state_index(const std::string& form) const {
    auto it = index_of.find(form);
    return it == index_of.end() ? -1 : it->second;
  }

  // enumerate all decorated marked trees with ambient arity S
  void enumerate() {
    std::map<std::string, DecoratedState> seen;
    // planar decorated shapes by root ambient colour and leaf count,
    // memoized per (colour, leaves, vertex budget)
    struct Shape {
      OMTree t;
      std::vector<LocalDec> dec;
    };
    std::map<std::tuple<Colour, int, int>, std::vector<Shape>> memo;
    std::function<const std::vector<Shape>&(const Colour&, int, int)> gen =
        [&](const Colour& d, int n, int budget) -> const std::vector<Shape>& {
          auto key = std::make_tuple(d, n, budget);
          auto found = memo.find(key);
          if (found != memo.end()) return found->second;
          std::vector<Shape> out;
          if (n == 1 && cfg->include_empty_tree) out.push_back({empty_tree(d), {}});
          if (budget == 0) return memo[key] = std::move(out);
          for (const auto& [mark, fam] : cfg->marks) {
            for (const auto& [ls, ops] : fam.components()) {
              if (ops.empty()) continue;
              if (!(fam.ambient_colour(ls.output) == d)) continue;
              int k = ls.valence();
              std::vector<int> parts(k, 0);
              std::function<void(int, int)> split = [&](int i, int left) {
                if (i == k) {
                  if (left != 0) return;
                  std::vector<Shape> acc;
                  std::function<void(int, int)> pick = [&](int j, int vleft) {
                    if (j == k) {
                      std::vector<Colour> din;
                      for (const auto& c : ls.inputs) din.push_back(fam.ambient_colour(c));
                      OMTree base = corolla(din, d, mark);
                      std::vector<OMTree> shapes;
                      for (const auto& a : acc) shapes.push_back(a.t);
                      for (const auto& op : ops) {
                        Shape sh{graft(base, base.tree.leaves(), shapes), {}};
                        sh.dec.push_back({ls, op});
                        for (const auto& a : acc) sh.dec.insert(sh.dec.end(), a.dec.begin(), a.dec.end());
                        out.push_back(std::move(sh));
                      }
                      return;
                    }
                    Colour dj = fam.ambient_colour(ls.inputs[j]);
                    for (const auto& sub : gen(dj, parts[j], vleft)) {
                      int used = static_cast<int>(sub.t.tree.vertices.size());
                      if (used > vleft) continue;
                      if (parts[j] == 0 && used == 0) continue;
                      acc.push_back(sub);
                      pick(j + 1, vleft - used);
                      acc.pop_back();
                    }
                  };
                  pick(0, budget - 1);
                  return;
                }
                for (int take = 0; take <= left; ++take) {
                  parts[i] = take;
                  split(i + 1, left - take);
                }
              };
              split(0, n);
            }
          }
          return memo[key] = std::move(out);
        };

    for (const auto& sh : gen(S.output, S.valence(), bound)) {
      auto lv = sh.t.tree.leaves();
      if (static_cast<int>(lv.size()) != S.valence()) continue;
      std::vector<int> order(S.valence(), -1);
      std::vector<char> used(sh.t.tree.n_edges, 0);
      std::function<void(int)> assign = [&](int i) {
        if (i == S.valence()) {
          OMTree t = sh.t;
          t.leaf_order = order;
          std::string form = canon_form_of(t, sh.dec);
          if (!seen.count(form)) {
            std::vector<OpId> enc;
            for (const auto& x : sh.dec) enc.push_back(encode_dec(x));
            auto c = canonicalize(t, &enc);
            std::vector<LocalDec> cd;
            for (const auto& e : c.canon_decoration) cd.push_back(decode_dec(e));
            seen.emplace(form, DecoratedState{c.canon, cd, form});
          }
          return;
        }
        for (int e : lv) {
          if (used[e] || !(sh.t.labels[e] == S.inputs[i])) continue;
          used[e] = 1;
          order[i] = e;
          assign(i + 1);
          used[e] = 0;
        }
      };
      assign(0);
      if (static_cast<long>(seen.size()) > cfg->max_states)
        throw Error("SearchBudgetExceeded", "saturation state space exceeds the configured budget");
    }
    for (auto& [f, st] : seen) {
      index_of[f] = static_cast<int>(states.size());
      states.push_back(std::move(st));
    }
    uf = UnionFind(static_cast<int>(states.size()));
  }

  void relate(int a, const OMTree& shape, const std::vector<LocalDec>& dec, const std::string& kind,
              const std::string& detail) {
    std::string form = canon_form_of(shape, dec);
    int b = state_index(form);
    if (b < 0) throw Error("InternalError", "move left the enumeration window (" + kind + ")");
    uf.unite(a, b);
    witnesses.push_back({a, b, kind, detail});
  }

  void generate_moves() {
    for (int si = 0; si < static_cast<int>(states.size()); ++si) {
      const DecoratedState& st = states[si];
      const Tree& tr = st.shape.tree;

      // (a) marking moves along the index arrows
      for (size_t v = 0; v < tr.vertices.size(); ++v) {
        for (const auto& mv : cfg->moves) {
          if (st.shape.marks[v] != mv.from) continue;
          const auto& [ls, op] = st.dec[v];
          auto sit = mv.comp.find(ls);
          if (sit == mv.comp.end()) continue;
          auto oit = sit->second.find(op);
          if (oit == sit->second.end()) continue;
          OMTree t2 = st.shape;
          t2.marks[v] = mv.to;
          auto dec2 = st.dec;
          dec2[v] = {mv.map_signature(ls), oit->second};
          relate(si, t2, dec2, "mark_move", mv.from + "->" + mv.to + " at vertex " + std::to_string(v));
        }
      }

      // (b) same-marked inner-face composition
      for (int e = 0; e < tr.n_edges; ++e) {
        if (!tr.is_inner_edge(e)) continue;
        int below = tr.vertex_below(e);
        int above = tr.vertex_above(e);
        if (st.shape.marks[below] != st.shape.marks[above]) continue;
        const AmbientMark& fam = cfg->marks.at(st.shape.marks[below]);
        if (!fam.is_operad) continue;
        const auto& [su, xu] = st.dec[below];
        const auto& [sw, yw] = st.dec[above];
        int slot = -1;
        for (size_t i = 0; i < tr.vertices[below].in_edges.size(); ++i)
          if (tr.vertices[below].in_edges[i] == e) slot = static_cast<int>(i);
        if (!(su.inputs[slot] == sw.output)) continue;  // local colours must match
        if (su.valence() - 1 + sw.valence() > fam.op.max_valence) {
          clipped = true;
          continue;
        }
        std::vector<Signature> ts;
        std::vector<OpId> ops;
        bool ok = true;
        for (int i = 0; i < su.valence(); ++i) {
          if (i == slot) {
            ts.push_back(sw);
            ops.push_back(yw);
          } else {
            ts.push_back(Signature{{su.inputs[i]}, su.inputs[i]});
            try {
              ops.push_back(fam.op.unit(su.inputs[i]));
            } catch (const Error&) {
              ok = false;
              break;
            }
          }
        }
        if (!ok) continue;
        OpId merged;
        try {
          merged = fam.op.compose(su, ts, xu, ops);
        } catch (const Error&) {
          clipped = true;
          continue;
        }
        auto [ct, cm] = inner_face(st.shape.ctree(), e);
        OMTree t2;
        t2.tree = ct.tree;
        t2.labels = ct.labels;
        // vertex order after inner_face: below merged in place, above gone
        std::vector<LocalDec> dec2;
        std::vector<std::string> marks2;
        for (int v = 0; v < static_cast<int>(tr.vertices.size()); ++v) {
          if (v == above) continue;
          if (v == below) {
            dec2.push_back({compose_signatures(su, ts), merged});
          } else {
            dec2.push_back(st.dec[v]);
          }
          marks2.push_back(st.shape.marks[v]);
        }
        t2.marks = marks2;
        t2.leaf_order.resize(st.shape.leaf_order.size());
        // edges kept: map through the inclusion's inverse
        std::vector<int> inv(tr.n_edges, -1);
        for (int x = 0; x < ct.tree.n_edges; ++x) inv[cm.edge_map[x]] = x;
        for (size_t i = 0; i < st.shape.leaf_order.size(); ++i)
          t2.leaf_order[i] = inv[st.shape.leaf_order[i]];
        relate(si, t2, dec2, "inner_face", "edge " + std::to_string(e));
      }

      // (c) unit-vertex degeneracies
      for (size_t v = 0; v < tr.vertices.size(); ++v) {
        const AmbientMark& fam = cfg->marks.at(st.shape.marks[v]);
        if (!fam.is_operad) continue;
        if (tr.vertices[v].in_edges.size() != 1) continue;
        const auto& [ls, op] = st.dec[v];
        if (!(ls.inputs[0] == ls.output)) continue;
        OpId u;
        try {
          u = fam.op.unit(ls.output);
        } catch (const Error&) {
          continue;
        }
        if (op != u) continue;
        if (tr.vertices.size() == 1 && !cfg->include_empty_tree) continue;
        auto [ct, dm] = degeneracy(st.shape.ctree(), static_cast<int>(v));
        OMTree t2;
        t2.tree = ct.tree;
        t2.labels = ct.labels;
        std::vector<LocalDec> dec2;
        std::vector<std::string> marks2;
        for (size_t w = 0; w < tr.vertices.size(); ++w) {
          if (w == v) continue;
          dec2.push_back(st.dec[w]);
          marks2.push_back(st.shape.marks[w]);
        }
        t2.marks = marks2;
        t2.leaf_order.resize(st.shape.leaf_order.size());
        for (size_t i = 0; i < st.shape.leaf_order.size(); ++i)
          t2.leaf_order[i] = dm.edge_map[st.shape.leaf_order[i]];
        relate(si, t2, dec2, "degeneracy", "vertex " + std::to_string(v));
      }

      // (d) planar change with the symmetry action on the decoration
      if (cfg->planar_moves) {
        for (size_t v = 0; v < tr.vertices.size(); ++v) {
          const AmbientMark& fam = cfg->marks.at(st.shape.marks[v]);
          if (!fam.is_operad || fam.op.variant == Variant::nonsymmetric) continue;
          int k = static_cast<int>(tr.vertices[v].in_edges.size());
          if (k < 2) continue;
          const auto& [ls, op] = st.dec[v];
          for (const auto& rho : all_perms(k)) {
            if (perm_is_identity(rho)) continue;
            OMTree t2 = st.shape;
            t2.tree.vertices[v].in_edges = perm_apply_positions(tr.vertices[v].in_edges, rho);
            auto dec2 = st.dec;
            OpId moved;
            try {
              moved = fam.op.sym(ls, rho, op);
            } catch (const Error&) {
              continue;
            }
            dec2[v] = {ls.permuted(rho), moved};
            relate(si, t2, dec2, "planar_iso",
                   "vertex " + std::to_string(v) + " by " + perm_to_string(rho));
          }
        }
      }
    }
  }
};

}  // namespace detail

inline SaturationOutcome run_saturation(const SaturationConfig& cfg, const Signature& S, int bound) {
  detail::SatRun run;
  run.cfg = &cfg;
  run.S = S;
  run.bound = bound;
  run.enumerate();
  run.generate_moves();
  SaturationOutcome out;
  out.arity = S;
  out.bound = bound;
  out.states = std::move(run.states);
  out.index_of = std::move(run.index_of);
  out.witnesses = std::move(run.witnesses);
  out.clipped = run.clipped;
  out.class_of.resize(out.states.size());
  std::map<int, int> renumber;
  for (size_t i = 0; i < out.states.size(); ++i) {
    int root = run.uf.find(static_cast<int>(i));
    auto it = renumber.find(root);
    if (it == renumber.end()) {
      renumber[root] = out.n_classes;
      out.class_of[i] = out.n_classes++;
    } else {
      out.class_of[i] = it->second;
    }
  }
  return out;
}

// Stabilization is the spec's exactness notion: the class sets at `bound`
// and `bound+1` must coincide under the reduction moves. Valence clipping is
// reported separately on the outcome.
inline bool saturation_stable(const SaturationConfig& cfg, const SaturationOutcome& at_bound,
                              const SaturationOutcome& at_next) {
  // every big class has a small representative
  std::vector<char> touched(at_next.n_classes, 0);
  for (const auto& st : at_bound.states) {
    auto it = at_next.index_of.find(st.form);
    if (it == at_next.index_of.end()) return false;
    touched[at_next.class_of[it->second]] = 1;
  }
  for (char t : touched)
    if (!t) return false;
  // no merging: small states in the same big class were already together
  std::map<int, int> big_to_small;
  for (size_t i = 0; i < at_bound.states.size(); ++i) {
    int big = at_next.class_of[at_next.index_of.at(at_bound.states[i].form)];
    int small = at_bound.class_of[i];
    auto it = big_to_small.find(big);
    if (it == big_to_small.end())
      big_to_small[big] = small;
    else if (it->second != small)
      return false;
  }
  return true;
}

inline SaturationOutcome saturate_with_certificate(const SaturationConfig& cfg, const Signature& S,
                                                   int bound) {
  auto a = run_saturation(cfg, S, bound);
  auto b = run_saturation(cfg, S, bound + 1);
  a.exact = saturation_stable(cfg, a, b);
  return a;
}

// ---------------------------------------------------------------------------
// Push-outs in one fiber

struct Span {
  FinOperad apex;         // F_o
  OperadMorphism leg_x;   // F_o -> F_x
  OperadMorphism leg_y;   // F_o -> F_y
};

inline AxiomReport validate_span(const Span& sp) {
  AxiomReport rep;
  if (!(sp.leg_x.source == sp.apex) || !(sp.leg_y.source == sp.apex))
    rep.add("span", "legs do not share the apex");
  auto rx = validate_morphism(sp.leg_x);
  auto ry = validate_morphism(sp.leg_y);
  for (const auto& v : rx.violations) rep.add("leg_x_" + v.kind, v.detail);
  for (const auto& v : ry.violations) rep.add("leg_y_" + v.kind, v.detail);
  return rep;
}

namespace detail {

inline std::map<Colour, Colour> identity_cmap(const std::vector<Colour>& cs) {
  std::map<Colour, Colour> m;
  for (const auto& c : cs) m[c] = c;
  return m;
}

inline MarkMoveSpec move_of_morphism(const std::string& from, const std::string& to,
                                     const OperadMorphism& f) {
  MarkMoveSpec mv;
  mv.from = from;
  mv.to = to;
  mv.cmap = f.colour_map;
  mv.comp = f.components;
  return mv;
}

}  // namespace detail

// Saturation configuration for a one-fiber span (identity colour maps).
inline SaturationConfig span_config(const Span& sp) {
  SaturationConfig cfg;
  cfg.ambient = sp.leg_x.target.colours;
  bool nonsym = sp.apex.variant == Variant::nonsymmetric;
  cfg.planar_moves = !nonsym;
  AmbientMark o{true, sp.apex, {}, detail::identity_cmap(sp.apex.colours)};
  AmbientMark x{true, sp.leg_x.target, {}, detail::identity_cmap(sp.leg_x.target.colours)};
  AmbientMark y{true, sp.leg_y.target, {}, detail::identity_cmap(sp.leg_y.target.colours)};
  cfg.marks = {{"o", o}, {"x", x}, {"y", y}};
  cfg.moves = {detail::move_of_morphism("o", "x", sp.leg_x), detail::move_of_morphism("o", "y", sp.leg_y)};
  return cfg;
}

struct PushoutComponent {
  SaturationOutcome saturation;
  std::map<OpId, int> p_map;  // F_x(S) -> class
  std::map<OpId, int> q_map;  // F_y(S) -> class
};

// Z(S) with the canonical maps from the two feet.
inline PushoutComponent pushout(const Span& sp, const Signature& S, int bound) {
  auto rep = validate_span(sp);
  if (!rep.pass()) throw Error("SchemaError", "invalid span: " + rep.summary());
  auto cfg = span_config(sp);
  PushoutComponent out;
  out.saturation = saturate_with_certificate(cfg, S, bound);
  auto corolla_class = [&](const std::string& mark, const FinOperad& f, const OpId& op) {
    OMTree t = corolla(S.inputs, S.output, mark);
    std::vector<LocalDec> dec{{S, op}};
    auto form = detail::canon_form_of(t, dec);
    auto it = out.saturation.index_of.find(form);
    if (it == out.saturation.index_of.end()) throw Error("InternalError", "foot corolla missing");
    return out.saturation.class_of[it->second];
  };
  if (S.valence() <= sp.leg_x.target.max_valence)
    for (const auto& op : sp.leg_x.target.component(S)) out.p_map[op] = corolla_class("x", sp.leg_x.target, op);
  if (S.valence() <= sp.leg_y.target.max_valence)
    for (const auto& op : sp.leg_y.target.component(S)) out.q_map[op] = corolla_class("y", sp.leg_y.target, op);
  return out;
}

// ---------------------------------------------------------------------------
// Materialized push-out with structure maps

struct MaterializedPushout {
  FinOperad operad;  // class ids per signature
  OperadMorphism p;  // F_x -> Z
  OperadMorphism q;  // F_y -> Z
  bool exact = true;
  std::map<Signature, SaturationOutcome> saturations;
};

namespace detail {

// Find the class of an externally built decorated tree by reducing it into
// the bounded window with the saturation moves (breadth-first).
inline int find_class(const SaturationConfig& cfg, const SaturationOutcome& sat, OMTree shape,
                      std::vector<LocalDec> dec, int depth_budget = 20000) {
  struct Node {
    OMTree shape;
    std::vector<LocalDec> dec;
  };
  std::deque<Node> q;
  std::set<std::string> seen;
  std::string first_form;
  q.push_back({std::move(shape), std::move(dec)});
  while (!q.empty() && depth_budget-- > 0) {
    Node n = std::move(q.back());
    q.pop_back();  // depth-first: reduction chains complete before widening
    std::string form = canon_form_of(n.shape, n.dec);
    if (first_form.empty()) first_form = form;
    if (!seen.insert(form).second) continue;
    auto it = sat.index_of.find(form);
    if (it != sat.index_of.end()) return sat.class_of[it->second];
    const Tree& tr = n.shape.tree;
    // vertex-count-reducing moves: same-mark contraction and degeneracy
    for (int e = 0; e < tr.n_edges; ++e) {
      if (!tr.is_inner_edge(e)) continue;
      int below = tr.vertex_below(e), above = tr.vertex_above(e);
      if (n.shape.marks[below] != n.shape.marks[above]) continue;
      const AmbientMark& fam = cfg.marks.at(n.shape.marks[below]);
      if (!fam.is_operad) continue;
      const auto& [su, xu] = n.dec[below];
      const auto& [sw, yw] = n.dec[above];
      int slot = -1;
      for (size_t i = 0; i < tr.vertices[below].in_edges.size(); ++i)
        if (tr.vertices[below].in_edges[i] == e) slot = static_cast<int>(i);
      if (!(su.inputs[slot] == sw.output)) continue;
      std::vector<Signature> ts;
      std::vector<OpId> ops;
      bool ok = true;
      OpId merged;
      try {
        for (int i = 0; i < su.valence(); ++i) {
          if (i == slot) {
            ts.push_back(sw);
            ops.push_back(yw);
          } else {
            ts.push_back(Signature{{su.inputs[i]}, su.inputs[i]});
            ops.push_back(fam.op.unit(su.inputs[i]));
          }
        }
        merged = fam.op.compose(su, ts, xu, ops);
      } catch (const Error&) {
        ok = false;
      }
      if (!ok) continue;
      auto [ct, cm] = inner_face(n.shape.ctree(), e);
      Node n2;
      n2.shape.tree = ct.tree;
      n2.shape.labels = ct.labels;
      std::vector<int> inv(tr.n_edges, -1);
      for (int x2 = 0; x2 < ct.tree.n_edges; ++x2) inv[cm.edge_map[x2]] = x2;
      for (int v = 0; v < static_cast<int>(tr.vertices.size()); ++v) {
        if (v == above) continue;
        n2.dec.push_back(v == below ? LocalDec{compose_signatures(su, ts), merged} : n.dec[v]);
        n2.shape.marks.push_back(n.shape.marks[v]);
      }
      n2.shape.leaf_order.resize(n.shape.leaf_order.size());
      for (size_t i = 0; i < n.shape.leaf_order.size(); ++i)
        n2.shape.leaf_order[i] = inv[n.shape.leaf_order[i]];
      q.push_back(std::move(n2));
    }
    for (size_t v = 0; v < tr.vertices.size(); ++v) {
      const AmbientMark& fam = cfg.marks.at(n.shape.marks[v]);
      if (!fam.is_operad || tr.vertices[v].in_edges.size() != 1) continue;
      const auto& [ls, op] = n.dec[v];
      if (!(ls.inputs[0] == ls.output)) continue;
      OpId u;
      try {
        u = fam.op.unit(ls.output);
      } catch (const Error&) {
        continue;
      }
      if (op != u) continue;
      auto [ct, dm] = degeneracy(n.shape.ctree(), static_cast<int>(v));
      Node n2;
      n2.shape.tree = ct.tree;
      n2.shape.labels = ct.labels;
      for (size_t w = 0; w < tr.vertices.size(); ++w) {
        if (w == v) continue;
        n2.dec.push_back(n.dec[w]);
        n2.shape.marks.push_back(n.shape.marks[w]);
      }
      n2.shape.leaf_order.resize(n.shape.leaf_order.size());
      for (size_t i = 0; i < n.shape.leaf_order.size(); ++i)
        n2.shape.leaf_order[i] = dm.edge_map[n.shape.leaf_order[i]];
      q.push_back(std::move(n2));
    }
    // mark moves can unlock contractions
    for (size_t v = 0; v < tr.vertices.size(); ++v) {
      for (const auto& mv : cfg.moves) {
        if (n.shape.marks[v] != mv.from) continue;
        const auto& [ls, op] = n.dec[v];
        auto sit = mv.comp.find(ls);
        if (sit == mv.comp.end()) continue;
        auto oit = sit->second.find(op);
        if (oit == sit->second.end()) continue;
        Node n2 = n;
        n2.shape.marks[v] = mv.to;
        n2.dec[v] = {mv.map_signature(ls), oit->second};
        q.push_back(std::move(n2));
      }
    }
  }
  throw Error("Unstabilized", "grafted tree does not reduce into the bounded window: " + first_form +
                                  " (target arity " + sat.arity.key() + ")");
}

}  // namespace detail

inline MaterializedPushout materialize_pushout(const Span& sp, int bound, int valence_cap = -1) {
  auto cfg = span_config(sp);
  MaterializedPushout out;
  FinOperad& z = out.operad;
  const FinOperad& fx = sp.leg_x.target;
  const FinOperad& fy = sp.leg_y.target;
  z.colours = cfg.ambient;
  z.variant = sp.apex.variant;
  z.max_valence = std::min(fx.max_valence, fy.max_valence);
  if (valence_cap >= 0) z.max_valence = std::min(z.max_valence, valence_cap);

  auto class_id = [](const Signature& s, int c) { return "z" + std::to_string(c); };
  for (const auto& S : all_signatures(z.colours, z.max_valence, z.variant == Variant::reduced)) {
    auto sat = saturate_with_certificate(cfg, S, bound);
    out.exact = out.exact && sat.exact;
    if (sat.n_classes > 0) {
      std::vector<OpId> ids;
      for (int c = 0; c < sat.n_classes; ++c) ids.push_back(class_id(S, c));
      z.components[S] = ids;
    }
    out.saturations[S] = std::move(sat);
  }
  // representative of a class: the first (minimal-form) state in it
  auto rep_of = [&](const Signature& S, int c) -> const DecoratedState& {
    const auto& sat = out.saturations.at(S);
    const DecoratedState* best = nullptr;
    for (size_t i = 0; i < sat.states.size(); ++i) {
      if (sat.class_of[i] != c) continue;
      if (!best || sat.states[i].shape.tree.vertices.size() < best->shape.tree.vertices.size())
        best = &sat.states[i];
    }
    if (!best) throw Error("InternalError", "empty class");
    return *best;
  };
  for (const auto& c : z.colours) {
    const auto& sat = out.saturations.at(Signature{{c}, c});
    OMTree t = empty_tree(c);
    auto form = detail::canon_form_of(t, {});
    z.units[c] = class_id(Signature{{c}, c}, sat.class_of[sat.index_of.at(form)]);
  }
  auto nonempty = [&](const Signature& s) { return z.components.count(s) > 0; };
  auto sigs = all_signatures(z.colours, z.max_valence, z.variant == Variant::reduced);
  for (const auto& [S, ids] : z.components) {
    const auto& sat = out.saturations.at(S);
    if (z.variant != Variant::nonsymmetric) {
      for (const auto& sigma : all_perms(S.valence())) {
        for (int c = 0; c < sat.n_classes; ++c) {
          const auto& rep = rep_of(S, c);
          OMTree t = rep.shape;
          t.leaf_order = perm_apply_positions(rep.shape.leaf_order, sigma);
          const auto& tsat = out.saturations.at(S.permuted(sigma));
          auto form = detail::canon_form_of(t, rep.dec);
          auto it = tsat.index_of.find(form);
          if (it == tsat.index_of.end()) throw Error("InternalError", "symmetry left the window");
          z.symmetry_table[SymKey{S, sigma, class_id(S, c)}] =
              class_id(S.permuted(sigma), tsat.class_of[it->second]);
        }
      }
    }
    for_each_composable(sigs, S, z.max_valence, nonempty, [&](const std::vector<Signature>& ts) {
      Signature r = compose_signatures(S, ts);
      const auto& rsat = out.saturations.at(r);
      std::vector<OpId> pick(ts.size());
      std::function<void(size_t)> rec = [&](size_t i) {
        if (i == ts.size()) {
          for (int c = 0; c < sat.n_classes; ++c) {
            const auto& outer = rep_of(S, c);
            std::vector<OMTree> shapes;
            std::vector<LocalDec> dec = outer.dec;
            for (size_t j = 0; j < ts.size(); ++j) {
              int cj = std::stoi(pick[j].substr(1));
              const auto& repj = rep_of(ts[j], cj);
              shapes.push_back(repj.shape);
              dec.insert(dec.end(), repj.dec.begin(), repj.dec.end());
            }
            OMTree g = graft(outer.shape, outer.shape.leaf_order, shapes);
            // grafting reorders decorations: base vertices then subtree
            // vertices in slot order, matching how graft appends them
            int cls = detail::find_class(cfg, rsat, g, dec);
            z.compose_table[ComposeKey{S, class_id(S, c), ts, pick}] = class_id(r, cls);
          }
          return;
        }
        for (const auto& x : z.components.at(ts[i])) {
          pick[i] = x;
          rec(i + 1);
        }
      };
      rec(0);
    });
  }
  // the canonical feet
  out.p.source = truncate_operad(fx, z.max_valence);
  out.p.target = z;
  out.p.colour_map = detail::identity_cmap(fx.colours);
  for (const auto& [s, ops] : fx.components) {
    if (s.valence() > z.max_valence) continue;
    const auto& sat = out.saturations.at(s);
    for (const auto& op : ops) {
      OMTree t = corolla(s.inputs, s.output, "x");
      std::vector<LocalDec> dec{{s, op}};
      out.p.components[s][op] = class_id(s, sat.class_of[sat.index_of.at(detail::canon_form_of(t, dec))]);
    }
  }
  out.q.source = truncate_operad(fy, z.max_valence);
  out.q.target = z;
  out.q.colour_map = detail::identity_cmap(fy.colours);
  for (const auto& [s, ops] : fy.components) {
    if (s.valence() > z.max_valence) continue;
    const auto& sat = out.saturations.at(s);
    for (const auto& op : ops) {
      OMTree t = corolla(s.inputs, s.output, "y");
      std::vector<LocalDec> dec{{s, op}};
      out.q.components[s][op] = class_id(s, sat.class_of[sat.index_of.at(detail::canon_form_of(t, dec))]);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Universal property checks

struct Cocone {
  OperadMorphism h;  // F_x -> L
  OperadMorphism k;  // F_y -> L
};

struct UniversalReport {
  bool commuting = false;
  bool mediating_exists = false;
  bool mediating_unique = false;
  std::string detail;
};

// Build the mediating morphism by composing representatives along their
// trees, verify it, and confirm uniqueness by exhaustive search.
inline UniversalReport check_pushout_universal(const MaterializedPushout& z, const Span& sp,
                                               const Cocone& cc, long search_budget = 2000000) {
  UniversalReport rep;
  // precondition: h . F(iota_1) = k . F(iota_2)
  auto hx = compose_morphisms(cc.h, sp.leg_x);
  auto ky = compose_morphisms(cc.k, sp.leg_y);
  rep.commuting = hx.colour_map == ky.colour_map && hx.components == ky.components;
  if (!rep.commuting) {
    rep.detail = "NotCommuting";
    return rep;
  }
  const FinOperad& L = cc.h.target;
  OperadMorphism l;
  l.source = z.operad;
  l.target = L;
  l.colour_map = cc.h.colour_map;
  for (const auto& [S, ids] : z.operad.components) {
    const auto& sat = z.saturations.at(S);
    // evaluate every state; all members of a class must agree
    std::vector<std::optional<OpId>> value(sat.n_classes);
    for (size_t i = 0; i < sat.states.size(); ++i) {
      const auto& st = sat.states[i];
      OMTree shape = st.shape;
      for (auto& lab : shape.labels) lab = cc.h.map_colour(lab);
      std::vector<OpId> dec;
      bool ok = true;
      for (size_t v = 0; v < st.dec.size(); ++v) {
        const auto& [ls, op] = st.dec[v];
        try {
          if (shape.marks[v] == "x")
            dec.push_back(cc.h.map_op(ls, op));
          else if (shape.marks[v] == "y")
            dec.push_back(cc.k.map_op(ls, op));
          else
            dec.push_back(cc.h.map_op(sp.leg_x.map_signature(ls), sp.leg_x.map_op(ls, op)));
        } catch (const Error&) {
          ok = false;
          break;
        }
      }
      if (!ok) {
        rep.detail = "w-map undefined on a representative";
        return rep;
      }
      OpId got;
      try {
        got = compose_along_tree(L, shape, dec).op;
      } catch (const Error& e) {
        rep.detail = std::string("composition along a representative failed: ") + e.what();
        return rep;
      }
      int c = sat.class_of[i];
      if (!value[c])
        value[c] = got;
      else if (*value[c] != got) {
        rep.detail = "mediating map not constant on a class at " + S.key();
        return rep;
      }
    }
    for (int c = 0; c < sat.n_classes; ++c) l.components[S]["z" + std::to_string(c)] = *value[c];
  }
  bool valid = validate_morphism(l).pass();
  auto lp = compose_morphisms(l, z.p);
  auto lq = compose_morphisms(l, z.q);
  auto restricts = [](const OperadMorphism& small, const OperadMorphism& big) {
    for (const auto& [s, comp] : small.components)
      for (const auto& [op, im] : comp)
        if (big.map_op(s, op) != im) return false;
    return true;
  };
  rep.mediating_exists = valid && restricts(lp, cc.h) && restricts(lq, cc.k);
  if (!rep.mediating_exists) {
    rep.detail = valid ? "mediating morphism does not restrict to the cocone" : "mediating map is not a morphism";
    return rep;
  }
  // uniqueness by search
  MorphismSearchOptions opt;
  opt.budget = search_budget;
  opt.colour_map = l.colour_map;
  int count = 0;
  for (const auto& cand : enumerate_operad_morphisms(z.operad, L, opt)) {
    auto cp = compose_morphisms(cand, z.p);
    auto cq = compose_morphisms(cand, z.q);
    if (restricts(cp, cc.h) && restricts(cq, cc.k)) ++count;
  }
  rep.mediating_unique = count == 1;
  if (!rep.mediating_unique) rep.detail = "found " + std::to_string(count) + " mediating morphisms";
  return rep;
}

// ---------------------------------------------------------------------------
// Finite coequalizers by congruence closure (oracle path: no trees)

struct CoequalizerResult {
  FinOperad operad;
  OperadMorphism projection;  // Q -> Q/~
};

// Quotient of Q by the operadic congruence generated by the given pairs;
// also the computational core of finite coequalizers.
inline CoequalizerResult congruence_quotient(
    const FinOperad& q, const std::vector<std::pair<std::pair<Signature, OpId>, std::pair<Signature, OpId>>>& seeds);

inline CoequalizerResult coequalizer_finite(const OperadMorphism& f, const OperadMorphism& g) {
  if (!(f.source == g.source) || !(f.target == g.target))
    throw Error("SchemaError", "coequalizer needs a parallel pair");
  std::vector<std::pair<std::pair<Signature, OpId>, std::pair<Signature, OpId>>> seeds;
  for (const auto& [s, v] : f.source.components)
    for (const auto& op : v)
      seeds.push_back({{f.map_signature(s), f.map_op(s, op)}, {g.map_signature(s), g.map_op(s, op)}});
  return congruence_quotient(f.target, seeds);
}

inline CoequalizerResult congruence_quotient(
    const FinOperad& q,
    const std::vector<std::pair<std::pair<Signature, OpId>, std::pair<Signature, OpId>>>& seeds) {
  // indices for all operations of Q
  std::vector<std::pair<Signature, OpId>> ops;
  std::map<std::pair<Signature, OpId>, int> idx;
  for (const auto& [s, v] : q.components)
    for (const auto& op : v) {
      idx[{s, op}] = static_cast<int>(ops.size());
      ops.emplace_back(s, op);
    }
  UnionFind uf(static_cast<int>(ops.size()));
  for (const auto& [a, b] : seeds) {
    if (!idx.count(a) || !idx.count(b)) throw Error("DanglingReference", "congruence seed outside Q");
    uf.unite(idx.at(a), idx.at(b));
  }

  // operadic congruence closure: pairwise-related compose/symmetry entries,
  // grouped by table shape to keep the quadratic scan local
  std::map<std::pair<Signature, std::vector<Signature>>, std::vector<const std::pair<const ComposeKey, OpId>*>>
      groups;
  for (const auto& e : q.compose_table) groups[{e.first.outer, e.first.inner}].push_back(&e);
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& [shape, entries] : groups) {
      for (size_t x = 0; x < entries.size(); ++x) {
        for (size_t y = x + 1; y < entries.size(); ++y) {
          const auto& a = entries[x]->first;
          const auto& b = entries[y]->first;
          if (uf.find(idx.at({a.outer, a.outer_op})) != uf.find(idx.at({b.outer, b.outer_op}))) continue;
          bool rel = true;
          for (size_t i = 0; i < a.inner.size() && rel; ++i)
            rel = uf.find(idx.at({a.inner[i], a.inner_ops[i]})) ==
                  uf.find(idx.at({b.inner[i], b.inner_ops[i]}));
          if (!rel) continue;
          Signature r = compose_signatures(a.outer, a.inner);
          if (uf.unite(idx.at({r, entries[x]->second}), idx.at({r, entries[y]->second}))) changed = true;
        }
      }
    }
    for (const auto& [k, v] : q.symmetry_table) {
      for (const auto& op2 : q.component(k.sig)) {
        if (op2 == k.op) continue;
        if (uf.find(idx.at({k.sig, k.op})) != uf.find(idx.at({k.sig, op2}))) continue;
        OpId v2 = q.sym(k.sig, k.sigma, op2);
        if (uf.unite(idx.at({k.sig.permuted(k.sigma), v}), idx.at({k.sig.permuted(k.sigma), v2})))
          changed = true;
      }
    }
  }

  // quotient tables
  CoequalizerResult out;
  FinOperad& c = out.operad;
  c.colours = q.colours;
  c.variant = q.variant;
  c.max_valence = q.max_valence;
  std::map<int, OpId> cls_name;
  std::map<std::pair<Signature, OpId>, OpId> send;
  for (const auto& [s, v] : q.components) {
    std::vector<OpId> ids;
    std::set<int> roots;
    for (const auto& op : v) roots.insert(uf.find(idx.at({s, op})));
    std::map<int, OpId> local;
    int n = 0;
    for (int r : roots) local[r] = "q" + std::to_string(n++);
    for (const auto& op : v) send[{s, op}] = local[uf.find(idx.at({s, op}))];
    for (auto& [r, name] : local) ids.push_back(name);
    std::sort(ids.begin(), ids.end());
    if (!ids.empty()) c.components[s] = ids;
    else if (q.components.count(s)) c.components[s] = {};
  }
  for (const auto& [col, u] : q.units) c.units[col] = send.at({Signature{{col}, col}, u});
  for (const auto& [k, v] : q.compose_table) {
    ComposeKey nk = k;
    nk.outer_op = send.at({k.outer, k.outer_op});
    for (size_t i = 0; i < k.inner.size(); ++i) nk.inner_ops[i] = send.at({k.inner[i], k.inner_ops[i]});
    c.compose_table[nk] = send.at({compose_signatures(k.outer, k.inner), v});
  }
  for (const auto& [k, v] : q.symmetry_table) {
    SymKey nk = k;
    nk.op = send.at({k.sig, k.op});
    c.symmetry_table[nk] = send.at({k.sig.permuted(k.sigma), v});
  }
  out.projection.source = q;
  out.projection.target = c;
  out.projection.colour_map = detail::identity_cmap(q.colours);
  for (const auto& [key, name] : send) out.projection.components[key.first][key.second] = name;
  return out;
}

// ---------------------------------------------------------------------------
// Pullbacks

struct PullbackResult {
  FinOperad operad;
  OperadMorphism to_p;  // first projection
  OperadMorphism to_q;  // second projection
};

inline PullbackResult pullback(const OperadMorphism& phi, const OperadMorphism& psi) {
  if (!(phi.target == psi.target)) throw Error("SchemaError", "pullback needs a cospan");
  const FinOperad& p = phi.source;
  const FinOperad& q = psi.source;
  PullbackResult out;
  FinOperad& r = out.operad;
  r.variant = p.variant;
  r.max_valence = std::min(p.max_valence, q.max_valence);
  std::map<Colour, std::pair<Colour, Colour>> legs;
  for (const auto& a : p.colours)
    for (const auto& b : q.colours)
      if (phi.map_colour(a) == psi.map_colour(b)) {
        Colour c{a.id + "__" + b.id};
        r.colours.push_back(c);
        legs[c] = {a, b};
      }
  std::sort(r.colours.begin(), r.colours.end());
  auto proj = [&](const Signature& s, bool first) {
    Signature t;
    t.output = first ? legs.at(s.output).first : legs.at(s.output).second;
    for (const auto& c : s.inputs) t.inputs.push_back(first ? legs.at(c).first : legs.at(c).second);
    return t;
  };
  OperadRules rules;
  rules.ops = [&](const Signature& s) {
    std::vector<OpId> ops;
    Signature sp = proj(s, true), sq = proj(s, false);
    for (const auto& x : p.component(sp))
      for (const auto& y : q.component(sq))
        if (phi.map_op(sp, x) == psi.map_op(sq, y)) ops.push_back(x + "__" + y);
    return ops;
  };
  auto split = [](const OpId& op) {
    auto pos = op.find("__");
    return std::make_pair(op.substr(0, pos), op.substr(pos + 2));
  };
  rules.unit = [&](const Colour& c) {
    return p.unit(legs.at(c).first) + "__" + q.unit(legs.at(c).second);
  };
  rules.sym = [&](const Signature& s, const Perm& sigma, const OpId& op) {
    auto [x, y] = split(op);
    return p.sym(proj(s, true), sigma, x) + "__" + q.sym(proj(s, false), sigma, y);
  };
  rules.compose = [&](const Signature& s, const std::vector<Signature>& ts, const OpId& op,
                      const std::vector<OpId>& ops) {
    auto [x, y] = split(op);
    std::vector<Signature> tp, tq;
    std::vector<OpId> xp, yq;
    for (size_t i = 0; i < ts.size(); ++i) {
      tp.push_back(proj(ts[i], true));
      tq.push_back(proj(ts[i], false));
      auto [a, b] = split(ops[i]);
      xp.push_back(a);
      yq.push_back(b);
    }
    return p.compose(proj(s, true), tp, x, xp) + "__" + q.compose(proj(s, false), tq, y, yq);
  };
  r = materialize_operad(r.colours, r.variant, r.max_valence, rules);
  out.to_p.source = r;
  out.to_p.target = p;
  out.to_q.source = r;
  out.to_q.target = q;
  for (const auto& c : r.colours) {
    out.to_p.colour_map[c] = legs.at(c).first;
    out.to_q.colour_map[c] = legs.at(c).second;
  }
  for (const auto& [s, ops] : r.components)
    for (const auto& op : ops) {
      auto [x, y] = split(op);
      out.to_p.components[s][op] = x;
      out.to_q.components[s][op] = y;
    }
  return out;
}

// ---------------------------------------------------------------------------
// Filtered colimits via the comma-category formula

struct DiagramArrow {
  std::string name;
  std::string src, dst;
  OperadMorphism mor;
};

struct Diagram {
  std::map<std::string, FinOperad> objects;
  std::vector<DiagramArrow> arrows;  // identities implicit
  // composition["g|f"] = name of g o f, for composable non-identity arrows
  std::map<std::string, std::string> composition;

  const DiagramArrow* arrow(const std::string& name) const {
    for (const auto& a : arrows)
      if (a.name == name) return &a;
    return nullptr;
  }
  std::string compose_names(const std::string& g, const std::string& f) const {
    if (f == "id") return g;
    if (g == "id") return f;
    auto it = composition.find(g + "|" + f);
    if (it == composition.end()) throw Error("SchemaError", "missing composite " + g + " o " + f);
    return it->second;
  }
};

inline AxiomReport validate_diagram(const Diagram& d) {
  AxiomReport rep;
  for (const auto& a : d.arrows) {
    if (!d.objects.count(a.src) || !d.objects.count(a.dst)) {
      rep.add("arrow", a.name + " references an unknown object");
      continue;
    }
    if (!(a.mor.source == d.objects.at(a.src)) || !(a.mor.target == d.objects.at(a.dst)))
      rep.add("arrow", a.name + " does not match its endpoints");
    auto r = validate_morphism(a.mor);
    for (const auto& v : r.violations) rep.add("arrow_" + v.kind, a.name + ": " + v.detail);
  }
  // composition closure and functoriality
  for (const auto& g : d.arrows)
    for (const auto& f : d.arrows) {
      if (f.dst != g.src) continue;
      auto it = d.composition.find(g.name + "|" + f.name);
      if (it == d.composition.end()) {
        rep.add("composition", "missing " + g.name + " o " + f.name);
        continue;
      }
      const DiagramArrow* gf = d.arrow(it->second);
      if (!gf || gf->src != f.src || gf->dst != g.dst) {
        rep.add("composition", "bad composite " + it->second);
        continue;
      }
      auto comp = compose_morphisms(g.mor, f.mor);
      if (!(comp.colour_map == gf->mor.colour_map && comp.components == gf->mor.components))
        rep.add("functoriality", g.name + " o " + f.name + " != " + it->second);
    }
  return rep;
}

inline bool diagram_is_filtered(const Diagram& d) {
  if (d.objects.empty()) return false;
  // arrows between a pair, including identities
  auto homs = [&](const std::string& i, const std::string& j) {
    std::vector<std::string> out;
    if (i == j) out.push_back("id");
    for (const auto& a : d.arrows)
      if (a.src == i && a.dst == j) out.push_back(a.name);
    return out;
  };
  for (const auto& [i, oi] : d.objects)
    for (const auto& [j, oj] : d.objects) {
      bool cocone = false;
      for (const auto& [k, ok] : d.objects)
        if (!homs(i, k).empty() && !homs(j, k).empty()) cocone = true;
      if (!cocone) return false;
      // parallel pairs must be equalized further on
      for (const auto& f : homs(i, j))
        for (const auto& g : homs(i, j)) {
          if (f == g) continue;
          bool eq = false;
          for (const auto& [k, ok] : d.objects)
            for (const auto& h : homs(j, k))
              if (d.compose_names(h, f) == d.compose_names(h, g)) eq = true;
          if (!eq) return false;
        }
    }
  return true;
}

struct FilteredColimitResult {
  FinOperad operad;
  std::map<std::string, OperadMorphism> cocone;  // object -> morphism into the colimit
  std::map<std::pair<std::string, Colour>, Colour> colour_class;
};

// The colimit of a finite filtered diagram: the colour set is the colimit of
// colour sets and each component is computed by the comma-category formula
// over a representative; the operad structure is induced through the
// canonical maps.
inline FilteredColimitResult filtered_colimit(const Diagram& d, int max_valence = 4) {
  {
    auto rep = validate_diagram(d);
    if (!rep.pass()) throw Error("SchemaError", "invalid diagram: " + rep.summary());
    if (!diagram_is_filtered(d)) throw Error("NotFiltered", "index category is not filtered");
  }
  std::vector<std::string> objs;
  for (const auto& [name, o] : d.objects) objs.push_back(name);

  // colour colimit
  std::vector<std::pair<std::string, Colour>> tagged;
  std::map<std::pair<std::string, Colour>, int> tag_idx;
  for (const auto& i : objs)
    for (const auto& c : d.objects.at(i).colours) {
      tag_idx[{i, c}] = static_cast<int>(tagged.size());
      tagged.emplace_back(i, c);
    }
  UnionFind cuf(static_cast<int>(tagged.size()));
  for (const auto& a : d.arrows)
    for (const auto& c : a.mor.source.colours)
      cuf.unite(tag_idx.at({a.src, c}), tag_idx.at({a.dst, a.mor.map_colour(c)}));
  std::map<int, Colour> class_colour;
  std::map<std::pair<std::string, Colour>, Colour> colour_class;
  std::vector<Colour> colim_colours;
  for (size_t t = 0; t < tagged.size(); ++t) {
    int root = cuf.find(static_cast<int>(t));
    if (!class_colour.count(root)) {
      Colour name{"k" + std::to_string(class_colour.size())};
      class_colour[root] = name;
      colim_colours.push_back(name);
    }
    colour_class[tagged[t]] = class_colour[root];
  }

  // comma category over a chosen base object: arrows out of `base`
  // (including the identity) with their targets
  const std::string base = objs.front();
  struct CommaObj {
    std::string arrow;  // "id" or an arrow name
    std::string obj;
  };
  std::vector<CommaObj> comma{{"id", base}};
  for (const auto& a : d.arrows)
    if (a.src == base) comma.push_back({a.name, a.dst});
  auto push_sig = [&](const std::string& obj, const Signature& s) {
    Signature r;
    r.output = colour_class.at({obj, s.output});
    for (const auto& c : s.inputs) r.inputs.push_back(colour_class.at({obj, c}));
    return r;
  };
  auto comma_target = [&](const std::string& arrow) {
    return arrow == "id" ? base : d.arrow(arrow)->dst;
  };

  // find a representative (object, signature) for every colimit signature;
  // by filteredness one exists whenever the component is non-empty anywhere
  FinOperad colim;
  colim.colours = colim_colours;
  colim.variant = d.objects.at(base).variant;
  colim.max_valence = max_valence;

  struct Element {
    std::string comma_arrow;
    Signature sig;  // in the comma target's colours
    OpId op;
  };
  // per colimit signature: elements and their classes
  std::map<Signature, std::vector<Element>> elems;
  std::map<Signature, std::vector<int>> elem_class;
  std::map<Signature, int> n_classes;

  auto sigs = all_signatures(colim_colours, max_valence, colim.variant == Variant::reduced);
  for (const auto& S : sigs) {
    // gather elements over the comma category of `base`
    std::vector<Element> es;
    for (const auto& co : comma) {
      const FinOperad& L = d.objects.at(co.obj);
      for (const auto& [s, ops] : L.components) {
        if (!(push_sig(co.obj, s) == S)) continue;
        for (const auto& op : ops) es.push_back({co.arrow, s, op});
      }
    }
    UnionFind uf(static_cast<int>(es.size()));
    auto find_elem = [&](const std::string& arrow, const Signature& s, const OpId& op) {
      for (size_t i = 0; i < es.size(); ++i)
        if (es[i].comma_arrow == arrow && es[i].sig == s && es[i].op == op) return static_cast<int>(i);
      return -1;
    };
    // comma arrows g : (j, f_j) -> (z, f_z) with g o f_j = f_z
    for (size_t i = 0; i < es.size(); ++i) {
      std::string jobj = es[i].comma_arrow == "id" ? base : d.arrow(es[i].comma_arrow)->dst;
      for (const auto& g : d.arrows) {
        if (g.src != jobj) continue;
        std::string gz = d.compose_names(g.name, es[i].comma_arrow);
        int other = find_elem(gz, g.mor.map_signature(es[i].sig), g.mor.map_op(es[i].sig, es[i].op));
        if (other >= 0) uf.unite(static_cast<int>(i), other);
      }
    }
    std::vector<int> cls(es.size());
    std::map<int, int> renum;
    int n = 0;
    for (size_t i = 0; i < es.size(); ++i) {
      int root = uf.find(static_cast<int>(i));
      if (!renum.count(root)) renum[root] = n++;
      cls[i] = renum[root];
    }
    if (n > 0) {
      std::vector<OpId> ids;
      for (int c = 0; c < n; ++c) ids.push_back("k" + std::to_string(c));
      colim.components[S] = ids;
    }
    elems[S] = std::move(es);
    elem_class[S] = std::move(cls);
    n_classes[S] = n;
  }

  auto class_of = [&](const std::string& obj, const Signature& s, const OpId& op,
                      const Signature& S) -> OpId {
    // transport (obj, s, op) into the comma category: find an arrow from
    // base to a common refinement
    const auto& es = elems.at(S);
    for (size_t i = 0; i < es.size(); ++i) {
      if (comma_target(es[i].comma_arrow) == obj && es[i].sig == s && es[i].op == op)
        return "k" + std::to_string(elem_class.at(S)[i]);
    }
    // push forward along arrows out of obj until an element matches
    for (const auto& a : d.arrows) {
      if (a.src != obj) continue;
      for (size_t i = 0; i < es.size(); ++i) {
        if (comma_target(es[i].comma_arrow) == a.dst && es[i].sig == a.mor.map_signature(s) &&
            es[i].op == a.mor.map_op(s, op))
          return "k" + std::to_string(elem_class.at(S)[i]);
      }
    }
    throw Error("InternalError", "element failed to land in the colimit at " + S.key());
  };

  // structure maps through common representatives
  for (const auto& c : colim_colours) {
    // a representative (i, (v;v)) of (c;c)
    bool done = false;
    for (const auto& co : comma) {
      const FinOperad& L = d.objects.at(co.obj);
      for (const auto& lc : L.colours) {
        if (!(colour_class.at({co.obj, lc}) == c)) continue;
        colim.units[c] = class_of(co.obj, Signature{{lc}, lc}, L.unit(lc), Signature{{c}, c});
        done = true;
        break;
      }
      if (done) break;
    }
  }
  auto nonempty = [&](const Signature& s) { return colim.components.count(s) > 0; };
  for (const auto& [S, ids] : colim.components) {
    if (colim.variant != Variant::nonsymmetric) {
      for (const auto& sigma : all_perms(S.valence()))
        for (size_t i = 0; i < elems.at(S).size(); ++i) {
          const auto& e = elems.at(S)[i];
          std::string obj = comma_target(e.comma_arrow);
          const Signature& s = e.sig;
          const OpId& op = e.op;
          const FinOperad& L = d.objects.at(obj);
          OpId cur = "k" + std::to_string(elem_class.at(S)[i]);
          SymKey key{S, sigma, cur};
          if (colim.symmetry_table.count(key)) continue;
          colim.symmetry_table[key] = class_of(obj, s.permuted(sigma), L.sym(s, sigma, op), S.permuted(sigma));
        }
    }
    for_each_composable(sigs, S, max_valence, nonempty, [&](const std::vector<Signature>& ts) {
      Signature R = compose_signatures(S, ts);
      // fill entries through comma objects, trying every local preimage of
      // each class until a composable combination appears
      for (const auto& co : comma) {
        const FinOperad& L = d.objects.at(co.obj);
        auto locals = [&](const Signature& Sig) {
          std::map<OpId, std::vector<std::pair<Signature, OpId>>> m;
          for (const auto& [s, ops] : L.components) {
            if (!(push_sig(co.obj, s) == Sig)) continue;
            for (const auto& op : ops) m[class_of(co.obj, s, op, Sig)].emplace_back(s, op);
          }
          return m;
        };
        auto mo = locals(S);
        std::vector<std::map<OpId, std::vector<std::pair<Signature, OpId>>>> mi;
        for (const auto& t : ts) mi.push_back(locals(t));
        std::vector<OpId> pick(ts.size());
        std::function<void(size_t)> rec = [&](size_t i) {
          if (i == ts.size()) {
            for (const auto& [cls, reps] : mo) {
              ComposeKey key{S, cls, ts, pick};
              if (colim.compose_table.count(key)) continue;
              bool missing_slot = false;
              for (size_t j = 0; j < ts.size(); ++j)
                if (!mi[j].count(pick[j])) missing_slot = true;
              if (missing_slot) continue;
              // search composable local representatives
              std::vector<std::pair<Signature, OpId>> chosen(ts.size());
              std::function<bool(const std::pair<Signature, OpId>&, size_t)> fit =
                  [&](const std::pair<Signature, OpId>& outer, size_t j) -> bool {
                if (j == ts.size()) {
                  std::vector<Signature> lts;
                  std::vector<OpId> lops;
                  for (const auto& [s2, op2] : chosen) {
                    lts.push_back(s2);
                    lops.push_back(op2);
                  }
                  OpId got;
                  try {
                    got = L.compose(outer.first, lts, outer.second, lops);
                  } catch (const Error&) {
                    return false;
                  }
                  colim.compose_table[ComposeKey{S, cls, ts, pick}] =
                      class_of(co.obj, compose_signatures(outer.first, lts), got, R);
                  return true;
                }
                for (const auto& cand : mi[j].at(pick[j])) {
                  if (!(cand.first.output == outer.first.inputs[j])) continue;
                  chosen[j] = cand;
                  if (fit(outer, j + 1)) return true;
                }
                return false;
              };
              for (const auto& outer : reps)
                if (fit(outer, 0)) break;
            }
            return;
          }
          for (const auto& cls : colim.components.at(ts[i])) {
            pick[i] = cls;
            rec(i + 1);
          }
        };
        rec(0);
      }
    });
  }

  FilteredColimitResult out;
  out.operad = colim;
  out.colour_class = colour_class;
  for (const auto& i : objs) {
    OperadMorphism eta;
    eta.source = d.objects.at(i);
    eta.target = colim;
    for (const auto& c : eta.source.colours) eta.colour_map[c] = colour_class.at({i, c});
    for (const auto& [s, ops] : eta.source.components)
      for (const auto& op : ops) eta.components[s][op] = class_of(i, s, op, push_sig(i, s));
    out.cocone[i] = std::move(eta);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Bifibration colimits: colour colimit first, then the fiber computation

struct GeneralPushoutResult {
  MaterializedPushout fiber;           // over the pushout colour set
  std::map<Colour, Colour> colours_x;  // Cl(F_x) -> ambient
  std::map<Colour, Colour> colours_y;
};

// Push-out over varying colour sets: glue the colour sets along the apex,
// take direct-image-style relabelings through the saturation marks.
struct GeneralPushoutConfig {
  SaturationConfig cfg;
  std::map<Colour, Colour> colours_x, colours_y;
};

inline GeneralPushoutConfig general_pushout_config(const FinOperad& apex, const OperadMorphism& f,
                                                   const OperadMorphism& g) {
  if (!(f.source == apex) || !(g.source == apex)) throw Error("SchemaError", "legs must share the apex");
  // colour pushout
  std::vector<std::pair<int, Colour>> tagged;  // 0: F_x colours, 1: F_y colours
  std::map<std::pair<int, Colour>, int> idx;
  for (const auto& c : f.target.colours) {
    idx[{0, c}] = static_cast<int>(tagged.size());
    tagged.emplace_back(0, c);
  }
  for (const auto& c : g.target.colours) {
    idx[{1, c}] = static_cast<int>(tagged.size());
    tagged.emplace_back(1, c);
  }
  UnionFind cuf(static_cast<int>(tagged.size()));
  for (const auto& c : apex.colours) cuf.unite(idx.at({0, f.map_colour(c)}), idx.at({1, g.map_colour(c)}));
  std::map<int, Colour> cname;
  std::vector<Colour> ambient;
  std::map<std::pair<int, Colour>, Colour> amb_of;
  for (size_t t = 0; t < tagged.size(); ++t) {
    int root = cuf.find(static_cast<int>(t));
    if (!cname.count(root)) {
      Colour n{"g" + std::to_string(cname.size())};
      cname[root] = n;
      ambient.push_back(n);
    }
    amb_of[tagged[t]] = cname[root];
  }
  GeneralPushoutConfig out;
  out.cfg.ambient = ambient;
  out.cfg.planar_moves = apex.variant != Variant::nonsymmetric;
  std::map<Colour, Colour> oo;
  for (const auto& c : f.target.colours) out.colours_x[c] = amb_of.at({0, c});
  for (const auto& c : g.target.colours) out.colours_y[c] = amb_of.at({1, c});
  for (const auto& c : apex.colours) oo[c] = amb_of.at({0, f.map_colour(c)});
  out.cfg.marks = {{"o", AmbientMark{true, apex, {}, oo}},
                   {"x", AmbientMark{true, f.target, {}, out.colours_x}},
                   {"y", AmbientMark{true, g.target, {}, out.colours_y}}};
  out.cfg.moves = {detail::move_of_morphism("o", "x", f), detail::move_of_morphism("o", "y", g)};
  return out;
}

inline GeneralPushoutResult pushout_general(const FinOperad& apex, const OperadMorphism& f,
                                            const OperadMorphism& g, int bound, int valence_cap = -1) {
  auto built = general_pushout_config(apex, f, g);
  SaturationConfig& cfg = built.cfg;
  const std::vector<Colour>& ambient = cfg.ambient;
  const std::map<Colour, Colour>& ox = built.colours_x;
  const std::map<Colour, Colour>& oy = built.colours_y;

  GeneralPushoutResult out;
  out.colours_x = ox;
  out.colours_y = oy;
  // materialize over the ambient colours, mirroring materialize_pushout
  MaterializedPushout& mp = out.fiber;
  FinOperad& z = mp.operad;
  z.colours = ambient;
  z.variant = apex.variant;
  z.max_valence = std::min(f.target.max_valence, g.target.max_valence);
  if (valence_cap >= 0) z.max_valence = std::min(z.max_valence, valence_cap);
  for (const auto& S : all_signatures(ambient, z.max_valence, z.variant == Variant::reduced)) {
    auto sat = saturate_with_certificate(cfg, S, bound);
    mp.exact = mp.exact && sat.exact;
    if (sat.n_classes > 0) {
      std::vector<OpId> ids;
      for (int c = 0; c < sat.n_classes; ++c) ids.push_back("z" + std::to_string(c));
      z.components[S] = ids;
    }
    mp.saturations[S] = std::move(sat);
  }
  for (const auto& c : ambient) {
    const auto& sat = mp.saturations.at(Signature{{c}, c});
    auto form = detail::canon_form_of(empty_tree(c), {});
    z.units[c] = "z" + std::to_string(sat.class_of[sat.index_of.at(form)]);
  }
  auto rep_of = [&](const Signature& S, int c) -> const DecoratedState& {
    const auto& sat = mp.saturations.at(S);
    const DecoratedState* best = nullptr;
    for (size_t i = 0; i < sat.states.size(); ++i) {
      if (sat.class_of[i] != c) continue;
      if (!best || sat.states[i].shape.tree.vertices.size() < best->shape.tree.vertices.size())
        best = &sat.states[i];
    }
    if (!best) throw Error("InternalError", "empty class");
    return *best;
  };
  auto nonempty = [&](const Signature& s) { return z.components.count(s) > 0; };
  auto sigs = all_signatures(ambient, z.max_valence, z.variant == Variant::reduced);
  for (const auto& [S, ids] : z.components) {
    const auto& sat = mp.saturations.at(S);
    if (z.variant != Variant::nonsymmetric) {
      for (const auto& sigma : all_perms(S.valence()))
        for (int c = 0; c < sat.n_classes; ++c) {
          const auto& rep = rep_of(S, c);
          OMTree t = rep.shape;
          t.leaf_order = perm_apply_positions(rep.shape.leaf_order, sigma);
          const auto& tsat = mp.saturations.at(S.permuted(sigma));
          auto it = tsat.index_of.find(detail::canon_form_of(t, rep.dec));
          if (it == tsat.index_of.end()) throw Error("InternalError", "symmetry left the window");
          z.symmetry_table[SymKey{S, sigma, "z" + std::to_string(c)}] =
              "z" + std::to_string(tsat.class_of[it->second]);
        }
    }
    for_each_composable(sigs, S, z.max_valence, nonempty, [&](const std::vector<Signature>& ts) {
      Signature r = compose_signatures(S, ts);
      const auto& rsat = mp.saturations.at(r);
      std::vector<OpId> pick(ts.size());
      std::function<void(size_t)> rec = [&](size_t i) {
        if (i == ts.size()) {
          for (int c = 0; c < sat.n_classes; ++c) {
            const auto& outer = rep_of(S, c);
            std::vector<OMTree> shapes;
            std::vector<LocalDec> dec = outer.dec;
            for (size_t j = 0; j < ts.size(); ++j) {
              const auto& repj = rep_of(ts[j], std::stoi(pick[j].substr(1)));
              shapes.push_back(repj.shape);
              dec.insert(dec.end(), repj.dec.begin(), repj.dec.end());
            }
            OMTree gg = graft(outer.shape, outer.shape.leaf_order, shapes);
            int cls = detail::find_class(cfg, rsat, gg, dec);
            z.compose_table[ComposeKey{S, "z" + std::to_string(c), ts, pick}] = "z" + std::to_string(cls);
          }
          return;
        }
        for (const auto& x : z.components.at(ts[i])) {
          pick[i] = x;
          rec(i + 1);
        }
      };
      rec(0);
    });
  }
  // feet
  mp.p.source = truncate_operad(f.target, z.max_valence);
  mp.p.target = z;
  mp.p.colour_map = ox;
  for (const auto& [s, ops] : f.target.components) {
    if (s.valence() > z.max_valence) continue;
    Signature S = mp.p.map_signature(s);
    const auto& sat = mp.saturations.at(S);
    for (const auto& op : ops) {
      std::vector<Colour> din;
      for (const auto& c : s.inputs) din.push_back(ox.at(c));
      OMTree t = corolla(din, ox.at(s.output), "x");
      std::vector<LocalDec> dec{{s, op}};
      mp.p.components[s][op] =
          "z" + std::to_string(sat.class_of[sat.index_of.at(detail::canon_form_of(t, dec))]);
    }
  }
  mp.q.source = truncate_operad(g.target, z.max_valence);
  mp.q.target = z;
  mp.q.colour_map = oy;
  for (const auto& [s, ops] : g.target.components) {
    if (s.valence() > z.max_valence) continue;
    Signature S = mp.q.map_signature(s);
    const auto& sat = mp.saturations.at(S);
    for (const auto& op : ops) {
      std::vector<Colour> din;
      for (const auto& c : s.inputs) din.push_back(oy.at(c));
      OMTree t = corolla(din, oy.at(s.output), "y");
      std::vector<LocalDec> dec{{s, op}};
      mp.q.components[s][op] =
          "z" + std::to_string(sat.class_of[sat.index_of.at(detail::canon_form_of(t, dec))]);
    }
  }
  return out;
}

inline FinOperad coproduct_operads(const FinOperad& a, const FinOperad& b, const std::string& pa = "l_",
                                   const std::string& pb = "r_") {
  FinOperad o;
  o.variant = a.variant;
  o.max_valence = std::min(a.max_valence, b.max_valence);
  auto rename = [](const FinOperad& src, const std::string& prefix, FinOperad& dst) {
    auto rc = [&](const Colour& c) { return Colour{prefix + c.id}; };
    auto rs = [&](const Signature& s) {
      Signature r;
      r.output = rc(s.output);
      for (const auto& c : s.inputs) r.inputs.push_back(rc(c));
      return r;
    };
    for (const auto& c : src.colours) dst.colours.push_back(rc(c));
    for (const auto& [s, ops] : src.components) dst.components[rs(s)] = ops;
    for (const auto& [c, u] : src.units) dst.units[rc(c)] = u;
    for (const auto& [k, v] : src.compose_table) {
      ComposeKey nk;
      nk.outer = rs(k.outer);
      nk.outer_op = k.outer_op;
      for (const auto& t : k.inner) nk.inner.push_back(rs(t));
      nk.inner_ops = k.inner_ops;
      dst.compose_table[nk] = v;
    }
    for (const auto& [k, v] : src.symmetry_table)
      dst.symmetry_table[SymKey{rs(k.sig), k.sigma, k.op}] = v;
  };
  rename(a, pa, o);
  rename(b, pb, o);
  std::sort(o.colours.begin(), o.colours.end());
  return o;
}

enum class ColimitShape { pushout, filtered, coequalizer };

struct BifibrationColimitResult {
  FinOperad operad;
  bool exact = true;
  std::vector<OperadMorphism> cocone;
};

// Compute the colour-set colimit first, then the fiber colimit of the
// direct images.
inline BifibrationColimitResult bifibration_colimit(ColimitShape shape, const FinOperad& apex,
                                                    const std::vector<OperadMorphism>& legs,
                                                    int bound = 4, int valence_cap = -1) {
  BifibrationColimitResult out;
  switch (shape) {
    case ColimitShape::pushout: {
      if (legs.size() != 2) throw Error("UnsupportedShape", "pushout needs two legs");
      auto r = pushout_general(apex, legs[0], legs[1], bound, valence_cap);
      out.operad = r.fiber.operad;
      out.exact = r.fiber.exact;
      out.cocone = {r.fiber.p, r.fiber.q};
      return out;
    }
    case ColimitShape::coequalizer: {
      // coeq(f,g) = pushout of [f,g] : P + P -> Q along the fold P + P -> P
      if (legs.size() != 2) throw Error("UnsupportedShape", "coequalizer needs a parallel pair");
      const OperadMorphism& f = legs[0];
      const OperadMorphism& g = legs[1];
      if (!(f.source == g.source) || !(f.target == g.target))
        throw Error("UnsupportedShape", "coequalizer needs a parallel pair");
      FinOperad pp = coproduct_operads(f.source, f.source);
      OperadMorphism fold;
      fold.source = pp;
      fold.target = f.source;
      OperadMorphism mix;
      mix.source = pp;
      mix.target = f.target;
      for (const auto& c : f.source.colours) {
        fold.colour_map[Colour{"l_" + c.id}] = c;
        fold.colour_map[Colour{"r_" + c.id}] = c;
        mix.colour_map[Colour{"l_" + c.id}] = f.map_colour(c);
        mix.colour_map[Colour{"r_" + c.id}] = g.map_colour(c);
      }
      auto strip = [](const Signature& s, const std::string& prefix) {
        Signature r;
        r.output = Colour{s.output.id.substr(prefix.size())};
        for (const auto& c : s.inputs) r.inputs.push_back(Colour{c.id.substr(prefix.size())});
        return r;
      };
      for (const auto& [s, ops] : pp.components) {
        bool left = s.output.id.rfind("l_", 0) == 0;
        Signature plain = strip(s, left ? "l_" : "r_");
        for (const auto& op : ops) {
          fold.components[s][op] = op;
          mix.components[s][op] = left ? f.map_op(plain, op) : g.map_op(plain, op);
        }
      }
      auto r = pushout_general(pp, mix, fold, bound, valence_cap);
      out.operad = r.fiber.operad;
      out.exact = r.fiber.exact;
      out.cocone = {r.fiber.p};  // the quotient map Q -> coeq
      return out;
    }
    case ColimitShape::filtered:
      throw Error("UnsupportedShape", "use filtered_colimit for a filtered diagram");
  }
  throw Error("UnsupportedShape", "unknown shape");
}

// ---------------------------------------------------------------------------
// Fully-faithful push-outs

inline bool is_fully_faithful(const OperadMorphism& m) {
  // componentwise bijections onto the inverse image
  for (const auto& s : all_signatures(m.source.colours, m.source.max_valence,
                                      m.source.variant == Variant::reduced)) {
    Signature fs = m.map_signature(s);
    if (fs.valence() > m.target.max_valence) continue;
    const auto& src = m.source.component(s);
    const auto& tgt = m.target.component(fs);
    if (src.size() != tgt.size()) return false;
    std::set<OpId> img;
    for (const auto& op : src) img.insert(m.map_op(s, op));
    if (img.size() != src.size()) return false;
  }
  return true;
}

inline bool colour_injective(const OperadMorphism& m) {
  std::set<Colour> img;
  for (const auto& c : m.source.colours) img.insert(m.map_colour(c));
  return img.size() == m.source.colours.size();
}

struct FullyFaithfulReport {
  bool hypotheses_ok = false;
  bool exact = false;
  bool h_colour_injective = false;
  bool h_fully_faithful = false;
  std::string detail;
};

// Push out a fully faithful colour-injective i : A -> B along a
// colour-injective f : A -> P and check that the induced P -> Q is again a
// fully-faithful colour-injective morphism. The normal-form argument (the
// P-marked corolla is initial) appears as the per-class corolla count.
inline FullyFaithfulReport pushout_fully_faithful(const FinOperad& apex, const OperadMorphism& i,
                                                  const OperadMorphism& f, int bound,
                                                  int valence_cap = -1) {
  FullyFaithfulReport rep;
  if (!colour_injective(i) || !colour_injective(f) || !is_fully_faithful(i)) {
    rep.detail = "HypothesisViolated";
    return rep;
  }
  rep.hypotheses_ok = true;
  auto built = general_pushout_config(apex, f, i);  // x = P, y = B
  int cap = valence_cap >= 0 ? std::min({valence_cap, f.target.max_valence, i.target.max_valence})
                             : std::min(f.target.max_valence, i.target.max_valence);
  rep.exact = true;
  {
    std::set<Colour> img;
    for (const auto& [c, d] : built.colours_x) img.insert(d);
    rep.h_colour_injective = img.size() == f.target.colours.size();
  }
  rep.h_fully_faithful = true;
  for (const auto& s : all_signatures(f.target.colours, cap, f.target.variant == Variant::reduced)) {
    Signature S;
    S.output = built.colours_x.at(s.output);
    for (const auto& c : s.inputs) S.inputs.push_back(built.colours_x.at(c));
    auto sat = saturate_with_certificate(built.cfg, S, bound);
    rep.exact = rep.exact && sat.exact;
    // every class over a P-signature must contain exactly one P-corolla
    std::map<int, int> corollas;
    for (size_t st = 0; st < sat.states.size(); ++st) {
      const auto& state = sat.states[st];
      if (state.shape.tree.vertices.size() == 1 && state.shape.marks[0] == "x" &&
          perm_is_identity(twisting(state.shape)))
        corollas[sat.class_of[st]]++;
    }
    size_t expected = f.target.component(s).size();
    // the class count must equal |P(s)| and each class holds one corolla
    size_t total = 0;
    for (const auto& [c, n] : corollas) {
      if (n != 1) rep.h_fully_faithful = false;
      ++total;
    }
    if (static_cast<size_t>(sat.n_classes) != expected || total != expected)
      rep.h_fully_faithful = false;
  }
  if (!rep.exact) rep.detail = "Unstabilized";
  return rep;
}

// ---------------------------------------------------------------------------
// Free-map push-out filtration (punctured cubes and orbit quotients)

struct FiltrationOrbit {
  OMTree tree;  // representative, canonical with planar structure free at X
  int aut_size = 1;
  std::vector<long> corner_sizes;  // indexed by the 2^n cube corners
  long punctured_size = 0;
  std::vector<std::pair<OMTree, std::vector<LocalDec>>> new_reps;  // one per new orbit
};

struct FiltrationStage {
  int n = 0;
  std::vector<FiltrationOrbit> orbits;
  long new_classes = 0;
};

struct FiltrationResult {
  std::vector<FiltrationStage> stages;
  long total_classes = 0;
  long pushout_classes = 0;
  bool pushout_exact = false;
  bool agrees = false;
  std::string detail;
};

namespace detail {

// automorphisms of an ordered marked tree: label-, mark- and leaf-order-
// preserving, planar-rigid at vertices where `rigid` holds
struct MarkedAut {
  std::vector<int> edge_map;
  std::map<int, Perm> child_perm;  // per non-rigid vertex
};

inline std::vector<MarkedAut> marked_automorphisms(const OMTree& t,
                                                   const std::function<bool(int)>& rigid) {
  std::vector<MarkedAut> out;
  std::vector<int> pos(t.tree.n_edges, -1);
  for (size_t i = 0; i < t.leaf_order.size(); ++i) pos[t.leaf_order[i]] = static_cast<int>(i);

  // exhaustive over all combinations of child permutations at the
  // non-rigid vertices; each combination determines at most one self-map
  std::vector<int> free_vs;
  for (size_t v = 0; v < t.tree.vertices.size(); ++v)
    if (!rigid(static_cast<int>(v)) && t.tree.vertices[v].in_edges.size() >= 2)
      free_vs.push_back(static_cast<int>(v));
  std::map<int, Perm> forced;
  std::function<void(size_t)> assign = [&](size_t i) {
    if (i == free_vs.size()) {
      // deterministic match with forced child permutations
      MarkedAut attempt;
      attempt.edge_map.assign(t.tree.n_edges, -1);
      std::function<bool(int, int)> m2 = [&](int ea, int eb) -> bool {
        if (!(t.labels[ea] == t.labels[eb])) return false;
        int va = t.tree.vertex_above(ea), vb = t.tree.vertex_above(eb);
        if ((va < 0) != (vb < 0)) return false;
        attempt.edge_map[ea] = eb;
        if (va < 0) return pos[ea] == pos[eb];
        if (t.marks[va] != t.marks[vb]) return false;
        const auto& ia = t.tree.vertices[va].in_edges;
        const auto& ib = t.tree.vertices[vb].in_edges;
        if (ia.size() != ib.size()) return false;
        Perm p = perm_identity(static_cast<int>(ia.size()));
        auto it = forced.find(va);
        if (it != forced.end()) p = it->second;
        if (it != forced.end()) attempt.child_perm[va] = p;
        for (size_t j = 0; j < ia.size(); ++j)
          if (!m2(ia[j], ib[p[j]])) return false;
        return true;
      };
      if (m2(t.tree.root, t.tree.root)) out.push_back(attempt);
      return;
    }
    int v = free_vs[i];
    for (const auto& p : all_perms(static_cast<int>(t.tree.vertices[v].in_edges.size()))) {
      forced[v] = p;
      assign(i + 1);
    }
    forced.erase(free_vs[i]);
  };
  assign(0);
  return out;
}

}  // namespace detail

// Appendix-C filtration of the push-out of X along the free map on a local
// injection i : K0 -> K1 attached by alpha : K0 -> U(X). Stage n carries
// the minimal trees with exactly n non-X vertices; the stage map is the
// punctured-cube inclusion, assembled as a coproduct of orbit quotients.
// The result is compared class-by-class with the saturation push-out.
inline FiltrationResult free_pushout_filtration(const FinOperad& x, const MultiGraphMorphism& inj,
                                                const MultiGraphMorphism& alpha, const Signature& S,
                                                int n_max, int bound, int stage_vertex_cap = 5) {
  // preconditions: identity colour maps, i componentwise injective
  const MultiGraph& k0 = inj.source;
  const MultiGraph& k1 = inj.target;
  if (k0.colours != k1.colours || k0.colours != x.colours)
    throw Error("SchemaError", "filtration expects one fiber");
  for (const auto& [s, ops] : k0.components) {
    std::set<OpId> img;
    for (const auto& op : ops) img.insert(inj.map_op(s, op));
    if (img.size() != ops.size()) throw Error("SchemaError", "i must be a local injection");
  }
  if (!validate_multigraph_morphism(inj).pass() || !validate_multigraph_morphism(alpha).pass())
    throw Error("SchemaError", "invalid filtration data");

  // i-image per K1 component, for the new/old split
  std::map<Signature, std::set<OpId>> image;
  for (const auto& [s, ops] : k0.components)
    for (const auto& op : ops) image[s].insert(inj.map_op(s, op));

  auto rigid_at_k1 = [](const OMTree& t) {
    return [&t](int v) { return t.marks[v] == "K1"; };
  };

  // enumerate candidate marked trees (no decorations yet): labels over the
  // fiber colours, marks in {X, K1}, components non-empty at each vertex
  EnumTreeOptions topt;
  int max_ar = 0;
  for (const auto& [s, ops] : x.components)
    if (!ops.empty()) max_ar = std::max(max_ar, s.valence());
  for (const auto& [s, ops] : k1.components)
    if (!ops.empty()) max_ar = std::max(max_ar, s.valence());
  topt.max_arity = max_ar;
  auto raw = enumerate_trees(x.colours, S, {"X", "K1"}, stage_vertex_cap, topt);

  std::map<std::string, OMTree> class_reps;  // canonical form (free at X) -> representative
  for (const auto& t : raw) {
    if (t.tree.is_empty()) continue;
    bool ok = true;
    int k1_count = 0;
    for (size_t v = 0; v < t.tree.vertices.size() && ok; ++v) {
      Signature vs = t.vertex_signature(static_cast<int>(v));
      if (t.marks[v] == "K1") {
        ++k1_count;
        auto it = k1.components.find(vs);
        if (it == k1.components.end() || it->second.empty()) ok = false;
      } else {
        if (vs.valence() > x.max_valence) { ok = false; break; }
        if (x.component(vs).empty()) ok = false;
      }
    }
    if (!ok || k1_count > n_max) continue;
    // minimal: no inner edge with both ends marked X
    for (int e = 0; e < t.tree.n_edges && ok; ++e) {
      if (!t.tree.is_inner_edge(e)) continue;
      if (t.marks[t.tree.vertex_below(e)] == "X" && t.marks[t.tree.vertex_above(e)] == "X") ok = false;
    }
    if (!ok) continue;
    CanonicalOptions copt;
    copt.rigid = rigid_at_k1(t);
    auto c = canonicalize(t, nullptr, copt);
    if (!class_reps.count(c.form)) class_reps[c.form] = c.canon;
  }

  FiltrationResult out;
  out.stages.resize(n_max + 1);
  for (int n = 0; n <= n_max; ++n) out.stages[n].n = n;

  for (const auto& [form, tree] : class_reps) {
    int n = 0;
    for (const auto& m : tree.marks)
      if (m == "K1") ++n;
    FiltrationOrbit orb;
    orb.tree = tree;
    CanonicalOptions copt;
    copt.rigid = rigid_at_k1(tree);
    auto auts = detail::marked_automorphisms(tree, copt.rigid);
    orb.aut_size = static_cast<int>(auts.size());

    // cube bookkeeping
    std::vector<int> kvs;  // K1-marked vertices in order
    for (size_t v = 0; v < tree.tree.vertices.size(); ++v)
      if (tree.marks[v] == "K1") kvs.push_back(static_cast<int>(v));
    auto k_ops = [&](int v, int b) {
      Signature vs = tree.vertex_signature(v);
      const auto& full = b == 1 ? k1.component(vs) : k0.component(vs);
      return full;
    };
    long x_choices = 1;
    std::vector<std::vector<OpId>> x_opts;
    std::vector<int> xvs;
    for (size_t v = 0; v < tree.tree.vertices.size(); ++v) {
      if (tree.marks[v] == "K1") continue;
      xvs.push_back(static_cast<int>(v));
      x_opts.push_back(x.component(tree.vertex_signature(static_cast<int>(v))));
      x_choices *= static_cast<long>(x_opts.back().size());
    }
    for (int corner = 0; corner < (1 << n); ++corner) {
      long size = x_choices;
      for (int m = 0; m < n; ++m) size *= static_cast<long>(k_ops(kvs[m], (corner >> m) & 1).size());
      orb.corner_sizes.push_back(size);
    }
    // punctured colimit: top-corner elements with at least one K1
    // coordinate in the image of i (valid because i is injective)
    long top = orb.corner_sizes.empty() ? 0 : orb.corner_sizes.back();
    long all_new = x_choices;
    for (int m = 0; m < n; ++m) {
      long fresh = 0;
      Signature vs = tree.vertex_signature(kvs[m]);
      for (const auto& op : k1.component(vs))
        if (!image.count(vs) || !image[vs].count(op)) ++fresh;
      all_new *= fresh;
    }
    orb.punctured_size = top - all_new;

    // new elements: all K1 coordinates outside the image; decorated unit
    // X-vertices are normalized away unless the tree is a single vertex
    std::vector<std::vector<OpId>> k_new(kvs.size());
    for (size_t m = 0; m < kvs.size(); ++m) {
      Signature vs = tree.vertex_signature(kvs[m]);
      for (const auto& op : k1.component(vs))
        if (!image.count(vs) || !image[vs].count(op)) k_new[m].push_back(op);
    }
    std::vector<std::vector<std::pair<OMTree, std::vector<LocalDec>>>> orbits_seen;
    std::set<std::string> claimed;
    std::vector<OpId> kpick(kvs.size()), xpick(xvs.size());
    std::function<void(size_t)> recx = [&](size_t xi) {
      if (xi == xvs.size()) {
        // assemble the decoration
        std::vector<LocalDec> dec(tree.tree.vertices.size());
        for (size_t m = 0; m < kvs.size(); ++m)
          dec[kvs[m]] = {tree.vertex_signature(kvs[m]), kpick[m]};
        for (size_t m = 0; m < xvs.size(); ++m)
          dec[xvs[m]] = {tree.vertex_signature(xvs[m]), xpick[m]};
        // unit normalization
        if (tree.tree.vertices.size() > 1) {
          for (size_t m = 0; m < xvs.size(); ++m) {
            const auto& [s, op] = dec[xvs[m]];
            if (s.valence() == 1 && s.inputs[0] == s.output && op == x.unit(s.output)) return;
          }
        }
        std::string enc = detail::canon_form_of(tree, dec);
        if (claimed.count(enc)) return;
        // orbit under the automorphisms
        std::vector<std::string> orbit_forms;
        for (const auto& a : auts) {
          std::vector<LocalDec> dec2(dec.size());
          for (size_t v = 0; v < tree.tree.vertices.size(); ++v) {
            int w = -1;
            // image vertex: via the output edge
            int oe = a.edge_map[tree.tree.vertices[v].out_edge];
            w = tree.tree.vertex_above(oe);
            const auto& [s, op] = dec[v];
            if (tree.marks[v] == "K1") {
              dec2[w] = {s, op};
            } else {
              // re-seat the X decoration onto w's stored input order
              std::vector<int> moved;
              for (int e : tree.tree.vertices[v].in_edges) moved.push_back(a.edge_map[e]);
              Perm sg = reseat_perm(moved, tree.tree.vertices[w].in_edges);
              dec2[w] = {s.permuted(sg), x.sym(s, sg, op)};
            }
          }
          orbit_forms.push_back(detail::canon_form_of(tree, dec2));
        }
        for (const auto& f2 : orbit_forms) claimed.insert(f2);
        orb.new_reps.emplace_back(tree, dec);
        return;
      }
      for (const auto& op : x_opts[xi]) {
        xpick[xi] = op;
        recx(xi + 1);
      }
    };
    std::function<void(size_t)> reck = [&](size_t ki) {
      if (ki == kvs.size()) {
        recx(0);
        return;
      }
      for (const auto& op : k_new[ki]) {
        kpick[ki] = op;
        reck(ki + 1);
      }
    };
    reck(0);
    (void)orbits_seen;
    out.stages[n].new_classes += static_cast<long>(orb.new_reps.size());
    out.stages[n].orbits.push_back(std::move(orb));
  }

  for (const auto& st : out.stages) out.total_classes += st.new_classes;

  // comparison with the saturation push-out on the same data
  SaturationConfig cfg;
  cfg.ambient = x.colours;
  cfg.planar_moves = x.variant != Variant::nonsymmetric;
  AmbientMark mx{true, x, {}, detail::identity_cmap(x.colours)};
  AmbientMark m0{false, {}, k0, detail::identity_cmap(k0.colours)};
  AmbientMark m1{false, {}, k1, detail::identity_cmap(k1.colours)};
  cfg.marks = {{"X", mx}, {"K0", m0}, {"K1", m1}};
  MarkMoveSpec mv0{"K0", "X", detail::identity_cmap(k0.colours), alpha.components};
  MarkMoveSpec mv1{"K0", "K1", detail::identity_cmap(k0.colours), inj.components};
  cfg.moves = {mv0, mv1};
  auto sat = saturate_with_certificate(cfg, S, bound);
  out.pushout_exact = sat.exact;
  out.pushout_classes = sat.n_classes;

  std::map<int, std::pair<int, std::string>> hit;  // class -> (stage, element form)
  bool collision = false;
  for (int n = 0; n <= n_max; ++n)
    for (const auto& orbv : out.stages[n].orbits)
      for (const auto& [tshape, dec] : orbv.new_reps) {
        auto form = detail::canon_form_of(tshape, dec);
        auto it = sat.index_of.find(form);
        if (it == sat.index_of.end()) {
          out.detail = "filtration element missing from the saturation window";
          collision = true;
          continue;
        }
        int cls = sat.class_of[it->second];
        auto h = hit.find(cls);
        if (h != hit.end()) {
          collision = true;
          out.detail = "two filtration elements share the class of " + form;
        } else {
          hit[cls] = {n, form};
        }
      }
  bool surjective = static_cast<long>(hit.size()) == out.pushout_classes;
  out.agrees = !collision && surjective && out.pushout_exact;
  if (!surjective && out.detail.empty())
    out.detail = "filtration covers " + std::to_string(hit.size()) + " of " +
                 std::to_string(out.pushout_classes) + " classes";
  return out;
}

}  // namespace operadforge
