#pragma once

// Free operads on multi-graphs, presented symbolically: operations are
// canonical decorated trees, composition is grafting followed by
// canonicalization, units are empty trees. Components are never globally
// materialized; queries are (signature, vertex bound)-scoped and carry an
// exactness flag.

#include <mutex>

#include "operadforge/trees.hpp"

namespace operadforge {

struct DecoratedTree {
  OMTree shape;                // every vertex marked "gen"
  std::vector<OpId> decoration;  // per vertex: a generator of matching signature

  std::string form() const { return canonicalize(shape, &decoration).form; }
};

struct FreeComponent {
  std::vector<DecoratedTree> elements;  // canonical representatives, sorted by form
  bool exact = false;
};

struct MultiGraphMorphism {
  MultiGraph source;
  MultiGraph target;
  std::map<Colour, Colour> colour_map;
  std::map<Signature, std::map<OpId, OpId>> components;

  Colour map_colour(const Colour& c) const {
    auto it = colour_map.find(c);
    if (it == colour_map.end()) throw Error("DanglingReference", "colour map undefined at " + c.id);
    return it->second;
  }
  Signature map_signature(const Signature& s) const {
    Signature r;
    r.output = map_colour(s.output);
    for (const auto& c : s.inputs) r.inputs.push_back(map_colour(c));
    return r;
  }
  OpId map_op(const Signature& s, const OpId& op) const {
    auto it = components.find(s);
    if (it == components.end()) throw Error("SignatureMismatch", "no component at " + s.key());
    auto jt = it->second.find(op);
    if (jt == it->second.end()) throw Error("SignatureMismatch", "undefined on " + op);
    return jt->second;
  }
};

inline AxiomReport validate_multigraph_morphism(const MultiGraphMorphism& g) {
  AxiomReport rep;
  for (const auto& c : g.source.colours)
    if (!g.colour_map.count(c)) rep.add("colour_map", c.id);
  for (const auto& [s, ops] : g.source.components) {
    for (const auto& op : ops) {
      try {
        OpId im = g.map_op(s, op);
        const auto& tgt = g.target.component(g.map_signature(s));
        if (std::find(tgt.begin(), tgt.end(), im) == tgt.end())
          rep.add("component_typing", s.key() + " / " + op);
      } catch (const Error&) {
        rep.add("component_total", s.key() + " / " + op);
      }
    }
  }
  return rep;
}

inline std::vector<MultiGraphMorphism> enumerate_multigraph_morphisms(const MultiGraph& k,
                                                                      const MultiGraph& target) {
  std::vector<MultiGraphMorphism> out;
  std::map<Colour, Colour> cmap;
  std::function<void(size_t)> colours = [&](size_t i) {
    if (i == k.colours.size()) {
      MultiGraphMorphism m;
      m.source = k;
      m.target = target;
      m.colour_map = cmap;
      std::vector<std::pair<Signature, OpId>> slots;
      bool feasible = true;
      for (const auto& [s, ops] : k.components) {
        Signature fs = m.map_signature(s);
        if (fs.valence() > target.max_valence || (!ops.empty() && target.component(fs).empty())) {
          feasible = false;
          break;
        }
        for (const auto& op : ops) slots.emplace_back(s, op);
      }
      if (!feasible) return;
      std::function<void(size_t)> assign = [&](size_t j) {
        if (j == slots.size()) {
          out.push_back(m);
          return;
        }
        for (const auto& im : target.component(m.map_signature(slots[j].first))) {
          m.components[slots[j].first][slots[j].second] = im;
          assign(j + 1);
        }
        m.components[slots[j].first].erase(slots[j].second);
      };
      assign(0);
      return;
    }
    for (const auto& d : target.colours) {
      cmap[k.colours[i]] = d;
      colours(i + 1);
    }
    cmap.erase(k.colours[i]);
  };
  colours(0);
  return out;
}

// ---------------------------------------------------------------------------

class SymbolicOperad {
 public:
  MultiGraph generators;
  Variant variant = Variant::symmetric;

  SymbolicOperad() = default;
  SymbolicOperad(MultiGraph k, Variant v) : generators(std::move(k)), variant(v) {
    if (v == Variant::reduced)
      for (const auto& [s, ops] : generators.components)
        if (s.valence() == 0 && !ops.empty())
          throw Error("ReducedNullary", "reduced free operad rejects valence-0 generators");
  }

  DecoratedTree unit(const Colour& c) const { return DecoratedTree{empty_tree(c), {}}; }

  DecoratedTree canonical(const DecoratedTree& t) const {
    auto c = canonicalize(t.shape, &t.decoration);
    return DecoratedTree{c.canon, c.canon_decoration};
  }

  DecoratedTree compose(const DecoratedTree& outer, const std::vector<DecoratedTree>& inner) const {
    std::vector<OMTree> shapes;
    for (const auto& t : inner) shapes.push_back(t.shape);
    OMTree g = graft(outer.shape, outer.shape.leaf_order, shapes);
    std::vector<OpId> dec = outer.decoration;
    for (const auto& t : inner) dec.insert(dec.end(), t.decoration.begin(), t.decoration.end());
    return canonical(DecoratedTree{g, dec});
  }

  DecoratedTree sym(const Perm& sigma, const DecoratedTree& t) const {
    if (variant == Variant::nonsymmetric)
      throw Error("NoSymmetry", "nonsymmetric free operad has no symmetry action");
    DecoratedTree r = t;
    r.shape.leaf_order = perm_apply_positions(t.shape.leaf_order, sigma);
    return canonical(r);
  }

  // Lazily enumerable components: all canonical decorated trees with the
  // requested arity and at most `vertex_bound` vertices. The exactness flag
  // is a conservative structural certificate.
  FreeComponent component(const Signature& s, int vertex_bound) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto key = std::make_pair(s, vertex_bound);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    FreeComponent out;
    std::map<std::string, DecoratedTree> seen;
    for (auto& t : planar_shapes(s.output, s.valence(), vertex_bound)) {
      if (variant == Variant::nonsymmetric) {
        // the leaf order is the planar one; labels must match on the nose
        bool ok = true;
        auto pl = planar_leaf_positions(t.shape.tree);
        for (int i = 0; i < s.valence(); ++i)
          if (!(t.shape.labels[pl[i]] == s.inputs[i])) ok = false;
        if (!ok) continue;
        t.shape.leaf_order = pl;
        auto c = canonical(t);
        seen.emplace(c.form(), c);
      } else {
        auto lv = t.shape.tree.leaves();
        std::vector<int> order(s.valence(), -1);
        std::vector<char> used(t.shape.tree.n_edges, 0);
        std::function<void(int)> assign = [&](int i) {
          if (i == s.valence()) {
            DecoratedTree u = t;
            u.shape.leaf_order = order;
            auto c = canonical(u);
            seen.emplace(c.form(), c);
            return;
          }
          for (int e : lv) {
            if (used[e] || !(t.shape.labels[e] == s.inputs[i])) continue;
            used[e] = 1;
            order[i] = e;
            assign(i + 1);
            used[e] = 0;
          }
        };
        if (static_cast<int>(lv.size()) == s.valence()) assign(0);
      }
    }
    for (auto& [f, t] : seen) out.elements.push_back(std::move(t));
    out.exact = structurally_exact(s, vertex_bound);
    cache_[key] = out;
    return out;
  }

  // true when no decorated tree of this arity can exceed the bound: with no
  // generators of valence <= 1 every vertex consumes a leaf slot
  bool structurally_exact(const Signature& s, int vertex_bound) const {
    for (const auto& [gs, ops] : generators.components)
      if (!ops.empty() && gs.valence() <= 1) return false;
    return vertex_bound >= std::max(0, s.valence() - 1);
  }

 private:
  // planar decorated shapes with root colour c and n leaves, without leaf
  // orders assigned
  std::vector<DecoratedTree> planar_shapes(const Colour& c, int n, int budget) const {
    std::vector<DecoratedTree> out;
    if (n == 1) out.push_back(unit(c));
    if (budget == 0) return out;
    for (const auto& [gs, ops] : generators.components) {
      if (ops.empty() || !(gs.output == c)) continue;
      int k = gs.valence();
      std::vector<int> parts(k, 0);
      std::function<void(int, int)> split = [&](int i, int left) {
        if (i == k) {
          if (left != 0) return;
          std::vector<DecoratedTree> acc;
          std::function<void(int, int)> pick = [&](int j, int vleft) {
            if (j == k) {
              OMTree base = corolla(gs.inputs, c, "gen");
              std::vector<OMTree> shapes;
              std::vector<OpId> dec;
              for (const auto& t : acc) shapes.push_back(t.shape);
              for (const auto& op : ops) {
                dec.assign(1, op);
                for (const auto& t : acc) dec.insert(dec.end(), t.decoration.begin(), t.decoration.end());
                out.push_back(DecoratedTree{graft(base, base.tree.leaves(), shapes), dec});
              }
              return;
            }
            for (const auto& sub : planar_shapes(gs.inputs[j], parts[j], vleft)) {
              int used = static_cast<int>(sub.shape.tree.vertices.size());
              if (used > vleft) continue;
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
    return out;
  }

  mutable std::mutex mu_;
  mutable std::map<std::pair<Signature, int>, FreeComponent> cache_;
};

inline SymbolicOperad free_operad(const MultiGraph& k, Variant variant) {
  return SymbolicOperad(k, variant);
}

// ---------------------------------------------------------------------------
// The adjunction evaluator

// Evaluate decorated trees in a finite operad along a multigraph morphism
// g : K -> U(P): relabel the shape and compose along the tree.
struct FreeEvaluator {
  MultiGraphMorphism g;
  FinOperad target;

  TreeComposite eval(const DecoratedTree& t) const {
    OMTree relabeled = t.shape;
    for (auto& l : relabeled.labels) l = g.map_colour(l);
    std::vector<OpId> dec;
    for (size_t v = 0; v < t.shape.tree.vertices.size(); ++v)
      dec.push_back(g.map_op(t.shape.vertex_signature(static_cast<int>(v)), t.decoration[v]));
    return compose_along_tree(target, relabeled, dec);
  }
};

inline FreeEvaluator free_eval(const MultiGraphMorphism& g, const FinOperad& p) {
  auto rep = validate_multigraph_morphism(g);
  if (!rep.pass()) throw Error("SignatureMismatch", rep.summary());
  return FreeEvaluator{g, p};
}

// Spot-check that an evaluator is an operad morphism on a truncation:
// evaluation must commute with grafting, symmetry and units on all
// composable pairs within the caps.
inline bool evaluator_respects_structure(const SymbolicOperad& f, const FreeEvaluator& ev,
                                         int valence_cap, int vertex_cap) {
  auto sigs = all_signatures(f.generators.colours, valence_cap,
                             f.variant == Variant::reduced);
  for (const auto& s : sigs) {
    auto comp = f.component(s, vertex_cap);
    for (const auto& x : comp.elements) {
      // units plugged in: identity
      std::vector<DecoratedTree> units;
      for (const auto& c : s.inputs) units.push_back(f.unit(c));
      if (f.variant != Variant::reduced || s.valence() >= 1) {
        auto both = f.compose(x, units);
        if (ev.eval(both).op != ev.eval(x).op) return false;
      }
      // symmetry
      if (f.variant != Variant::nonsymmetric) {
        for (const auto& sigma : all_perms(s.valence())) {
          auto lhs = ev.eval(f.sym(sigma, x));
          auto rhs = ev.target.sym(ev.eval(x).signature, sigma, ev.eval(x).op);
          if (lhs.op != rhs) return false;
        }
      }
      // grafting with single-vertex trees at one slot
      for (int slot = 0; slot < s.valence(); ++slot) {
        for (const auto& [gs, ops] : f.generators.components) {
          if (!(gs.output == s.inputs[slot])) continue;
          if (s.valence() - 1 + gs.valence() > std::min(valence_cap, ev.target.max_valence)) continue;
          for (const auto& op : ops) {
            DecoratedTree gen{corolla(gs.inputs, gs.output, "gen"), {op}};
            std::vector<DecoratedTree> inner;
            std::vector<Signature> inner_sigs;
            std::vector<OpId> inner_ops;
            for (int i = 0; i < s.valence(); ++i) {
              if (i == slot) {
                inner.push_back(gen);
              } else {
                inner.push_back(f.unit(s.inputs[i]));
              }
            }
            auto composite = f.compose(x, inner);
            auto lhs = ev.eval(composite);
            for (const auto& t : inner) {
              auto e = ev.eval(t);
              inner_sigs.push_back(e.signature);
              inner_ops.push_back(e.op);
            }
            auto ex = ev.eval(x);
            OpId rhs = ev.target.compose(ex.signature, inner_sigs, ex.op, inner_ops);
            if (lhs.op != rhs) return false;
          }
        }
      }
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Adjunction bijection count

struct HomCountResult {
  long multigraph_morphisms = 0;
  long operad_morphisms = 0;
  bool equal = false;
};

// Count multigraph morphisms K -> U(P) and operad morphisms F(K) -> P. The
// latter are counted through free_eval with a structural check on the
// truncation, so a defective evaluator would break the bijection.
inline HomCountResult hom_count_check(const MultiGraph& k, const FinOperad& p, int valence_cap,
                                      int vertex_cap = 3) {
  SymbolicOperad f(k, p.variant == Variant::nonsymmetric ? Variant::nonsymmetric
                                                         : (p.variant == Variant::reduced
                                                                ? Variant::reduced
                                                                : Variant::symmetric));
  HomCountResult r;
  auto gs = enumerate_multigraph_morphisms(k, p.underlying_multigraph());
  r.multigraph_morphisms = static_cast<long>(gs.size());
  for (const auto& g : gs) {
    auto ev = free_eval(g, p);
    if (evaluator_respects_structure(f, ev, valence_cap, vertex_cap)) ++r.operad_morphisms;
  }
  r.equal = r.multigraph_morphisms == r.operad_morphisms;
  return r;
}

// ---------------------------------------------------------------------------
// Exact materialization (possible when no generator has valence <= 1)

struct MaterializedFree {
  FinOperad operad;
  std::map<std::pair<Signature, OpId>, DecoratedTree> dictionary;
};

inline MaterializedFree materialize_free(const SymbolicOperad& f, int valence_bound) {
  for (const auto& [s, ops] : f.generators.components)
    if (!ops.empty() && s.valence() <= 1)
      throw Error("OutOfBound", "free operad with small generators has no exact truncation");
  MaterializedFree out;
  FinOperad& o = out.operad;
  o.colours = f.generators.colours;
  std::sort(o.colours.begin(), o.colours.end());
  o.variant = f.variant;
  o.max_valence = valence_bound;
  std::map<Signature, std::map<OpId, DecoratedTree>> table;
  for (const auto& s : all_signatures(o.colours, valence_bound, f.variant == Variant::reduced)) {
    auto comp = f.component(s, std::max(0, valence_bound - 1));
    if (!comp.exact) throw Error("OutOfBound", "component not exact at " + s.key());
    std::vector<OpId> ids;
    for (const auto& t : comp.elements) {
      OpId id = t.form();
      ids.push_back(id);
      table[s][id] = t;
      out.dictionary[{s, id}] = t;
    }
    if (!ids.empty()) o.components[s] = ids;
  }
  for (const auto& c : o.colours) o.units[c] = f.unit(c).form();
  // units live in the (c;c) components even with no unary generators
  for (const auto& c : o.colours) {
    Signature uc{{c}, c};
    OpId id = f.unit(c).form();
    if (!o.has_op(uc, id)) {
      o.components[uc].push_back(id);
      table[uc][id] = f.unit(c);
      out.dictionary[{uc, id}] = f.unit(c);
    }
  }
  auto nonempty = [&](const Signature& s) {
    auto it = o.components.find(s);
    return it != o.components.end() && !it->second.empty();
  };
  auto sigs = all_signatures(o.colours, valence_bound, f.variant == Variant::reduced);
  for (const auto& [s, ops] : o.components) {
    if (f.variant != Variant::nonsymmetric)
      for (const auto& sigma : all_perms(s.valence()))
        for (const auto& op : ops)
          o.symmetry_table[SymKey{s, sigma, op}] = f.sym(sigma, table[s][op]).form();
    for_each_composable(sigs, s, valence_bound, nonempty, [&](const std::vector<Signature>& ts) {
      std::vector<OpId> pick(ts.size());
      std::function<void(size_t)> rec = [&](size_t i) {
        if (i == ts.size()) {
          for (const auto& op : ops) {
            std::vector<DecoratedTree> inner;
            for (size_t j = 0; j < ts.size(); ++j) inner.push_back(table[ts[j]][pick[j]]);
            o.compose_table[ComposeKey{s, op, ts, pick}] = f.compose(table[s][op], inner).form();
          }
          return;
        }
        for (const auto& x : o.components.at(ts[i])) {
          pick[i] = x;
          rec(i + 1);
        }
      };
      rec(0);
    });
  }
  return out;
}

}  // namespace operadforge
