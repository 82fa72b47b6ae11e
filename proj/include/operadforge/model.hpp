#pragma once

// The folk model structure on finite Set-operads: local classes against a
// pluggable base model datum, path-lifting and essential surjectivity via
// invertible unary operations, the generating sets, an exhaustive lifting
// solver, amalgamation of two-object categories, and the Dwyer-Kan
// comparison.

#include "operadforge/builtins.hpp"
#include "operadforge/colimits.hpp"
#include "operadforge/freeops.hpp"

namespace operadforge {

// A map of finite sets, as the base predicates see it.
struct SetMap {
  size_t dom = 0, cod = 0;
  std::vector<int> map;  // size dom, values in [0, cod)
};

inline bool setmap_injective(const SetMap& m) {
  std::set<int> img(m.map.begin(), m.map.end());
  return img.size() == m.dom;
}
inline bool setmap_surjective(const SetMap& m) {
  std::set<int> img(m.map.begin(), m.map.end());
  return img.size() == m.cod;
}
inline bool setmap_bijective(const SetMap& m) {
  return m.dom == m.cod && setmap_injective(m);
}

// Base model datum on finite sets. The default preset takes bijections as
// weak equivalences, every map as a fibration and I = {0 -> 1, 2 -> 1};
// with these choices local trivial fibrations are exactly the local
// bijections, which is what the folk model structure needs.
struct BaseModelData {
  std::string name = "discrete";
  std::function<bool(const SetMap&)> weak = setmap_bijective;
  std::function<bool(const SetMap&)> fib = [](const SetMap&) { return true; };
  std::function<bool(const SetMap&)> trivial_fib = setmap_bijective;  // RLP against I
};

inline BaseModelData discrete_preset() { return BaseModelData{}; }

// ---------------------------------------------------------------------------
// Colour equivalence

struct ColourEquivalences {
  std::vector<std::vector<Colour>> classes;
  // one witness pair (u : a -> b, v : b -> a) per related ordered pair
  std::map<std::pair<Colour, Colour>, std::pair<OpId, OpId>> witness;

  bool equivalent(const Colour& a, const Colour& b) const {
    if (a == b) return true;
    return witness.count({a, b}) > 0;
  }
};

// invertible unary operations a -> b: u with a two-sided inverse
inline std::vector<std::pair<OpId, OpId>> unary_isos(const FinOperad& p, const Colour& a,
                                                     const Colour& b) {
  std::vector<std::pair<OpId, OpId>> out;
  Signature ab{{a}, b}, ba{{b}, a}, aa{{a}, a}, bb{{b}, b};
  for (const auto& u : p.component(ab))
    for (const auto& v : p.component(ba)) {
      // v o u : a -> a and u o v : b -> b
      if (p.compose(ba, {ab}, v, {u}) == p.unit(a) && p.compose(ab, {ba}, u, {v}) == p.unit(b))
        out.emplace_back(u, v);
    }
  return out;
}

inline ColourEquivalences colour_equivalences(const FinOperad& p) {
  ColourEquivalences out;
  UnionFind uf(static_cast<int>(p.colours.size()));
  auto idx = [&](const Colour& c) {
    return static_cast<int>(std::find(p.colours.begin(), p.colours.end(), c) - p.colours.begin());
  };
  for (const auto& a : p.colours)
    for (const auto& b : p.colours) {
      auto isos = unary_isos(p, a, b);
      if (!isos.empty()) {
        out.witness[{a, b}] = isos.front();
        uf.unite(idx(a), idx(b));
      }
    }
  std::map<int, int> renum;
  for (size_t i = 0; i < p.colours.size(); ++i) {
    int root = uf.find(static_cast<int>(i));
    auto it = renum.find(root);
    if (it == renum.end()) {
      renum[root] = static_cast<int>(out.classes.size());
      out.classes.push_back({p.colours[i]});
    } else {
      out.classes[it->second].push_back(p.colours[i]);
    }
  }
  // the relation produced by two-sided inverses is an equivalence; assert
  // symmetry and transitivity on the computed witnesses
  for (const auto& [pair, w] : out.witness) {
    if (!out.witness.count({pair.second, pair.first}))
      throw Error("InternalError", "colour equivalence is not symmetric");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Classification

struct ModelReport {
  bool fully_faithful = false;
  bool local_we = false;
  bool local_fib = false;
  bool local_trivfib = false;
  bool surjective_on_colours = false;
  bool essentially_surjective = false;
  bool path_lifting = false;
  bool fibration = false;
  bool weak_equivalence = false;
  bool trivial_fibration = false;
  std::map<std::string, std::string> witnesses;

  bool internally_consistent() const {
    return fibration == (path_lifting && local_fib) &&
           weak_equivalence == (essentially_surjective && local_we) &&
           trivial_fibration == (local_trivfib && surjective_on_colours);
  }
};

inline ModelReport classify(const OperadMorphism& phi, const BaseModelData& base = discrete_preset()) {
  ModelReport rep;
  const FinOperad& p = phi.source;
  const FinOperad& q = phi.target;

  rep.fully_faithful = true;
  rep.local_we = rep.local_fib = rep.local_trivfib = true;
  for (const auto& s : all_signatures(p.colours, p.max_valence, p.variant == Variant::reduced)) {
    Signature fs = phi.map_signature(s);
    const auto& dom = p.component(s);
    const auto& cod = fs.valence() <= q.max_valence ? q.component(fs) : p.component(s);
    if (fs.valence() > q.max_valence)
      throw Error("OutOfBound", "target bound below source bound at " + s.key());
    SetMap m;
    m.dom = dom.size();
    m.cod = cod.size();
    for (const auto& op : dom) {
      OpId im = phi.map_op(s, op);
      m.map.push_back(
          static_cast<int>(std::find(cod.begin(), cod.end(), im) - cod.begin()));
    }
    if (!setmap_bijective(m)) {
      rep.fully_faithful = false;
      if (!rep.witnesses.count("fully_faithful")) rep.witnesses["fully_faithful"] = s.key();
    }
    if (!base.weak(m)) {
      rep.local_we = false;
      if (!rep.witnesses.count("local_we")) rep.witnesses["local_we"] = s.key();
    }
    if (!base.fib(m)) {
      rep.local_fib = false;
      if (!rep.witnesses.count("local_fib")) rep.witnesses["local_fib"] = s.key();
    }
    if (!base.trivial_fib(m)) {
      rep.local_trivfib = false;
      if (!rep.witnesses.count("local_trivfib")) rep.witnesses["local_trivfib"] = s.key();
    }
  }

  std::set<Colour> image;
  for (const auto& c : p.colours) image.insert(phi.map_colour(c));
  rep.surjective_on_colours = true;
  for (const auto& d : q.colours)
    if (!image.count(d)) {
      rep.surjective_on_colours = false;
      rep.witnesses["surjective_on_colours"] = d.id;
      break;
    }

  auto eq = colour_equivalences(q);
  rep.essentially_surjective = true;
  for (const auto& d : q.colours) {
    bool hit = false;
    for (const auto& c : p.colours)
      if (eq.equivalent(phi.map_colour(c), d)) hit = true;
    if (!hit) {
      rep.essentially_surjective = false;
      rep.witnesses["essentially_surjective"] = d.id;
      break;
    }
  }

  // path-lifting: every invertible unary out of an image colour lifts to an
  // invertible unary out of the source colour
  rep.path_lifting = true;
  for (const auto& a : p.colours) {
    for (const auto& b : q.colours) {
      for (const auto& [u, v] : unary_isos(q, phi.map_colour(a), b)) {
        bool lifted = false;
        for (const auto& a2 : p.colours) {
          if (!(phi.map_colour(a2) == b)) continue;
          for (const auto& [uu, vv] : unary_isos(p, a, a2))
            if (phi.map_op(Signature{{a}, a2}, uu) == u) lifted = true;
        }
        if (!lifted) {
          rep.path_lifting = false;
          if (!rep.witnesses.count("path_lifting"))
            rep.witnesses["path_lifting"] = "iso " + u + " : " + phi.map_colour(a).id + "->" + b.id;
        }
      }
    }
  }

  rep.fibration = rep.path_lifting && rep.local_fib;
  rep.weak_equivalence = rep.essentially_surjective && rep.local_we;
  rep.trivial_fibration = rep.local_trivfib && rep.surjective_on_colours;
  return rep;
}

// ---------------------------------------------------------------------------
// Lifting problems

struct LiftSquare {
  OperadMorphism i;    // A -> B
  OperadMorphism p;    // X -> Y
  OperadMorphism top;  // A -> X
  OperadMorphism bot;  // B -> Y
};

struct RlpResult {
  std::optional<OperadMorphism> lift;
  long searched = 0;
};

inline bool square_commutes(const LiftSquare& sq) {
  auto left = compose_morphisms(sq.bot, sq.i);
  auto right = compose_morphisms(sq.p, sq.top);
  return left.colour_map == right.colour_map && left.components == right.components;
}

// Exhaustive, deterministic search for a filler B -> X.
inline RlpResult has_rlp(const LiftSquare& sq, long budget = 2000000) {
  if (!square_commutes(sq)) throw Error("SchemaError", "lifting square does not commute");
  RlpResult out;
  MorphismSearchOptions opt;
  opt.budget = budget;
  auto all = enumerate_operad_morphisms(sq.i.target, sq.p.source, opt);
  out.searched = static_cast<long>(all.size());
  for (const auto& l : all) {
    auto li = compose_morphisms(l, sq.i);
    if (!(li.colour_map == sq.top.colour_map && li.components == sq.top.components)) continue;
    auto pl = compose_morphisms(sq.p, l);
    if (!(pl.colour_map == sq.bot.colour_map && pl.components == sq.bot.components)) continue;
    out.lift = l;
    return out;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Generating (trivial) cofibrations

struct GeneratingMorphism {
  std::string name;
  OperadMorphism mor;
};

// C_n(X) = F_{[n+1]} iota_{s_n}(X): the free operad over the colours
// {0,..,n} on X-many generators of signature (1,..,n;0). With that output
// colour the generators cannot compose, so the operads are finite.
inline FinOperad cn_operad(int n, int generators, int bound = 4) {
  std::vector<Colour> cols;
  for (int i = 0; i <= n; ++i) cols.push_back(Colour{std::to_string(i)});
  Signature sn;
  for (int i = 1; i <= n; ++i) sn.inputs.push_back(Colour{std::to_string(i)});
  sn.output = Colour{"0"};
  // op ids: "u" or "g<k>s<seat digits>" (valences stay in single digits)
  auto seat_str = [](const Perm& p) {
    std::string out;
    for (int v : p) out += static_cast<char>('0' + v);
    return out;
  };
  auto seat_of = [](const OpId& op) {
    Perm p;
    for (size_t i = op.rfind('s') + 1; i < op.size(); ++i) p.push_back(op[i] - '0');
    return p;
  };
  OperadRules r;
  r.ops = [&](const Signature& s) -> std::vector<OpId> {
    std::vector<OpId> out;
    if (s.valence() == 1 && s.inputs[0] == s.output) out.push_back("u");
    if (generators >= 1) {
      // generators live at every permutation seat of s_n
      if (s.valence() == sn.valence() && s.output == sn.output) {
        std::multiset<Colour> a(s.inputs.begin(), s.inputs.end());
        std::multiset<Colour> b(sn.inputs.begin(), sn.inputs.end());
        if (a == b) {
          for (const auto& sigma : all_perms(sn.valence())) {
            if (sn.permuted(sigma) == s)
              for (int g = 0; g < generators; ++g)
                out.push_back("g" + std::to_string(g) + "s" + seat_str(sigma));
          }
        }
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  r.unit = [](const Colour&) { return OpId("u"); };
  r.sym = [&](const Signature& s, const Perm& sigma, const OpId& op) -> OpId {
    if (op == "u") return op;
    std::string g = op.substr(0, op.rfind('s'));
    return g + "s" + seat_str(perm_compose(seat_of(op), sigma));
  };
  r.compose = [&](const Signature& s, const std::vector<Signature>& ts, const OpId& op,
                  const std::vector<OpId>& ops) -> OpId {
    // only units can plug into anything here
    if (op == "u") return ops.empty() ? op : ops[0];
    return op;
  };
  int need = std::max(bound, n);
  return materialize_operad(cols, Variant::symmetric, need, r);
}

// C_n(i) for a generating cofibration i of Set (0 -> 1 or 2 -> 1)
inline OperadMorphism cn_cell(int n, int gens_src, int gens_tgt, int bound = 4) {
  OperadMorphism m;
  m.source = cn_operad(n, gens_src, bound);
  m.target = cn_operad(n, gens_tgt, bound);
  for (const auto& c : m.source.colours) m.colour_map[c] = c;
  for (const auto& [s, ops] : m.source.components)
    for (const auto& op : ops) {
      if (op == "u") {
        m.components[s][op] = "u";
      } else {
        // both source generators collapse onto generator 0
        m.components[s][op] = "g0" + op.substr(op.rfind('s'));
      }
    }
  return m;
}

struct GeneratingSets {
  std::vector<GeneratingMorphism> I;
  std::vector<GeneratingMorphism> J;
};

// I = I_loc + (0 -> j_!(1));  J = { j_!(i_1) : j_!(1) -> j_!(I) } in the
// discrete preset (J of Set is empty, the interval cell remains).
inline GeneratingSets generating_sets(int n_max, int bound = 4) {
  GeneratingSets out;
  for (int n = 0; n <= n_max; ++n) {
    out.I.push_back({"C" + std::to_string(n) + "(0->1)", cn_cell(n, 0, 1, bound)});
    out.I.push_back({"C" + std::to_string(n) + "(2->1)", cn_cell(n, 2, 1, bound)});
  }
  OperadMorphism colour_cell;
  colour_cell.source = FinOperad{};  // the empty operad
  colour_cell.source.max_valence = bound;
  colour_cell.target = one_operad(bound);
  out.I.push_back({"0->1obj", colour_cell});

  OperadMorphism interval_cell;
  interval_cell.source = one_operad(bound);
  interval_cell.target = interval_operad(bound);
  interval_cell.colour_map[Colour{"0"}] = Colour{"0"};
  interval_cell.components[Signature{{Colour{"0"}}, Colour{"0"}}]["u"] = "u";
  out.J.push_back({"1->interval", interval_cell});
  return out;
}

// RLP of p against x over every commuting square, by exhaustive square
// enumeration; the double enumeration behind the trivial-fibration lemma.
inline bool has_rlp_all_squares(const OperadMorphism& x, const OperadMorphism& p, long budget = 500000) {
  MorphismSearchOptions opt;
  opt.budget = budget;
  auto tops = enumerate_operad_morphisms(x.source, p.source, opt);
  auto bots = enumerate_operad_morphisms(x.target, p.target, opt);
  for (const auto& a : tops)
    for (const auto& b : bots) {
      LiftSquare sq{x, p, a, b};
      if (!square_commutes(sq)) continue;
      if (!has_rlp(sq, budget).lift) return false;
    }
  return true;
}

// ---------------------------------------------------------------------------
// Amalgamation

struct AmalgamationResult {
  FinOperad operad;  // two-object category over {0,1}
  bool exact = true;
};

// H * K = d1^*(d2! K u d0! H): push out 1 -> H (object 0) against
// 1 -> K (object 1) over three objects, then restrict to the outer two.
inline AmalgamationResult amalgamate(const FinOperad& h, const FinOperad& k, int bound = 4) {
  for (const auto& o : {&h, &k})
    if (o->colours.size() != 2) throw Error("SchemaError", "amalgamation needs two-object categories");
  auto one = one_operad(std::min(h.max_valence, k.max_valence));
  auto embed = [&](const FinOperad& tgt, const Colour& at) {
    OperadMorphism m;
    m.source = one;
    m.target = tgt;
    m.colour_map[Colour{"0"}] = at;
    m.components[Signature{{Colour{"0"}}, Colour{"0"}}]["u"] = tgt.unit(at);
    return m;
  };
  // glue H at its object 0 with K at its object 1
  auto r = pushout_general(one, embed(h, h.colours[0]), embed(k, k.colours[1]), bound, 1);
  AmalgamationResult out;
  out.exact = r.fiber.exact;
  // outer objects: K's 0 and H's 1
  std::map<Colour, Colour> outer{{Colour{"0"}, r.colours_y.at(k.colours[0])},
                                 {Colour{"1"}, r.colours_x.at(h.colours[1])}};
  out.operad = inverse_image(outer, {Colour{"0"}, Colour{"1"}}, r.fiber.operad);
  return out;
}

// ---------------------------------------------------------------------------
// 2-out-of-3, zig-zags and Dwyer-Kan

struct TwoOutOfThreeReport {
  ModelReport f, g, gf;
  bool holds = false;
};

inline TwoOutOfThreeReport two_out_of_three(const OperadMorphism& f, const OperadMorphism& g,
                                            const BaseModelData& base = discrete_preset()) {
  if (!(g.source == f.target)) throw Error("NotComposable", "2-out-of-3 needs a composable pair");
  TwoOutOfThreeReport rep;
  rep.f = classify(f, base);
  rep.g = classify(g, base);
  rep.gf = classify(compose_morphisms(g, f), base);
  bool a = rep.f.weak_equivalence, b = rep.g.weak_equivalence, c = rep.gf.weak_equivalence;
  rep.holds = (!(a && b) || c) && (!(a && c) || b) && (!(b && c) || a);
  return rep;
}

struct ZigzagReport {
  bool equal_cardinality = false;
  std::map<OpId, OpId> bijection;
};

// transport along witnesses: x |-> alpha' o (x o (beta_0,..,beta_n))
inline ZigzagReport zigzag_component_check(const FinOperad& p, const std::vector<Colour>& cs,
                                           const std::vector<Colour>& ds, const Colour& c,
                                           const Colour& d) {
  if (cs.size() != ds.size()) throw Error("SchemaError", "zig-zag needs matched tuples");
  auto eq = colour_equivalences(p);
  for (size_t i = 0; i < cs.size(); ++i)
    if (!eq.equivalent(cs[i], ds[i]))
      throw Error("NotEquivalent", cs[i].id + " and " + ds[i].id + " are not equivalent");
  if (!eq.equivalent(c, d)) throw Error("NotEquivalent", c.id + " and " + d.id);

  Signature src{std::vector<Colour>(cs.begin(), cs.end()), c};
  Signature dst{std::vector<Colour>(ds.begin(), ds.end()), d};
  ZigzagReport rep;
  // witnesses: beta_i : d_i -> c_i and alpha' : c -> d
  std::vector<OpId> betas;
  std::vector<Signature> bsigs;
  for (size_t i = 0; i < cs.size(); ++i) {
    if (cs[i] == ds[i]) {
      betas.push_back(p.unit(cs[i]));
      bsigs.push_back(Signature{{cs[i]}, cs[i]});
    } else {
      betas.push_back(eq.witness.at({ds[i], cs[i]}).first);
      bsigs.push_back(Signature{{ds[i]}, cs[i]});
    }
  }
  OpId alpha = c == d ? p.unit(c) : eq.witness.at({c, d}).first;
  Signature asig{{c}, d};
  for (const auto& x : p.component(src)) {
    OpId mid = p.compose(src, bsigs, x, betas);  // in P(d_0..d_n; c)
    Signature midsig = compose_signatures(src, bsigs);
    OpId y = p.compose(asig, {midsig}, alpha, {mid});
    rep.bijection[x] = y;
  }
  std::set<OpId> img;
  for (const auto& [x, y] : rep.bijection) img.insert(y);
  rep.equal_cardinality =
      img.size() == p.component(src).size() && img.size() == p.component(dst).size();
  return rep;
}

// In Set the pi-category of j^*(Q) is j^*(Q) itself; the Dwyer-Kan class is
// local weak equivalence plus essential surjectivity of that functor. The
// flag is computed through the underlying categories and must coincide with
// classify().weak_equivalence.
inline bool dwyer_kan_classify(const OperadMorphism& phi, const BaseModelData& base = discrete_preset()) {
  const FinOperad& p = phi.source;
  const FinOperad& q = phi.target;
  bool local_we = true;
  for (const auto& s : all_signatures(p.colours, p.max_valence, p.variant == Variant::reduced)) {
    const auto& dom = p.component(s);
    const auto& cod = q.component(phi.map_signature(s));
    SetMap m;
    m.dom = dom.size();
    m.cod = cod.size();
    for (const auto& op : dom)
      m.map.push_back(static_cast<int>(std::find(cod.begin(), cod.end(), phi.map_op(s, op)) - cod.begin()));
    if (!base.weak(m)) local_we = false;
  }
  // essential surjectivity of pi(j^* phi), computed in the underlying
  // category rather than through classify
  FinOperad uq = underlying_category(q);
  FinOperad up = underlying_category(p);
  bool ess = true;
  auto eq = colour_equivalences(uq);
  for (const auto& dcol : uq.colours) {
    bool hit = false;
    for (const auto& ccol : up.colours)
      if (eq.equivalent(phi.map_colour(ccol), dcol)) hit = true;
    if (!hit) ess = false;
  }
  bool dk = local_we && ess;
  if (dk != classify(phi, base).weak_equivalence)
    throw Error("InternalError", "Dwyer-Kan class disagrees with the folk weak equivalences");
  return dk;
}

}  // namespace operadforge
