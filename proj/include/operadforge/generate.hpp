#pragma once

// Seeded random instance generation for property campaigns. Instances are
// produced by construction (inverse images, congruence quotients, duplicated
// colours, coproducts), so every emitted operad validates and every emitted
// morphism is a morphism; the stream is identical for identical seeds.

#include <random>

#include "operadforge/builtins.hpp"
#include "operadforge/colimits.hpp"
#include "operadforge/model.hpp"

namespace operadforge {

class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}
  uint64_t raw() { return eng_(); }
  int below(int n) { return n <= 1 ? 0 : static_cast<int>(raw() % static_cast<uint64_t>(n)); }
  bool coin() { return raw() & 1u; }
  template <class T>
  const T& pick(const std::vector<T>& v) {
    if (v.empty()) throw Error("GenerationExhausted", "pick from empty pool");
    return v[below(static_cast<int>(v.size()))];
  }

 private:
  std::mt19937_64 eng_;  // fixed engine; bounded draws avoid distribution
                         // objects so streams are identical everywhere
};

struct GenCaps {
  int colours = 2;
  int component = 2;
  int valence = 2;
  int operad_valence = 4;  // table bound of generated operads
};

// ---------------------------------------------------------------------------
// Operads

// Com and As_Sigma with the valence-0 component removed: saturation state
// spaces stay small when no nullary decorations exist.
inline FinOperad positive_com_operad(int bound = 3) {
  OperadRules r;
  r.ops = [](const Signature& s) -> std::vector<OpId> {
    if (s.valence() == 0) return {};
    return {"m"};
  };
  r.unit = [](const Colour&) { return OpId("m"); };
  r.sym = [](const Signature&, const Perm&, const OpId& op) { return op; };
  r.compose = [](const Signature&, const std::vector<Signature>&, const OpId&,
                 const std::vector<OpId>&) { return OpId("m"); };
  return materialize_operad({Colour{"0"}}, Variant::symmetric, bound, r);
}

inline FinOperad positive_as_sigma_operad(int bound = 3) {
  auto full = as_sigma_operad(std::min(bound, 3));
  FinOperad o = full;
  o.components.erase(Signature{{}, Colour{"0"}});
  std::vector<ComposeKey> drop;
  for (const auto& [k, v] : o.compose_table) {
    bool nullary = k.outer.valence() == 0;
    for (const auto& t : k.inner) nullary = nullary || t.valence() == 0;
    if (nullary) drop.push_back(k);
  }
  for (const auto& k : drop) o.compose_table.erase(k);
  std::vector<SymKey> drop2;
  for (const auto& [k, v] : o.symmetry_table)
    if (k.sig.valence() == 0) drop2.push_back(k);
  for (const auto& k : drop2) o.symmetry_table.erase(k);
  return o;
}

// base pool for saturation-heavy campaigns: no valence-0 operations
inline FinOperad gen_base_positive(Rng& rng, const GenCaps& caps) {
  switch (rng.below(4)) {
    case 0: return positive_com_operad(caps.operad_valence);
    case 1: return positive_as_sigma_operad(std::min(2, caps.operad_valence));
    case 2: return interval_operad(caps.operad_valence);
    default: return one_operad(caps.operad_valence);
  }
}

inline FinOperad gen_base_operad(Rng& rng, const GenCaps& caps) {
  switch (rng.below(4)) {
    case 0: return com_operad(caps.operad_valence);
    case 1: return as_sigma_operad(std::min(2, caps.operad_valence));
    case 2: return interval_operad(caps.operad_valence);
    default: return one_operad(caps.operad_valence);
  }
}

// duplicate one colour: the inverse image along the collapse of a fresh
// colour onto an existing one
inline FinOperad duplicate_colour(const FinOperad& p, const Colour& c, const std::string& fresh) {
  std::map<Colour, Colour> collapse;
  std::vector<Colour> dom = p.colours;
  for (const auto& x : p.colours) collapse[x] = x;
  Colour f{fresh};
  collapse[f] = c;
  dom.push_back(f);
  return inverse_image(collapse, dom, p);
}

inline OperadMorphism duplication_inclusion(const FinOperad& p, const Colour& c,
                                            const std::string& fresh) {
  OperadMorphism m;
  m.source = p;
  m.target = duplicate_colour(p, c, fresh);
  for (const auto& x : p.colours) m.colour_map[x] = x;
  for (const auto& [s, ops] : p.components)
    for (const auto& op : ops) m.components[s][op] = op;
  return m;
}

inline OperadMorphism duplication_collapse(const FinOperad& p, const Colour& c,
                                           const std::string& fresh) {
  FinOperad big = duplicate_colour(p, c, fresh);
  OperadMorphism m;
  m.source = big;
  m.target = p;
  for (const auto& x : big.colours) m.colour_map[x] = x.id == fresh ? c : x;
  for (const auto& [s, ops] : big.components)
    for (const auto& op : ops) m.components[s][op] = op;
  return m;
}

inline OperadMorphism gen_quotient(Rng& rng, const FinOperad& p, int max_seeds = 2) {
  std::vector<std::pair<std::pair<Signature, OpId>, std::pair<Signature, OpId>>> seeds;
  std::vector<std::pair<Signature, std::vector<OpId>>> pools;
  for (const auto& [s, ops] : p.components)
    if (ops.size() >= 2) pools.push_back({s, ops});
  int n = rng.below(max_seeds + 1);
  for (int i = 0; i < n && !pools.empty(); ++i) {
    const auto& [s, ops] = rng.pick(pools);
    OpId a = rng.pick(ops), b = rng.pick(ops);
    seeds.push_back({{s, a}, {s, b}});
  }
  return congruence_quotient(p, seeds).projection;
}

// a random operad as a short pipeline over a base
inline FinOperad gen_operad(Rng& rng, const GenCaps& caps) {
  FinOperad p = gen_base_operad(rng, caps);
  int steps = rng.below(3);
  for (int i = 0; i < steps; ++i) {
    if (rng.coin() && static_cast<int>(p.colours.size()) < caps.colours) {
      p = duplicate_colour(p, rng.pick(p.colours), "d" + std::to_string(i));
    } else {
      p = gen_quotient(rng, p).target;
    }
  }
  return p;
}

// ---------------------------------------------------------------------------
// Morphisms

// a random morphism out of p, by construction
inline OperadMorphism gen_morphism_from(Rng& rng, const FinOperad& p, const GenCaps& caps) {
  switch (rng.below(4)) {
    case 0: return identity_morphism(p);
    case 1: return gen_quotient(rng, p);
    case 2: {
      if (static_cast<int>(p.colours.size()) < caps.colours)
        return duplication_inclusion(p, rng.pick(p.colours), "w");
      return identity_morphism(p);
    }
    default: {
      // inclusion into a coproduct (not essentially surjective)
      OperadMorphism m;
      m.source = p;
      m.target = coproduct_operads(p, one_operad(p.max_valence));
      for (const auto& c : p.colours) m.colour_map[c] = Colour{"l_" + c.id};
      for (const auto& [s, ops] : p.components)
        for (const auto& op : ops) m.components[s][op] = op;
      return m;
    }
  }
}

inline std::pair<OperadMorphism, OperadMorphism> gen_composable_pair(Rng& rng, const GenCaps& caps) {
  FinOperad p = gen_operad(rng, caps);
  OperadMorphism f = gen_morphism_from(rng, p, caps);
  OperadMorphism g = gen_morphism_from(rng, f.target, caps);
  return {f, g};
}

// in-fiber span with at least one surjective leg (keeps the push-out
// saturation stabilizing at small bounds)
inline Span gen_span(Rng& rng, const GenCaps& caps) {
  FinOperad apex = gen_base_positive(rng, caps);
  if (rng.coin() && static_cast<int>(apex.colours.size()) < caps.colours)
    apex = duplicate_colour(apex, apex.colours[rng.below(static_cast<int>(apex.colours.size()))], "s");
  if (rng.coin()) apex = gen_quotient(rng, apex).target;
  Span sp;
  sp.apex = apex;
  sp.leg_x = gen_quotient(rng, apex);
  sp.leg_y = rng.coin() ? identity_morphism(apex) : gen_quotient(rng, apex);
  return sp;
}

// hypothesis-satisfying instance for the fully-faithful push-out: i is a
// colour-injective full inclusion, f is colour-injective
struct FfInstance {
  FinOperad apex;
  OperadMorphism i;
  OperadMorphism f;
};

inline FfInstance gen_ff_instance(Rng& rng, const GenCaps& caps) {
  FfInstance out;
  out.apex = gen_base_positive(rng, caps);
  out.i = duplication_inclusion(out.apex, rng.pick(out.apex.colours), "b");
  out.f = rng.coin() ? identity_morphism(out.apex) : gen_quotient(rng, out.apex);
  return out;
}

// right-properness instance: a fibration f : X -> Y and a weak equivalence
// w : B -> Y into the same target
struct ProperInstance {
  OperadMorphism fib;
  OperadMorphism we;
};

inline ProperInstance gen_proper_instance(Rng& rng, const GenCaps& caps) {
  FinOperad p = gen_base_operad(rng, caps);
  Colour c = rng.pick(p.colours);
  ProperInstance out;
  out.we = duplication_inclusion(p, c, "w");  // P -> Y
  const FinOperad& y = out.we.target;
  out.fib = duplication_collapse(y, rng.pick(y.colours), "f");  // X -> Y
  return out;
}

// free-map push-out data: X, a local injection K0 -> K1 over the fiber of
// X, and an attaching map K0 -> U(X)
struct FiltrationInstance {
  FinOperad x;
  MultiGraphMorphism inj;
  MultiGraphMorphism alpha;
  Signature s;
};

inline FiltrationInstance gen_filtration_instance(Rng& rng, const GenCaps& caps) {
  FiltrationInstance out;
  out.x = rng.coin() ? positive_com_operad(caps.operad_valence)
                     : positive_as_sigma_operad(std::min(2, caps.operad_valence));
  Colour c = out.x.colours.front();
  MultiGraph k0, k1;
  k0.colours = k1.colours = out.x.colours;
  k0.max_valence = k1.max_valence = out.x.max_valence;
  // K1: one or two generators at valence 1 or 2; K0: a sub-multigraph
  int val = 1 + rng.below(std::max(1, caps.valence - 1) + 0);
  Signature gs{std::vector<Colour>(val, c), c};
  int n1 = 1 + rng.below(caps.component);
  for (int i = 0; i < n1; ++i) k1.components[gs].push_back("w" + std::to_string(i));
  int n0 = rng.below(n1 + 1);
  for (int i = 0; i < n0; ++i) k0.components[gs].push_back("w" + std::to_string(i));
  out.inj.source = k0;
  out.inj.target = k1;
  out.inj.colour_map[c] = c;
  for (int i = 0; i < n0; ++i) out.inj.components[gs]["w" + std::to_string(i)] = "w" + std::to_string(i);
  out.alpha.source = k0;
  out.alpha.target = out.x.underlying_multigraph();
  out.alpha.colour_map[c] = c;
  for (int i = 0; i < n0; ++i) {
    const auto& pool = out.x.component(gs);
    out.alpha.components[gs]["w" + std::to_string(i)] = pool[rng.below(static_cast<int>(pool.size()))];
  }
  out.s = Signature{std::vector<Colour>(1 + rng.below(caps.valence), c), c};
  return out;
}

// multigraph with components at valences >= 2 (so free components stay
// finitely enumerable)
inline MultiGraph gen_multigraph(Rng& rng, const GenCaps& caps, int min_valence = 0) {
  MultiGraph k;
  int nc = 1 + rng.below(caps.colours);
  for (int i = 0; i < nc; ++i) k.colours.push_back(Colour{"c" + std::to_string(i)});
  k.max_valence = caps.operad_valence;
  int tries = 1 + rng.below(2);
  for (int t = 0; t < tries; ++t) {
    int val = min_valence + rng.below(caps.valence - min_valence + 1);
    Signature s;
    for (int i = 0; i < val; ++i) s.inputs.push_back(k.colours[rng.below(nc)]);
    s.output = k.colours[rng.below(nc)];
    int size = 1 + rng.below(caps.component);
    auto& ops = k.components[s];
    for (int i = 0; i < size; ++i) {
      OpId id = "k" + std::to_string(ops.size());
      ops.push_back(id);
    }
  }
  return k;
}

}  // namespace operadforge
