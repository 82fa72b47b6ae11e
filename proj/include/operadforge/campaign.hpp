#pragma once

// Seeded property campaigns shared by the CLI and the acceptance suite.
// Each runner draws its instances deterministically from the seed and
// returns the number of checked instances and of violations.

#include "operadforge/freeops.hpp"
#include "operadforge/generate.hpp"
#include "operadforge/model.hpp"

namespace operadforge {

struct CampaignOutcome {
  long checked = 0;
  long violations = 0;
  std::vector<std::string> notes;
  void fail(const std::string& why) {
    ++violations;
    if (notes.size() < 16) notes.push_back(why);
  }
};

inline CampaignOutcome campaign_two_out_of_three(uint64_t seed, long count, const GenCaps& caps = {}) {
  Rng rng(seed);
  CampaignOutcome out;
  for (long i = 0; i < count; ++i) {
    auto [f, g] = gen_composable_pair(rng, caps);
    ++out.checked;
    if (!two_out_of_three(f, g).holds) out.fail("2-out-of-3 failed at instance " + std::to_string(i));
  }
  return out;
}

inline CampaignOutcome campaign_dwyer_kan(uint64_t seed, long count, const GenCaps& caps = {}) {
  Rng rng(seed);
  CampaignOutcome out;
  for (long i = 0; i < count; ++i) {
    auto [f, g] = gen_composable_pair(rng, caps);
    ++out.checked;
    try {
      dwyer_kan_classify(f);
      dwyer_kan_classify(g);
      dwyer_kan_classify(compose_morphisms(g, f));
    } catch (const Error& e) {
      out.fail(std::string("Dwyer-Kan disagreement at instance ") + std::to_string(i));
    }
  }
  return out;
}

inline CampaignOutcome campaign_zigzag(uint64_t seed, long count, const GenCaps& caps = {}) {
  Rng rng(seed);
  CampaignOutcome out;
  for (long i = 0; i < count; ++i) {
    FinOperad base = gen_base_operad(rng, caps);
    Colour c = rng.pick(base.colours);
    FinOperad p = duplicate_colour(base, c, "z");
    ++out.checked;
    // transport one unary slot and the output between c and its duplicate
    std::vector<Colour> cs{c}, ds{Colour{"z"}};
    try {
      auto rep = zigzag_component_check(p, cs, ds, c, Colour{"z"});
      if (!rep.equal_cardinality) out.fail("zig-zag cardinality failed at " + std::to_string(i));
    } catch (const Error& e) {
      out.fail(std::string("zig-zag error: ") + e.what());
    }
  }
  return out;
}

inline CampaignOutcome campaign_right_proper(uint64_t seed, long count, const GenCaps& caps = {}) {
  Rng rng(seed);
  CampaignOutcome out;
  for (long i = 0; i < count; ++i) {
    auto inst = gen_proper_instance(rng, caps);
    ++out.checked;
    if (!classify(inst.fib).fibration || !classify(inst.we).weak_equivalence) {
      out.fail("instance " + std::to_string(i) + " failed its own hypotheses");
      continue;
    }
    auto pb = pullback(inst.fib, inst.we);
    // the induced map A -> X over w
    if (!classify(pb.to_p).weak_equivalence)
      out.fail("pullback of a fibration along a weak equivalence is not one at " + std::to_string(i));
  }
  return out;
}

inline CampaignOutcome campaign_tree_functoriality(uint64_t seed, long count, const GenCaps& caps = {}) {
  Rng rng(seed);
  CampaignOutcome out;
  // decorated trees in a fixed small catalog of shapes, pushed through
  // random quotients
  while (out.checked < count) {
    FinOperad p = gen_base_operad(rng, caps);
    OperadMorphism f = gen_quotient(rng, p);
    Colour c = rng.pick(p.colours);
    // a two-vertex shape with unary-or-binary vertices over colour c
    std::vector<OMTree> shapes;
    OMTree cor2 = corolla({c, c}, c);
    OMTree cor1 = corolla({c}, c);
    shapes.push_back(graft(cor2, cor2.tree.leaves(), {OMTree(cor1), empty_tree(c)}));
    shapes.push_back(graft(cor1, cor1.tree.leaves(), {cor2}));
    shapes.push_back(cor2);
    for (auto& t : shapes) {
      if (rng.coin() && t.leaf_order.size() == 2) std::swap(t.leaf_order[0], t.leaf_order[1]);
      std::vector<OpId> dec;
      bool ok = true;
      for (size_t v = 0; v < t.tree.vertices.size(); ++v) {
        Signature vs = t.vertex_signature(static_cast<int>(v));
        const auto& ops = p.component(vs);
        if (ops.empty()) {
          ok = false;
          break;
        }
        dec.push_back(ops[rng.below(static_cast<int>(ops.size()))]);
      }
      if (!ok) continue;
      ++out.checked;
      auto up = compose_along_tree(p, t, dec);
      std::vector<OpId> fdec;
      for (size_t v = 0; v < dec.size(); ++v)
        fdec.push_back(f.map_op(t.vertex_signature(static_cast<int>(v)), dec[v]));
      auto down = compose_along_tree(f.target, t, fdec);
      if (f.map_op(up.signature, up.op) != down.op)
        out.fail("composition along a tree is not functorial");
      if (out.checked >= count) break;
    }
  }
  return out;
}

inline CampaignOutcome campaign_hom_count(uint64_t seed, long count, const GenCaps& caps = {}) {
  Rng rng(seed);
  CampaignOutcome out;
  for (long i = 0; i < count; ++i) {
    MultiGraph k = gen_multigraph(rng, caps, 2);
    FinOperad p = rng.coin() ? com_operad(caps.operad_valence) : as_sigma_operad(2);
    ++out.checked;
    auto r = hom_count_check(k, p, std::min(3, p.max_valence), 2);
    if (!r.equal) out.fail("adjunction bijection failed at instance " + std::to_string(i));
  }
  return out;
}

inline CampaignOutcome campaign_pushout_universal(uint64_t seed, long spans, long cocones_per,
                                                  const GenCaps& caps = {}, int bound = 3) {
  Rng rng(seed);
  CampaignOutcome out;
  long made = 0;
  long attempts = 0;
  while (made < spans && attempts < spans * 10) {
    ++attempts;
    Span sp = gen_span(rng, caps);
    MaterializedPushout z;
    try {
      z = materialize_pushout(sp, bound);
    } catch (const Error&) {
      continue;
    }
    if (!z.exact) continue;  // the criterion quantifies over stabilized saturations
    ++made;
    // cocones: commuting pairs into a small catalog of targets
    std::vector<FinOperad> targets{sp.leg_x.target, sp.leg_y.target, com_operad(sp.apex.max_valence)};
    long used = 0;
    for (const auto& L : targets) {
      if (!(L.colours.size() == sp.apex.colours.size())) continue;
      MorphismSearchOptions opt;
      opt.budget = 200000;
      std::vector<OperadMorphism> hs, ks;
      try {
        hs = enumerate_operad_morphisms(sp.leg_x.target, L, opt);
        ks = enumerate_operad_morphisms(sp.leg_y.target, L, opt);
      } catch (const Error&) {
        continue;
      }
      for (const auto& h : hs) {
        for (const auto& k : ks) {
          if (used >= cocones_per) break;
          Cocone cc{h, k};
          auto hx = compose_morphisms(h, sp.leg_x);
          auto ky = compose_morphisms(k, sp.leg_y);
          if (!(hx.colour_map == ky.colour_map && hx.components == ky.components)) continue;
          ++used;
          ++out.checked;
          auto rep = check_pushout_universal(z, sp, cc);
          if (!rep.mediating_exists || !rep.mediating_unique)
            out.fail("universal property failed: " + rep.detail);
        }
        if (used >= cocones_per) break;
      }
      if (used >= cocones_per) break;
    }
    // cross-check against the congruence oracle when a leg is surjective
    // (quotient legs always are): Z classes must match the quotient of the
    // other foot by the kernel congruence
    const OperadMorphism& alpha = sp.leg_x;  // surjective by construction
    std::vector<std::pair<std::pair<Signature, OpId>, std::pair<Signature, OpId>>> seeds;
    for (const auto& [s, ops] : sp.apex.components)
      for (const auto& a : ops)
        for (const auto& b : ops)
          if (alpha.map_op(s, a) == alpha.map_op(s, b))
            seeds.push_back({{sp.leg_y.map_signature(s), sp.leg_y.map_op(s, a)},
                             {sp.leg_y.map_signature(s), sp.leg_y.map_op(s, b)}});
    auto oracle = congruence_quotient(sp.leg_y.target, seeds);
    for (const auto& [s, ids] : z.operad.components) {
      ++out.checked;
      if (oracle.operad.component(s).size() != ids.size())
        out.fail("class count disagrees with the congruence oracle at " + s.key());
    }
  }
  if (made < spans) out.fail("generator exhausted before reaching the requested span count");
  return out;
}

inline CampaignOutcome campaign_ff_pushout(uint64_t seed, long count, const GenCaps& caps = {},
                                           int bound = 4) {
  Rng rng(seed);
  CampaignOutcome out;
  for (long i = 0; i < count; ++i) {
    auto inst = gen_ff_instance(rng, caps);
    ++out.checked;
    try {
      auto rep = pushout_fully_faithful(inst.apex, inst.i, inst.f, bound, 2);
      if (!rep.hypotheses_ok)
        out.fail("generated instance violates its hypotheses at " + std::to_string(i));
      else if (!rep.exact)
        out.fail("saturation did not stabilize at " + std::to_string(i));
      else if (!rep.h_colour_injective || !rep.h_fully_faithful)
        out.fail("fully-faithful preservation failed at " + std::to_string(i));
    } catch (const Error& e) {
      out.fail(std::string("error: ") + e.what());
    }
  }
  return out;
}

}  // namespace operadforge
