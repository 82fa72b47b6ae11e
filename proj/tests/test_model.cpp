#include <catch2/catch_amalgamated.hpp>

#include "operadforge/model.hpp"

using namespace operadforge;

namespace {

Colour C(const std::string& s) { return Colour{s}; }

Signature sig(const std::vector<std::string>& in, const std::string& out) {
  Signature s;
  for (const auto& i : in) s.inputs.emplace_back(i);
  s.output = Colour{out};
  return s;
}

OperadMorphism one_into_interval() {
  OperadMorphism m;
  m.source = one_operad(3);
  m.target = interval_operad(3);
  m.colour_map[C("0")] = C("0");
  m.components[sig({"0"}, "0")]["u"] = "u";
  return m;
}

OperadMorphism interval_collapse() {
  OperadMorphism m;
  m.source = interval_operad(3);
  m.target = one_operad(3);
  for (const auto& c : m.source.colours) m.colour_map[c] = C("0");
  for (const auto& [s, ops] : m.source.components)
    for (const auto& op : ops) m.components[s][op] = "u";
  return m;
}

}  // namespace

TEST_CASE("colour equivalences") {
  auto eq = colour_equivalences(interval_operad(2));
  CHECK(eq.classes.size() == 1);
  CHECK(eq.equivalent(C("0"), C("1")));
  auto w = eq.witness.at({C("0"), C("1")});
  CHECK(w.first == "u");

  CHECK(colour_equivalences(com_operad(2)).classes.size() == 1);

  auto two = coproduct_operads(one_operad(2), one_operad(2));
  auto eq2 = colour_equivalences(two);
  CHECK(eq2.classes.size() == 2);
  CHECK_FALSE(eq2.equivalent(C("l_0"), C("r_0")));
}

TEST_CASE("classify basic morphisms") {
  auto idm = classify(identity_morphism(com_operad(2)));
  CHECK(idm.fully_faithful);
  CHECK(idm.weak_equivalence);
  CHECK(idm.fibration);
  CHECK(idm.trivial_fibration);
  CHECK(idm.internally_consistent());

  // the interval cell 1 -> I: a weak equivalence but not a fibration
  auto cell = classify(one_into_interval());
  CHECK(cell.weak_equivalence);
  CHECK(cell.fully_faithful);
  CHECK(cell.essentially_surjective);
  CHECK_FALSE(cell.path_lifting);
  CHECK_FALSE(cell.fibration);
  CHECK_FALSE(cell.trivial_fibration);
  CHECK(cell.internally_consistent());

  // the collapse I -> 1: a trivial fibration
  auto col = classify(interval_collapse());
  CHECK(col.weak_equivalence);
  CHECK(col.trivial_fibration);
  CHECK(col.local_trivfib);
  CHECK(col.surjective_on_colours);
  CHECK(col.internally_consistent());
}

TEST_CASE("lifting solver") {
  auto one = one_operad(2);
  auto iv = interval_operad(2);
  // p an isomorphism: every square lifts
  LiftSquare sq;
  sq.i = one_into_interval();
  sq.i.source = one_operad(2);
  sq.i.target = interval_operad(2);
  sq.p = identity_morphism(iv);
  sq.top = sq.i;
  sq.bot = identity_morphism(iv);
  // square: top = i, bot = id: commutes since p = id
  auto sq2 = sq;
  sq2.bot = compose_morphisms(identity_morphism(iv), sq.i);
  // build the actual commuting square: bot o i = p o top
  LiftSquare good{sq.i, identity_morphism(iv), sq.i, identity_morphism(iv)};
  CHECK(square_commutes(good));
  auto r = has_rlp(good);
  CHECK(r.lift.has_value());

  // colour cell 0 -> 1 against a colour-surjective p: lift exists
  auto gens = generating_sets(1, 2);
  const auto& colour_cell = gens.I.back().mor;
  OperadMorphism p = interval_collapse();
  p.source = interval_operad(2);
  p.target = one_operad(2);
  CHECK(has_rlp_all_squares(colour_cell, p));
  // and against a non-surjective p: fails
  auto incl = one_into_interval();
  incl.source = one_operad(2);
  incl.target = interval_operad(2);
  CHECK_FALSE(has_rlp_all_squares(colour_cell, incl));
}

TEST_CASE("generating sets") {
  auto gens = generating_sets(2, 3);
  // C_0(0->1) freely adjoins one nullary operation
  const auto& c0 = gens.I[0].mor;
  CHECK(c0.source.component(sig({}, "0")).empty());
  CHECK(c0.target.component(sig({}, "0")).size() == 1);
  CHECK(validate_operad(c0.target).pass());
  CHECK(validate_morphism(c0).pass());

  // C_2 carries the free multigraph generator at (1,2;0) in both seats
  auto c2t = gens.I[2 * 2].mor.target;  // C_2(0->1)
  CHECK(validate_operad(c2t).pass());
  CHECK(c2t.component(sig({"1", "2"}, "0")).size() == 1);
  CHECK(c2t.component(sig({"2", "1"}, "0")).size() == 1);
  CHECK(c2t.component(sig({"1", "1"}, "0")).empty());

  // the interval member connects the builtins
  const auto& j = gens.J.front().mor;
  CHECK(isomorphic(j.source, one_operad(3)));
  CHECK(isomorphic(j.target, interval_operad(3)));

  // C_n(2->1) validates as a morphism
  CHECK(validate_morphism(gens.I[1].mor).pass());
  CHECK(validate_morphism(gens.I[3].mor).pass());
}

TEST_CASE("trivial fibration iff RLP against the generating cofibrations") {
  auto gens = generating_sets(2, 2);
  std::vector<OperadMorphism> probes{identity_morphism(interval_operad(2)), interval_collapse(),
                                     one_into_interval()};
  probes[1].source = interval_operad(2);
  probes[1].target = one_operad(2);
  probes[2].source = one_operad(2);
  probes[2].target = interval_operad(2);
  for (const auto& p : probes) {
    bool trivfib = classify(p).trivial_fibration;
    bool rlp = true;
    for (const auto& g : gens.I)
      if (!has_rlp_all_squares(g.mor, p)) rlp = false;
    CHECK(trivfib == rlp);
  }
}

TEST_CASE("path lifting needs only the generating interval") {
  // the lifting against j_!(i_1) is exactly the path-lifting flag, and any
  // renamed interval gives the same answer
  auto gens = generating_sets(0, 2);
  const auto& j = gens.J.front().mor;
  std::vector<OperadMorphism> probes{identity_morphism(interval_operad(2)), one_into_interval()};
  probes[1].source = one_operad(2);
  probes[1].target = interval_operad(2);
  for (const auto& p : probes) {
    CHECK(classify(p).path_lifting == has_rlp_all_squares(j, p));
  }
}

TEST_CASE("amalgamation") {
  auto iv = interval_operad(3);
  auto r = amalgamate(iv, iv, 4);
  CHECK(r.exact);
  CHECK(validate_operad(r.operad).pass());
  // contains an invertible 0 -> 1 (the composite of the two isomorphisms)
  auto isos = unary_isos(r.operad, C("0"), C("1"));
  CHECK(!isos.empty());

  // a trivial H (only units on two objects) against K gives K-like homs
  auto trivial2 = coproduct_operads(one_operad(3), one_operad(3));
  // rename colours to {0,1}
  std::map<Colour, Colour> ren{{C("0"), C("l_0")}, {C("1"), C("r_0")}};
  auto h = inverse_image(ren, {C("0"), C("1")}, trivial2);
  auto r2 = amalgamate(h, iv, 4);
  CHECK(r2.exact);
  CHECK(r2.operad.component(sig({"0"}, "0")).size() == 1);
  CHECK(r2.operad.component(sig({"0"}, "1")).empty());
  CHECK(r2.operad.component(sig({"1"}, "1")).size() == 1);
}

TEST_CASE("two out of three") {
  auto f = one_into_interval();
  auto g = interval_collapse();
  auto rep = two_out_of_three(f, g);
  CHECK(rep.f.weak_equivalence);
  CHECK(rep.g.weak_equivalence);
  CHECK(rep.gf.weak_equivalence);
  CHECK(rep.holds);

  auto ids = two_out_of_three(identity_morphism(com_operad(2)), identity_morphism(com_operad(2)));
  CHECK(ids.holds);
}

TEST_CASE("zig-zag component transport") {
  // identical tuples: the identity bijection
  auto com = com_operad(3);
  auto rep = zigzag_component_check(com, {C("0"), C("0")}, {C("0"), C("0")}, C("0"), C("0"));
  CHECK(rep.equal_cardinality);
  for (const auto& [x, y] : rep.bijection) CHECK(x == y);

  // As_Sigma pulled back to two equivalent colours: components transport
  std::map<Colour, Colour> collapse{{C("0"), C("0")}, {C("1"), C("0")}};
  auto big = inverse_image(collapse, {C("0"), C("1")}, as_sigma_operad(3));
  REQUIRE(validate_operad(big).pass());
  auto rep2 = zigzag_component_check(big, {C("0"), C("0")}, {C("1"), C("1")}, C("0"), C("1"));
  CHECK(rep2.equal_cardinality);
  CHECK(rep2.bijection.size() == 2);

  CHECK_THROWS_AS(zigzag_component_check(coproduct_operads(one_operad(2), one_operad(2)), {},
                                         {}, C("l_0"), C("r_0")),
                  Error);
}

TEST_CASE("Dwyer-Kan agreement") {
  CHECK(dwyer_kan_classify(identity_morphism(com_operad(2))));
  CHECK(dwyer_kan_classify(one_into_interval()));
  CHECK(dwyer_kan_classify(interval_collapse()));

  // locally bijective but not essentially surjective
  auto two = coproduct_operads(one_operad(2), one_operad(2));
  OperadMorphism incl;
  incl.source = one_operad(2);
  incl.target = two;
  incl.colour_map[C("0")] = C("l_0");
  incl.components[sig({"0"}, "0")]["u"] = "u";
  REQUIRE(validate_morphism(incl).pass());
  CHECK_FALSE(dwyer_kan_classify(incl));
  CHECK_FALSE(classify(incl).weak_equivalence);
}

TEST_CASE("weak equivalences are closed under retracts") {
  // g = w + id_R is exhibited as a retract of itself through the coproduct
  // inclusion and fold; more usefully, w is a retract of w + id_R
  auto w = one_into_interval();
  auto r_op = com_operad(3, "r");
  // f = w + id_R
  OperadMorphism f;
  f.source = coproduct_operads(w.source, r_op);
  f.target = coproduct_operads(w.target, r_op);
  for (const auto& c : w.source.colours) f.colour_map[Colour{"l_" + c.id}] = Colour{"l_" + w.map_colour(c).id};
  for (const auto& c : r_op.colours) f.colour_map[Colour{"r_" + c.id}] = Colour{"r_" + c.id};
  for (const auto& [s, ops] : f.source.components) {
    bool left = s.output.id.rfind("l_", 0) == 0;
    for (const auto& op : ops) {
      if (left) {
        Signature plain;
        plain.output = Colour{s.output.id.substr(2)};
        for (const auto& c : s.inputs) plain.inputs.push_back(Colour{c.id.substr(2)});
        f.components[s][op] = w.map_op(plain, op);
      } else {
        f.components[s][op] = op;
      }
    }
  }
  REQUIRE(validate_morphism(f).pass());
  REQUIRE(classify(f).weak_equivalence);

  // retract diagram: w = (projection) o f o (inclusion); conclude w is a
  // weak equivalence and confirm with classify
  CHECK(classify(w).weak_equivalence);
}

TEST_CASE("model report consistency on assorted morphisms") {
  std::vector<OperadMorphism> all{identity_morphism(com_operad(2)), one_into_interval(),
                                  interval_collapse()};
  for (const auto& m : all) CHECK(classify(m).internally_consistent());
}
