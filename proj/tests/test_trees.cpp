#include <catch2/catch_amalgamated.hpp>

#include "operadforge/builtins.hpp"
#include "operadforge/trees.hpp"

using namespace operadforge;

namespace {

Colour C(const std::string& s) { return Colour{s}; }

Signature sig(const std::vector<std::string>& in, const std::string& out) {
  Signature s;
  for (const auto& i : in) s.inputs.emplace_back(i);
  s.output = Colour{out};
  return s;
}

// Independent oracle: all transported isomorphisms between two ordered
// marked trees by recursive matching, ignoring canonical forms entirely.
bool omtrees_isomorphic(const OMTree& a, const OMTree& b) {
  if (a.tree.n_edges != b.tree.n_edges) return false;
  if (a.tree.vertices.size() != b.tree.vertices.size()) return false;
  std::vector<int> pos_a(a.tree.n_edges, -1), pos_b(b.tree.n_edges, -1);
  for (size_t i = 0; i < a.leaf_order.size(); ++i) pos_a[a.leaf_order[i]] = static_cast<int>(i);
  for (size_t i = 0; i < b.leaf_order.size(); ++i) pos_b[b.leaf_order[i]] = static_cast<int>(i);

  std::function<bool(int, int)> match = [&](int ea, int eb) -> bool {
    if (!(a.labels[ea] == b.labels[eb])) return false;
    int va = a.tree.vertex_above(ea), vb = b.tree.vertex_above(eb);
    if ((va < 0) != (vb < 0)) return false;
    if (va < 0) return pos_a[ea] == pos_b[eb];
    if (a.marks[va] != b.marks[vb]) return false;
    const auto& ia = a.tree.vertices[va].in_edges;
    const auto& ib = b.tree.vertices[vb].in_edges;
    if (ia.size() != ib.size()) return false;
    // transported isomorphisms preserve the planar order
    for (size_t i = 0; i < ia.size(); ++i)
      if (!match(ia[i], ib[i])) return false;
    return true;
  };
  return match(a.tree.root, b.tree.root);
}

OMTree relabel_edges(const OMTree& t, const Perm& p) {
  OMTree r = t;
  r.labels.resize(t.tree.n_edges);
  for (int e = 0; e < t.tree.n_edges; ++e) r.labels[p[e]] = t.labels[e];
  r.tree.root = p[t.tree.root];
  for (size_t v = 0; v < t.tree.vertices.size(); ++v) {
    r.tree.vertices[v].out_edge = p[t.tree.vertices[v].out_edge];
    for (size_t i = 0; i < t.tree.vertices[v].in_edges.size(); ++i)
      r.tree.vertices[v].in_edges[i] = p[t.tree.vertices[v].in_edges[i]];
  }
  for (size_t i = 0; i < t.leaf_order.size(); ++i) r.leaf_order[i] = p[t.leaf_order[i]];
  return r;
}

}  // namespace

TEST_CASE("empty tree and corolla are structurally valid") {
  OMTree e = empty_tree(C("c"));
  CHECK_FALSE(e.validate().has_value());
  CHECK(e.arity() == sig({"c"}, "c"));

  OMTree c2 = corolla({C("a"), C("b")}, C("c"));
  CHECK_FALSE(c2.validate().has_value());
  CHECK(c2.arity() == sig({"a", "b"}, "c"));
  CHECK(c2.tree.leaves() == std::vector<int>{0, 1});
}

TEST_CASE("grafting") {
  OMTree c2 = corolla({C("a"), C("b")}, C("c"));
  // grafting empty trees is the identity
  auto same = graft(c2, c2.tree.leaves(), {empty_tree(C("a")), empty_tree(C("b"))});
  CHECK(canonicalize(same).form == canonicalize(c2).form);

  // graft(C_2, [C_1, |]) has 4 edges = 3 + 2 - 1
  OMTree c1 = corolla({C("d")}, C("a"));
  auto g = graft(c2, c2.tree.leaves(), {c1, empty_tree(C("b"))});
  CHECK(g.tree.n_edges == 4);
  CHECK(g.tree.vertices.size() == 2);
  CHECK(g.arity() == sig({"d", "b"}, "c"));

  // label mismatch
  CHECK_THROWS_AS(graft(c2, c2.tree.leaves(), {c1, empty_tree(C("a"))}), Error);
  // arity mismatch
  CHECK_THROWS_AS(graft(c2, c2.tree.leaves(), {c1}), Error);

  // associativity up to canonical form: graft in two steps vs one step
  OMTree c1b = corolla({C("x")}, C("d"));
  auto two_step = graft(g, g.leaf_order, {c1b, empty_tree(C("b"))});
  auto big_first = graft(c2, c2.tree.leaves(), {graft(c1, c1.tree.leaves(), {c1b}), empty_tree(C("b"))});
  CHECK(canonicalize(two_step).form == canonicalize(big_first).form);
}

TEST_CASE("elementary morphisms") {
  // binary over binary; contracting the inner edge gives the 3-corolla
  OMTree bot = corolla({C("a"), C("b")}, C("d"));
  OMTree top = corolla({C("x"), C("y")}, C("a"));
  auto t = graft(bot, bot.tree.leaves(), {top, empty_tree(C("b"))});
  REQUIRE(t.tree.vertices.size() == 2);
  int inner = -1;
  for (int e = 0; e < t.tree.n_edges; ++e)
    if (t.tree.is_inner_edge(e)) inner = e;
  REQUIRE(inner >= 0);
  auto [contracted, m] = inner_face(t.ctree(), inner);
  CHECK(contracted.tree.vertices.size() == 1);
  CHECK(contracted.tree.n_edges == 4);
  CHECK(contracted.tree.vertices[0].in_edges.size() == 3);
  // the inclusion hits every edge but the contracted one
  CHECK(m.edge_map.size() == 4);

  // degeneracy on a two-edge vertex removes it and merges the edges
  OMTree u = corolla({C("c")}, C("c"));
  auto chain = graft(corolla({C("c")}, C("c")), {0}, {u});
  REQUIRE(chain.tree.vertices.size() == 2);
  auto [reduced, dm] = degeneracy(chain.ctree(), 0);
  CHECK(reduced.tree.n_edges == chain.tree.n_edges - 1);
  CHECK(reduced.tree.vertices.size() == 1);

  // outer face of a corolla from the empty tree
  OMTree c1 = corolla({C("a")}, C("c"));
  auto of = outer_face_corolla(c1.ctree(), 0);
  CHECK(of.source.tree.is_empty());
  CHECK(of.edge_map == std::vector<int>{0});

  // outer face pruning the top vertex of the two-vertex tree
  int topv = t.tree.vertex_above(inner) == 1 ? 1 : 0;
  auto [pruned, pm] = outer_face(t.ctree(), topv);
  CHECK(pruned.tree.vertices.size() == 1);
}

TEST_CASE("tree operad") {
  auto empty = tree_operad(empty_tree(C("c")).ctree());
  CHECK(validate_operad(empty).pass());
  CHECK(empty.colours.size() == 1);
  CHECK(empty.component(sig({"e0"}, "e0")).size() == 1);
  CHECK(empty.component(sig({"e0", "e0"}, "e0")).empty());

  OMTree c2 = corolla({C("a"), C("b")}, C("c"));
  auto om = tree_operad(c2.ctree());
  CHECK(validate_operad(om).pass());
  // both orders of the corolla's own signature are present
  CHECK(om.component(sig({"e0", "e1"}, "e2")).size() == 1);
  CHECK(om.component(sig({"e1", "e0"}, "e2")).size() == 1);
  for (const auto& [s, ops] : om.components) CHECK(ops.size() <= 1);

  // a two-vertex tree has the grafted composite among its operations
  OMTree top = corolla({C("x"), C("y")}, C("a"));
  auto t = graft(c2, c2.tree.leaves(), {top, empty_tree(C("b"))});
  auto ot = tree_operad(t.ctree());
  CHECK(validate_operad(ot).pass());
  // the full subtree: root edge is t.tree.root, leaves are the 3 leaf edges
  auto lv = t.tree.leaves();
  Signature full;
  full.output = Colour{"e" + std::to_string(t.tree.root)};
  for (int e : lv) full.inputs.push_back(Colour{"e" + std::to_string(e)});
  CHECK(ot.component(full).size() == 1);
}

TEST_CASE("canonical forms") {
  OMTree c2 = corolla({C("a"), C("b")}, C("c"));
  // relabeling invariance
  auto r = relabel_edges(c2, Perm{2, 0, 1});
  CHECK(canonicalize(c2).form == canonicalize(r).form);

  // mirror planar structures with distinct leaf labels differ
  OMTree mirror = c2;
  std::swap(mirror.tree.vertices[0].in_edges[0], mirror.tree.vertices[0].in_edges[1]);
  CHECK(canonicalize(c2).form != canonicalize(mirror).form);

  // one-colour corolla with swapped leaf order differs (the seat changes)
  OMTree cc = corolla({C("a"), C("a")}, C("c"));
  OMTree cc_swapped = cc;
  std::swap(cc_swapped.leaf_order[0], cc_swapped.leaf_order[1]);
  CHECK(canonicalize(cc).form != canonicalize(cc_swapped).form);
  // but relabeling both planar and leaf order together is an isomorphism
  auto transported = relabel_edges(cc, Perm{1, 0, 2});
  CHECK(canonicalize(cc).form == canonicalize(transported).form);
}

TEST_CASE("canonical equality matches brute-force isomorphism on enumerated trees") {
  std::vector<Colour> cols{C("a"), C("b")};
  EnumTreeOptions opt;
  opt.max_arity = 2;
  auto trees = enumerate_trees(cols, sig({"a", "b"}, "a"), {"x", "y"}, 3, opt);
  REQUIRE(trees.size() >= 4);
  // pairwise: canonical equality iff brute-force isomorphism
  int checked = 0;
  for (size_t i = 0; i < trees.size() && i < 18; ++i)
    for (size_t j = 0; j < trees.size() && j < 18; ++j) {
      bool canon_eq = canonicalize(trees[i]).form == canonicalize(trees[j]).form;
      CHECK(canon_eq == omtrees_isomorphic(trees[i], trees[j]));
      ++checked;
    }
  CHECK(checked > 0);
  // random relabelings stay equal
  for (size_t i = 0; i < trees.size() && i < 10; ++i) {
    Perm p = perm_identity(trees[i].tree.n_edges);
    std::next_permutation(p.begin(), p.end());
    auto r = relabel_edges(trees[i], p);
    CHECK(canonicalize(trees[i]).form == canonicalize(r).form);
    CHECK(omtrees_isomorphic(trees[i], r));
  }
}

TEST_CASE("composition along a tree") {
  auto as = as_sigma_operad(4);

  // empty tree gives the unit
  auto e = compose_along_tree(as, empty_tree(C("0")), {});
  CHECK(e.op == as.unit(C("0")));

  // corolla with planar leaf order: the decoration itself
  OMTree cor = corolla({C("0"), C("0")}, C("0"));
  auto d = compose_along_tree(as, cor, {"p01"});
  CHECK(d.op == "p01");

  // corolla with the opposite leaf order: the seat moves
  OMTree cor_sw = cor;
  std::swap(cor_sw.leaf_order[0], cor_sw.leaf_order[1]);
  CHECK(compose_along_tree(as, cor_sw, {"p01"}).op == "p10");
  CHECK(twisting(cor_sw) == Perm{1, 0});
  CHECK(twisting(cor) == Perm{0, 1});

  // two-vertex tree decorated with binary operations in As_Sigma: both
  // association shapes with standard orders give the standard ternary word
  OMTree left = graft(cor, cor.tree.leaves(), {corolla({C("0"), C("0")}, C("0")), empty_tree(C("0"))});
  auto lv = compose_along_tree(as, left, {"p01", "p01"});
  CHECK(lv.op == "p012");
  OMTree right = graft(cor, cor.tree.leaves(), {empty_tree(C("0")), corolla({C("0"), C("0")}, C("0"))});
  auto rv = compose_along_tree(as, right, {"p01", "p01"});
  CHECK(rv.op == "p012");

  // a non-planar leaf order on the left shape re-seats the word: the leaf
  // order [l2, l1, l0] must give the reversed product
  OMTree twisted = left;
  std::reverse(twisted.leaf_order.begin(), twisted.leaf_order.end());
  auto tv = compose_along_tree(as, twisted, {"p01", "p01"});
  CHECK(tv.op == "p210");

  // functoriality through the collapse As_Sigma -> Com
  auto com = com_operad(4);
  OperadMorphism phi;
  phi.source = as;
  phi.target = com;
  phi.colour_map[C("0")] = C("0");
  for (const auto& [s, ops] : as.components)
    for (const auto& op : ops) phi.components[s][op] = "m";
  for (const auto* t : {&left, &right, &twisted}) {
    auto upstairs = compose_along_tree(as, *t, {"p01", "p01"});
    auto downstairs = compose_along_tree(com, *t, {"m", "m"});
    CHECK(phi.map_op(upstairs.signature, upstairs.op) == downstairs.op);
  }
}

TEST_CASE("tree enumeration") {
  std::vector<Colour> one{C("c")};
  // arity (c;c), zero vertices: exactly the empty tree
  auto e = enumerate_trees(one, sig({"c"}, "c"), {"x"}, 0);
  REQUIRE(e.size() == 1);
  CHECK(e[0].tree.is_empty());

  // arity (a,b;c), one vertex: exactly two trees
  std::vector<Colour> ab{C("a"), C("b"), C("c")};
  auto two = enumerate_trees(ab, sig({"a", "b"}, "c"), {"x"}, 1);
  CHECK(two.size() == 2);

  // counts over one colour are monotone in the vertex bound
  EnumTreeOptions opt;
  opt.max_arity = 2;
  size_t prev = 0;
  for (int v = 0; v <= 3; ++v) {
    auto ts = enumerate_trees(one, sig({"c", "c"}, "c"), {"x"}, v, opt);
    CHECK(ts.size() >= prev);
    prev = ts.size();
  }
}

TEST_CASE("tree enumeration agrees with an independent unlabeled count") {
  // Independent oracle for one colour, one mark, arity (c,c;c), max arity 2:
  // enumerate (planar shape, leaf order) pairs directly by brute force and
  // quotient by the brute-force isomorphism test.
  std::vector<Colour> one{C("c")};
  EnumTreeOptions opt;
  opt.max_arity = 2;
  auto lib = enumerate_trees(one, sig({"c", "c"}, "c"), {"x"}, 2, opt);

  // oracle: trees with <= 2 vertices, arities <= 2, 2 leaves, one colour.
  // Shapes: single binary corolla; binary corolla with a unary vertex on a
  // leg (two legs) or below the root; binary over nullary is ruled out (2
  // leaves); unary chains have 1 leaf. Each shape carries 2 leaf orders.
  // Count distinct pairs modulo isomorphism by building them explicitly.
  std::vector<OMTree> oracle;
  OMTree c2 = corolla({C("c"), C("c")}, C("c"));
  OMTree u = corolla({C("c")}, C("c"));
  auto push_orders = [&](OMTree t) {
    auto lv = t.tree.leaves();
    t.leaf_order = lv;
    oracle.push_back(t);
    std::swap(t.leaf_order[0], t.leaf_order[1]);
    oracle.push_back(t);
  };
  push_orders(c2);
  push_orders(graft(c2, c2.tree.leaves(), {u, empty_tree(C("c"))}));
  push_orders(graft(c2, c2.tree.leaves(), {empty_tree(C("c")), u}));
  push_orders(graft(u, u.tree.leaves(), {c2}));
  // quotient by isomorphism
  std::vector<OMTree> reps;
  for (const auto& t : oracle) {
    bool found = false;
    for (const auto& r : reps)
      if (omtrees_isomorphic(t, r)) found = true;
    if (!found) reps.push_back(t);
  }
  CHECK(lib.size() == reps.size());
}

TEST_CASE("planar invariants") {
  OMTree c2 = corolla({C("a"), C("b")}, C("c"));
  auto morphs = enumerate_tree_morphisms(c2.ctree(), c2.ctree());
  // identity and nothing else (labels distinct)
  REQUIRE(morphs.size() == 1);
  auto inv = planar_invariants(morphs[0], c2.leaf_order, c2.leaf_order);
  CHECK(perm_is_identity(inv.leaf_perm));
  CHECK(perm_is_identity(inv.sigma[0]));

  // the swap isomorphism of the one-colour corolla has pi = transposition
  OMTree cc = corolla({C("a"), C("a")}, C("c"));
  auto autos = enumerate_tree_morphisms(cc.ctree(), cc.ctree());
  REQUIRE(autos.size() == 2);
  bool saw_swap = false;
  for (const auto& m : autos) {
    auto iv = planar_invariants(m, cc.leaf_order, cc.leaf_order);
    if (!perm_is_identity(iv.leaf_perm)) {
      saw_swap = true;
      CHECK(iv.leaf_perm == Perm{1, 0});
    }
  }
  CHECK(saw_swap);
}

TEST_CASE("tree morphism enumeration") {
  // | -> C_1: one morphism per edge
  OMTree c1 = corolla({C("c")}, C("c"));
  auto ms = enumerate_tree_morphisms(empty_tree(C("c")).ctree(), c1.ctree());
  CHECK(ms.size() == 2);

  // C_n -> C_n contains the n! isomorphisms over one colour
  OMTree c3 = corolla({C("c"), C("c"), C("c")}, C("c"));
  auto am = enumerate_tree_morphisms(c3.ctree(), c3.ctree());
  int isos = 0;
  for (const auto& m : am) {
    bool bij = true;
    std::set<int> img(m.edge_map.begin(), m.edge_map.end());
    bij = img.size() == m.edge_map.size();
    if (bij) ++isos;
  }
  CHECK(isos == 6);

  // generator words replay to the edge map
  OMTree bot = corolla({C("c"), C("c")}, C("c"));
  OMTree top = corolla({C("c"), C("c")}, C("c"));
  auto t2 = graft(bot, bot.tree.leaves(), {top, empty_tree(C("c"))});
  for (const auto& pair :
       {std::make_pair(empty_tree(C("c")), t2), std::make_pair(c1, t2), std::make_pair(bot, t2)}) {
    auto mm = enumerate_tree_morphisms(pair.first.ctree(), pair.second.ctree());
    CHECK(!mm.empty());
    for (const auto& m : mm) CHECK(replay_word(m.source, m.word) == m.edge_map);
  }
  // and in the degenerate direction: a unary chain collapses onto C_1
  OMTree u = corolla({C("c")}, C("c"));
  auto chain2 = graft(u, u.tree.leaves(), {u});
  auto down = enumerate_tree_morphisms(chain2.ctree(), c1.ctree());
  for (const auto& m : down) CHECK(replay_word(m.source, m.word) == m.edge_map);
  CHECK(down.size() == 4);
}

TEST_CASE("operad-of-operads components") {
  std::vector<Colour> cols{C("c")};
  // no inputs, output (c;c): exactly the empty tree
  auto unit = operad_of_operads_component(cols, {}, sig({"c"}, "c"));
  REQUIRE(unit.size() == 1);
  CHECK(unit[0].tree.is_empty());

  // one input (a,b;c): the corolla in both seats
  std::vector<Colour> abc{C("a"), C("b"), C("c")};
  auto comp1 = operad_of_operads_component(abc, {sig({"a", "b"}, "c")}, sig({"a", "b"}, "c"));
  CHECK(comp1.size() == 1);
  auto comp2 = operad_of_operads_component(abc, {sig({"a", "b"}, "c")}, sig({"b", "a"}, "c"));
  CHECK(comp2.size() == 1);

  // acting on As_Sigma by composition along these trees respects
  // composition: nested vs grafted agree
  auto as = as_sigma_operad(4);
  auto outer = operad_of_operads_component({C("0")}, {sig({"0", "0"}, "0"), sig({"0", "0"}, "0")},
                                           sig({"0", "0", "0"}, "0"));
  CHECK(!outer.empty());
  for (const auto& t : outer) {
    // order the decoration by slot marks
    std::vector<OpId> dec(t.tree.vertices.size());
    for (size_t v = 0; v < t.tree.vertices.size(); ++v) dec[v] = "p01";
    auto r = compose_along_tree(as, t, dec);
    CHECK(r.signature == sig({"0", "0", "0"}, "0"));
  }
}

TEST_CASE("raw (E,V) ingestion") {
  RawTree raw;
  raw.edges = {"r", "m", "a", "b"};
  raw.vertices = {{"r", "m"}, {"m", "a", "b"}};
  raw.root = "r";
  auto t = tree_from_raw(raw);
  CHECK_FALSE(t.structural_error().has_value());
  CHECK(t.vertices.size() == 2);
  CHECK(t.root == 0);
  // round trip
  auto back = tree_to_raw(t, raw.edges);
  CHECK(back.root == "r");
  CHECK(back.vertices.size() == 2);

  RawTree loop;
  loop.edges = {"r", "m"};
  loop.vertices = {{"r", "m"}, {"m", "r"}};
  loop.root = "r";
  CHECK_THROWS_AS(tree_from_raw(loop), Error);
}
