#pragma once

// JSON (de)serialization for every exchanged object. The writer always
// emits the canonical presentation (sorted keys, two-space indent, trailing
// newline); parse o serialize is the identity byte-for-byte on files the
// writer produced.

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "operadforge/colimits.hpp"
#include "operadforge/freeops.hpp"
#include "operadforge/model.hpp"
#include "operadforge/trees.hpp"

namespace operadforge {

using Json = nlohmann::json;

inline std::string dump_canonical(const Json& j) { return j.dump(2) + "\n"; }

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("IoError", "cannot write " + path);
  out << text;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("IoError", "cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

namespace detail {

inline const Json& need(const Json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw Error("SchemaError", "missing /" + std::string(key) + " in " + where);
  return j.at(key);
}

inline Colour colour_checked(const std::string& id, const std::string& where) {
  if (!colour_id_ok(id)) throw Error("SchemaError", "bad colour id '" + id + "' in " + where);
  return Colour{id};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Operads and multi-graphs

inline Json operad_to_json(const FinOperad& o) {
  Json j;
  j["format"] = "operadforge/operad";
  j["variant"] = variant_name(o.variant);
  j["max_valence"] = o.max_valence;
  Json cols = Json::array();
  for (const auto& c : o.colours) cols.push_back(c.id);
  j["colours"] = cols;
  Json comps = Json::object();
  for (const auto& [s, ops] : o.components) comps[s.key()] = ops;
  j["components"] = comps;
  Json units = Json::object();
  for (const auto& [c, u] : o.units) units[c.id] = u;
  j["units"] = units;
  if (o.variant != Variant::nonsymmetric) {
    Json sym = Json::object();
    for (const auto& [k, v] : o.symmetry_table) sym[k.sig.key()][k.op][perm_to_string(k.sigma)] = v;
    j["symmetry"] = sym;
  }
  Json comp = Json::array();
  for (const auto& [k, v] : o.compose_table) {
    Json e;
    e["outer"] = k.outer.key();
    e["op"] = k.outer_op;
    Json inner = Json::array();
    for (const auto& t : k.inner) inner.push_back(t.key());
    e["inner"] = inner;
    e["args"] = k.inner_ops;
    e["result"] = v;
    comp.push_back(e);
  }
  j["compose"] = comp;
  return j;
}

inline FinOperad operad_from_json(const Json& j) {
  FinOperad o;
  o.variant = variant_from_name(detail::need(j, "variant", "operad").get<std::string>());
  o.max_valence = detail::need(j, "max_valence", "operad").get<int>();
  for (const auto& c : detail::need(j, "colours", "operad"))
    o.colours.push_back(detail::colour_checked(c.get<std::string>(), "/colours"));
  std::sort(o.colours.begin(), o.colours.end());
  for (const auto& [key, ops] : detail::need(j, "components", "operad").items()) {
    Signature s = parse_signature_key(key);
    for (const auto& c : s.inputs)
      if (!o.has_colour(c)) throw Error("DanglingReference", "unknown colour in /components/" + key);
    if (!o.has_colour(s.output)) throw Error("DanglingReference", "unknown colour in /components/" + key);
    o.components[s] = ops.get<std::vector<OpId>>();
  }
  for (const auto& [cid, u] : detail::need(j, "units", "operad").items()) {
    Colour c = detail::colour_checked(cid, "/units");
    if (!o.has_colour(c)) throw Error("DanglingReference", "unknown colour in /units");
    o.units[c] = u.get<OpId>();
    if (!o.has_op(Signature{{c}, c}, o.units[c]))
      throw Error("SchemaError", "unit of " + cid + " is not an operation at /units");
  }
  for (const auto& c : o.colours)
    if (!o.units.count(c)) throw Error("SchemaError", "missing unit entry at /units/" + c.id);
  if (j.contains("symmetry")) {
    for (const auto& [key, per_op] : j.at("symmetry").items()) {
      Signature s = parse_signature_key(key);
      for (const auto& [op, per_perm] : per_op.items())
        for (const auto& [pstr, im] : per_perm.items()) {
          bool ok = true;
          Perm sigma = perm_from_string(pstr, &ok);
          if (!ok || static_cast<int>(sigma.size()) != s.valence())
            throw Error("SchemaError", "bad permutation '" + pstr + "' at /symmetry/" + key);
          o.symmetry_table[SymKey{s, sigma, op}] = im.get<OpId>();
        }
    }
  }
  for (const auto& e : detail::need(j, "compose", "operad")) {
    ComposeKey k;
    k.outer = parse_signature_key(detail::need(e, "outer", "/compose").get<std::string>());
    k.outer_op = detail::need(e, "op", "/compose").get<OpId>();
    for (const auto& t : detail::need(e, "inner", "/compose"))
      k.inner.push_back(parse_signature_key(t.get<std::string>()));
    k.inner_ops = detail::need(e, "args", "/compose").get<std::vector<OpId>>();
    if (k.inner_ops.size() != k.inner.size())
      throw Error("SchemaError", "args/inner length mismatch at /compose");
    o.compose_table[k] = detail::need(e, "result", "/compose").get<OpId>();
  }
  return o;
}

inline Json multigraph_to_json(const MultiGraph& m) {
  Json j;
  j["format"] = "operadforge/multigraph";
  j["variant"] = variant_name(m.variant);
  j["max_valence"] = m.max_valence;
  Json cols = Json::array();
  for (const auto& c : m.colours) cols.push_back(c.id);
  j["colours"] = cols;
  Json comps = Json::object();
  for (const auto& [s, ops] : m.components) comps[s.key()] = ops;
  j["components"] = comps;
  return j;
}

inline MultiGraph multigraph_from_json(const Json& j) {
  MultiGraph m;
  m.variant = variant_from_name(detail::need(j, "variant", "multigraph").get<std::string>());
  m.max_valence = detail::need(j, "max_valence", "multigraph").get<int>();
  for (const auto& c : detail::need(j, "colours", "multigraph"))
    m.colours.push_back(detail::colour_checked(c.get<std::string>(), "/colours"));
  std::sort(m.colours.begin(), m.colours.end());
  for (const auto& [key, ops] : detail::need(j, "components", "multigraph").items())
    m.components[parse_signature_key(key)] = ops.get<std::vector<OpId>>();
  return m;
}

// ---------------------------------------------------------------------------
// Morphism data (colour map + components), used inside several bundles

inline Json morphism_data_to_json(const std::map<Colour, Colour>& cmap,
                                  const std::map<Signature, std::map<OpId, OpId>>& comps) {
  Json j;
  Json cm = Json::object();
  for (const auto& [a, b] : cmap) cm[a.id] = b.id;
  j["colour_map"] = cm;
  Json co = Json::object();
  for (const auto& [s, m] : comps) {
    Json inner = Json::object();
    for (const auto& [op, im] : m) inner[op] = im;
    co[s.key()] = inner;
  }
  j["components"] = co;
  return j;
}

inline void morphism_data_from_json(const Json& j, std::map<Colour, Colour>& cmap,
                                    std::map<Signature, std::map<OpId, OpId>>& comps) {
  for (const auto& [a, b] : detail::need(j, "colour_map", "morphism").items())
    cmap[detail::colour_checked(a, "/colour_map")] =
        detail::colour_checked(b.get<std::string>(), "/colour_map");
  for (const auto& [key, m] : detail::need(j, "components", "morphism").items()) {
    Signature s = parse_signature_key(key);
    for (const auto& [op, im] : m.items()) comps[s][op] = im.get<OpId>();
  }
}

inline Json morphism_to_json(const OperadMorphism& m) {
  Json j = morphism_data_to_json(m.colour_map, m.components);
  j["format"] = "operadforge/morphism";
  j["source"] = operad_to_json(m.source);
  j["target"] = operad_to_json(m.target);
  return j;
}

inline OperadMorphism morphism_from_json(const Json& j) {
  OperadMorphism m;
  m.source = operad_from_json(detail::need(j, "source", "morphism"));
  m.target = operad_from_json(detail::need(j, "target", "morphism"));
  morphism_data_from_json(j, m.colour_map, m.components);
  for (const auto& [c, d] : m.colour_map) {
    if (!m.source.has_colour(c)) throw Error("DanglingReference", "unknown source colour " + c.id);
    if (!m.target.has_colour(d)) throw Error("DanglingReference", "unknown target colour " + d.id);
  }
  return m;
}

// ---------------------------------------------------------------------------
// Algebras

inline Json algebra_to_json(const FinAlgebra& a) {
  Json j;
  j["format"] = "operadforge/algebra";
  j["operad"] = operad_to_json(a.operad);
  Json carrier = Json::object();
  for (const auto& [c, xs] : a.carrier) carrier[c.id] = xs;
  j["carrier"] = carrier;
  Json acts = Json::array();
  for (const auto& [k, v] : a.actions) {
    Json e;
    e["sig"] = std::get<0>(k).key();
    e["op"] = std::get<1>(k);
    e["args"] = std::get<2>(k);
    e["result"] = v;
    acts.push_back(e);
  }
  j["actions"] = acts;
  return j;
}

inline FinAlgebra algebra_from_json(const Json& j) {
  FinAlgebra a;
  a.operad = operad_from_json(detail::need(j, "operad", "algebra"));
  for (const auto& [cid, xs] : detail::need(j, "carrier", "algebra").items()) {
    Colour c = detail::colour_checked(cid, "/carrier");
    if (!a.operad.has_colour(c)) throw Error("DanglingReference", "unknown colour in /carrier");
    a.carrier[c] = xs.get<std::vector<std::string>>();
  }
  for (const auto& e : detail::need(j, "actions", "algebra")) {
    a.actions[std::make_tuple(parse_signature_key(detail::need(e, "sig", "/actions").get<std::string>()),
                              detail::need(e, "op", "/actions").get<OpId>(),
                              detail::need(e, "args", "/actions").get<std::vector<std::string>>())] =
        detail::need(e, "result", "/actions").get<std::string>();
  }
  return a;
}

// ---------------------------------------------------------------------------
// Trees

inline Json tree_to_json(const OMTree& t, const std::vector<std::string>& names = {}) {
  auto name = [&](int e) { return names.empty() ? "e" + std::to_string(e) : names[e]; };
  Json j;
  j["format"] = "operadforge/tree";
  Json edges = Json::array();
  for (int e = 0; e < t.tree.n_edges; ++e) edges.push_back(name(e));
  j["edges"] = edges;
  Json verts = Json::array();
  for (const auto& v : t.tree.vertices) {
    Json one = Json::array();
    one.push_back(name(v.out_edge));
    for (int e : v.in_edges) one.push_back(name(e));
    verts.push_back(one);
  }
  j["vertices"] = verts;  // listing order: output edge first, inputs in planar order
  j["root"] = name(t.tree.root);
  Json labels = Json::object();
  for (int e = 0; e < t.tree.n_edges; ++e) labels[name(e)] = t.labels[e].id;
  j["labels"] = labels;
  j["marks"] = t.marks;
  Json lo = Json::array();
  for (int e : t.leaf_order) lo.push_back(name(e));
  j["leaf_order"] = lo;
  return j;
}

inline OMTree tree_from_json(const Json& j) {
  RawTree raw;
  for (const auto& e : detail::need(j, "edges", "tree")) raw.edges.push_back(e.get<std::string>());
  for (const auto& v : detail::need(j, "vertices", "tree"))
    raw.vertices.push_back(v.get<std::vector<std::string>>());
  raw.root = detail::need(j, "root", "tree").get<std::string>();
  OMTree t;
  t.tree = tree_from_raw(raw);
  std::map<std::string, int> idx;
  for (size_t i = 0; i < raw.edges.size(); ++i) idx[raw.edges[i]] = static_cast<int>(i);
  // rebuild the stored planar orders from the listing order of each vertex
  for (const auto& v : raw.vertices) {
    int out = idx.at(v.front());
    int vi = t.tree.vertex_above(out);
    if (vi < 0) throw Error("SchemaError", "vertex listing does not start with its output edge");
    std::vector<int> ins;
    for (size_t i = 1; i < v.size(); ++i) ins.push_back(idx.at(v[i]));
    std::vector<int> sorted_have = t.tree.vertices[vi].in_edges;
    std::vector<int> sorted_want = ins;
    std::sort(sorted_have.begin(), sorted_have.end());
    std::sort(sorted_want.begin(), sorted_want.end());
    if (sorted_have != sorted_want) throw Error("SchemaError", "vertex inputs disagree with orientation");
    t.tree.vertices[vi].in_edges = ins;
  }
  t.labels.resize(t.tree.n_edges);
  for (const auto& [ename, lab] : detail::need(j, "labels", "tree").items()) {
    if (!idx.count(ename)) throw Error("DanglingReference", "label for unknown edge " + ename);
    t.labels[idx.at(ename)] = detail::colour_checked(lab.get<std::string>(), "/labels");
  }
  t.marks = detail::need(j, "marks", "tree").get<std::vector<std::string>>();
  if (t.marks.size() != t.tree.vertices.size()) throw Error("SchemaError", "marks size at /marks");
  for (const auto& e : detail::need(j, "leaf_order", "tree")) {
    std::string ename = e.get<std::string>();
    if (!idx.count(ename)) throw Error("DanglingReference", "leaf order names unknown edge " + ename);
    t.leaf_order.push_back(idx.at(ename));
  }
  if (auto err = t.validate()) throw Error("SchemaError", *err);
  return t;
}

// ---------------------------------------------------------------------------
// Bundles

inline Json span_to_json(const Span& sp) {
  Json j;
  j["format"] = "operadforge/span";
  j["apex"] = operad_to_json(sp.apex);
  j["x"] = operad_to_json(sp.leg_x.target);
  j["y"] = operad_to_json(sp.leg_y.target);
  j["leg_x"] = morphism_data_to_json(sp.leg_x.colour_map, sp.leg_x.components);
  j["leg_y"] = morphism_data_to_json(sp.leg_y.colour_map, sp.leg_y.components);
  return j;
}

inline Span span_from_json(const Json& j) {
  Span sp;
  sp.apex = operad_from_json(detail::need(j, "apex", "span"));
  sp.leg_x.source = sp.apex;
  sp.leg_x.target = operad_from_json(detail::need(j, "x", "span"));
  morphism_data_from_json(detail::need(j, "leg_x", "span"), sp.leg_x.colour_map, sp.leg_x.components);
  sp.leg_y.source = sp.apex;
  sp.leg_y.target = operad_from_json(detail::need(j, "y", "span"));
  morphism_data_from_json(detail::need(j, "leg_y", "span"), sp.leg_y.colour_map, sp.leg_y.components);
  return sp;
}

inline Json diagram_to_json(const Diagram& d) {
  Json j;
  j["format"] = "operadforge/diagram";
  Json objs = Json::object();
  for (const auto& [n, o] : d.objects) objs[n] = operad_to_json(o);
  j["objects"] = objs;
  Json arrows = Json::array();
  for (const auto& a : d.arrows) {
    Json e = morphism_data_to_json(a.mor.colour_map, a.mor.components);
    e["name"] = a.name;
    e["src"] = a.src;
    e["dst"] = a.dst;
    arrows.push_back(e);
  }
  j["arrows"] = arrows;
  Json comp = Json::object();
  for (const auto& [k, v] : d.composition) comp[k] = v;
  j["composition"] = comp;
  return j;
}

inline Diagram diagram_from_json(const Json& j) {
  Diagram d;
  for (const auto& [n, o] : detail::need(j, "objects", "diagram").items())
    d.objects[n] = operad_from_json(o);
  for (const auto& e : detail::need(j, "arrows", "diagram")) {
    DiagramArrow a;
    a.name = detail::need(e, "name", "/arrows").get<std::string>();
    a.src = detail::need(e, "src", "/arrows").get<std::string>();
    a.dst = detail::need(e, "dst", "/arrows").get<std::string>();
    if (!d.objects.count(a.src) || !d.objects.count(a.dst))
      throw Error("DanglingReference", "arrow " + a.name + " references unknown objects");
    a.mor.source = d.objects.at(a.src);
    a.mor.target = d.objects.at(a.dst);
    morphism_data_from_json(e, a.mor.colour_map, a.mor.components);
    d.arrows.push_back(std::move(a));
  }
  if (j.contains("composition"))
    for (const auto& [k, v] : j.at("composition").items()) d.composition[k] = v.get<std::string>();
  return d;
}

inline Json lift_to_json(const LiftSquare& sq) {
  Json j;
  j["format"] = "operadforge/lift";
  j["a"] = operad_to_json(sq.i.source);
  j["b"] = operad_to_json(sq.i.target);
  j["x"] = operad_to_json(sq.p.source);
  j["y"] = operad_to_json(sq.p.target);
  j["i"] = morphism_data_to_json(sq.i.colour_map, sq.i.components);
  j["p"] = morphism_data_to_json(sq.p.colour_map, sq.p.components);
  j["top"] = morphism_data_to_json(sq.top.colour_map, sq.top.components);
  j["bot"] = morphism_data_to_json(sq.bot.colour_map, sq.bot.components);
  return j;
}

inline LiftSquare lift_from_json(const Json& j) {
  LiftSquare sq;
  FinOperad a = operad_from_json(detail::need(j, "a", "lift"));
  FinOperad b = operad_from_json(detail::need(j, "b", "lift"));
  FinOperad x = operad_from_json(detail::need(j, "x", "lift"));
  FinOperad y = operad_from_json(detail::need(j, "y", "lift"));
  sq.i.source = a;
  sq.i.target = b;
  morphism_data_from_json(detail::need(j, "i", "lift"), sq.i.colour_map, sq.i.components);
  sq.p.source = x;
  sq.p.target = y;
  morphism_data_from_json(detail::need(j, "p", "lift"), sq.p.colour_map, sq.p.components);
  sq.top.source = a;
  sq.top.target = x;
  morphism_data_from_json(detail::need(j, "top", "lift"), sq.top.colour_map, sq.top.components);
  sq.bot.source = b;
  sq.bot.target = y;
  morphism_data_from_json(detail::need(j, "bot", "lift"), sq.bot.colour_map, sq.bot.components);
  return sq;
}

// model report rendering
inline Json model_report_to_json(const ModelReport& r) {
  Json j;
  j["fully_faithful"] = r.fully_faithful;
  j["local_we"] = r.local_we;
  j["local_fib"] = r.local_fib;
  j["local_trivfib"] = r.local_trivfib;
  j["surjective_on_colours"] = r.surjective_on_colours;
  j["essentially_surjective"] = r.essentially_surjective;
  j["path_lifting"] = r.path_lifting;
  j["fibration"] = r.fibration;
  j["weak_equivalence"] = r.weak_equivalence;
  j["trivial_fibration"] = r.trivial_fibration;
  Json w = Json::object();
  for (const auto& [k, v] : r.witnesses) w[k] = v;
  j["witnesses"] = w;
  return j;
}

}  // namespace operadforge
