// operadforge: batch front end for the finite-operad toolkit. Commands take
// JSON bundles, write reports in JSON or text, and exit with 0 on success,
// 1 when a property violation was found and 2 on usage or schema errors.

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>

#include "operadforge/campaign.hpp"
#include "operadforge/serialize.hpp"

using namespace operadforge;

namespace {

struct Output {
  std::string format = "json";
  std::string path;

  void emit(const Json& j, const std::string& text) const {
    const std::string body = format == "json" ? dump_canonical(j) : text;
    if (path.empty())
      std::cout << body;
    else
      write_file(path, body);
  }
};

long search_budget() {
  const char* env = std::getenv("OPERADFORGE_BUDGET");
  if (!env) return 2000000;
  return std::atol(env);
}

Json load_bundle(const std::string& path) {
  Json j = Json::parse(read_file(path), nullptr, true, true);
  if (!j.contains("format")) throw Error("SchemaError", "missing /format in " + path);
  return j;
}

int run_check(const std::string& path, const Output& out) {
  Json j = load_bundle(path);
  std::string format = j.at("format").get<std::string>();
  AxiomReport rep;
  Json extra = Json::object();
  if (format == "operadforge/operad") {
    FinOperad o = operad_from_json(j);
    rep = validate_operad(o);
    // byte-exact round trip on canonical files
    extra["round_trip"] = dump_canonical(operad_to_json(o)) == read_file(path);
  } else if (format == "operadforge/morphism") {
    rep = validate_morphism(morphism_from_json(j));
  } else if (format == "operadforge/algebra") {
    rep = validate_algebra(algebra_from_json(j));
  } else if (format == "operadforge/multigraph") {
    multigraph_from_json(j);  // schema check only
  } else if (format == "operadforge/tree") {
    OMTree t = tree_from_json(j);
    extra["rendered"] = render_tree(t);
  } else if (format == "operadforge/span") {
    rep = validate_span(span_from_json(j));
  } else if (format == "operadforge/diagram") {
    rep = validate_diagram(diagram_from_json(j));
  } else {
    throw Error("SchemaError", "unknown format " + format);
  }
  Json r;
  r["command"] = "check";
  r["input"] = format;
  r["pass"] = rep.pass();
  Json v = Json::array();
  for (const auto& x : rep.violations) v.push_back({{"kind", x.kind}, {"detail", x.detail}});
  r["violations"] = v;
  for (const auto& [k, val] : extra.items()) r[k] = val;
  std::ostringstream text;
  text << "check " << format << ": " << rep.summary() << "\n";
  if (extra.contains("rendered")) text << extra["rendered"].get<std::string>();
  out.emit(r, text.str());
  return rep.pass() ? 0 : 1;
}

int run_classify(const std::string& path, const std::string& preset, const Output& out) {
  Json j = load_bundle(path);
  OperadMorphism m = morphism_from_json(j);
  if (preset != "discrete") throw Error("SchemaError", "unknown preset " + preset);
  ModelReport rep = classify(m, discrete_preset());
  bool dk = dwyer_kan_classify(m, discrete_preset());
  Json r = model_report_to_json(rep);
  r["command"] = "classify";
  r["dwyer_kan"] = dk;
  std::ostringstream text;
  auto flag = [&](const char* n, bool b) { text << "  " << n << ": " << (b ? "yes" : "no") << "\n"; };
  text << "classify (" << preset << " preset)\n";
  flag("fully_faithful", rep.fully_faithful);
  flag("local_we", rep.local_we);
  flag("local_fib", rep.local_fib);
  flag("local_trivfib", rep.local_trivfib);
  flag("surjective_on_colours", rep.surjective_on_colours);
  flag("essentially_surjective", rep.essentially_surjective);
  flag("path_lifting", rep.path_lifting);
  flag("fibration", rep.fibration);
  flag("weak_equivalence", rep.weak_equivalence);
  flag("trivial_fibration", rep.trivial_fibration);
  flag("dwyer_kan", dk);
  out.emit(r, text.str());
  return 0;
}

int run_lift(const std::string& path, const Output& out) {
  LiftSquare sq = lift_from_json(load_bundle(path));
  auto res = has_rlp(sq, search_budget());
  Json r;
  r["command"] = "lift";
  r["found"] = res.lift.has_value();
  r["searched"] = res.searched;
  if (res.lift) r["lift"] = morphism_data_to_json(res.lift->colour_map, res.lift->components);
  std::ostringstream text;
  text << "lift: " << (res.lift ? "found" : "absent (search exhausted)") << ", searched "
       << res.searched << " morphisms\n";
  out.emit(r, text.str());
  return 0;
}

int run_pushout(const std::string& path, int bound, int valence_cap, const Output& out) {
  Span sp = span_from_json(load_bundle(path));
  auto cfg = span_config(sp);
  Json r;
  r["command"] = "pushout";
  r["bound"] = bound;
  bool all_exact = true;
  Json sigs = Json::object();
  std::ostringstream text;
  text << "pushout classes at bound " << bound << "\n";
  int cap = valence_cap >= 0
                ? valence_cap
                : std::min(sp.leg_x.target.max_valence, sp.leg_y.target.max_valence);
  for (const auto& s :
       all_signatures(cfg.ambient, cap, sp.apex.variant == Variant::reduced)) {
    auto sat = saturate_with_certificate(cfg, s, bound);
    Json one;
    one["classes"] = sat.n_classes;
    one["exact"] = sat.exact;
    one["states"] = static_cast<long>(sat.states.size());
    Json wit = Json::array();
    for (const auto& w : sat.witnesses)
      wit.push_back({{"from", w.from_state}, {"to", w.to_state}, {"kind", w.kind}, {"detail", w.detail}});
    one["witnesses"] = wit;
    sigs[s.key()] = one;
    all_exact = all_exact && sat.exact;
    text << "  " << s.key() << ": " << sat.n_classes << (sat.exact ? " (exact)" : " (unstabilized)")
         << "\n";
  }
  r["signatures"] = sigs;
  r["exact"] = all_exact;
  out.emit(r, text.str());
  return 0;
}

int run_colimit(const std::string& path, int valence_cap, const Output& out) {
  Diagram d = diagram_from_json(load_bundle(path));
  auto res = filtered_colimit(d, valence_cap >= 0 ? valence_cap : 4);
  Json r;
  r["command"] = "colimit";
  r["operad"] = operad_to_json(res.operad);
  r["valid"] = validate_operad(res.operad).pass();
  std::ostringstream text;
  text << "filtered colimit: " << res.operad.colours.size() << " colours, "
       << res.operad.components.size() << " stored components, "
       << (r["valid"].get<bool>() ? "valid" : "INVALID") << "\n";
  out.emit(r, text.str());
  return r["valid"].get<bool>() ? 0 : 1;
}

int run_free(const std::string& path, int bound, const Output& out) {
  Json j = load_bundle(path);
  MultiGraph k = multigraph_from_json(j.at("multigraph"));
  Variant v = variant_from_name(j.value("variant", "symmetric"));
  Signature s = parse_signature_key(j.at("signature").get<std::string>());
  int b = bound >= 0 ? bound : j.value("vertex_bound", 3);
  SymbolicOperad f(k, v);
  auto comp = f.component(s, b);
  Json r;
  r["command"] = "free";
  r["signature"] = s.key();
  r["vertex_bound"] = b;
  r["count"] = static_cast<long>(comp.elements.size());
  r["exact"] = comp.exact;
  Json elems = Json::array();
  for (const auto& t : comp.elements) {
    Json e = tree_to_json(t.shape);
    e["decoration"] = t.decoration;
    e.erase("format");
    elems.push_back(e);
  }
  r["elements"] = elems;
  std::ostringstream text;
  text << "free operad component " << s.key() << " at vertex bound " << b << ": "
       << comp.elements.size() << " element(s), " << (comp.exact ? "exact" : "truncated") << "\n";
  for (const auto& t : comp.elements) text << render_tree(t.shape);
  out.emit(r, text.str());
  return 0;
}

int run_filtrate(const std::string& path, int bound, const Output& out) {
  Json j = load_bundle(path);
  FinOperad x = operad_from_json(j.at("operad"));
  MultiGraph k0 = multigraph_from_json(j.at("k0"));
  MultiGraph k1 = multigraph_from_json(j.at("k1"));
  MultiGraphMorphism inj;
  inj.source = k0;
  inj.target = k1;
  morphism_data_from_json(j.at("injection"), inj.colour_map, inj.components);
  MultiGraphMorphism alpha;
  alpha.source = k0;
  alpha.target = x.underlying_multigraph();
  morphism_data_from_json(j.at("alpha"), alpha.colour_map, alpha.components);
  Signature s = parse_signature_key(j.at("signature").get<std::string>());
  int n_max = j.value("n_max", 2);
  int b = bound >= 0 ? bound : j.value("bound", 3);
  auto res = free_pushout_filtration(x, inj, alpha, s, n_max, b, j.value("stage_vertex_cap", 4));
  Json r;
  r["command"] = "filtrate";
  r["signature"] = s.key();
  Json stages = Json::array();
  for (const auto& st : res.stages) {
    Json one;
    one["n"] = st.n;
    one["new_classes"] = st.new_classes;
    Json orbs = Json::array();
    for (const auto& orb : st.orbits) {
      Json o;
      o["aut"] = orb.aut_size;
      o["corners"] = orb.corner_sizes;
      o["punctured"] = orb.punctured_size;
      o["new_orbits"] = static_cast<long>(orb.new_reps.size());
      orbs.push_back(o);
    }
    one["orbits"] = orbs;
    stages.push_back(one);
  }
  r["stages"] = stages;
  r["total_classes"] = res.total_classes;
  r["pushout_classes"] = res.pushout_classes;
  r["pushout_exact"] = res.pushout_exact;
  r["agrees"] = res.agrees;
  if (!res.detail.empty()) r["detail"] = res.detail;
  std::ostringstream text;
  text << "filtration of " << s.key() << ": " << res.total_classes << " classes over "
       << res.stages.size() << " stage(s); pushout has " << res.pushout_classes << " ("
       << (res.agrees ? "agree" : "DISAGREE") << ")\n";
  for (const auto& st : res.stages)
    text << "  stage " << st.n << ": " << st.new_classes << " new class(es)\n";
  out.emit(r, text.str());
  return res.agrees ? 0 : 1;
}

int run_campaign(const std::string& path, uint64_t seed, const Output& out) {
  Json cfg = Json::object();
  if (!path.empty()) {
    cfg = load_bundle(path);
    if (cfg.value("format", "") != "operadforge/campaign")
      throw Error("SchemaError", "campaign expects an operadforge/campaign bundle");
    seed = cfg.value("seed", seed);
  }
  GenCaps caps;
  if (cfg.contains("caps")) {
    caps.colours = cfg["caps"].value("colours", caps.colours);
    caps.component = cfg["caps"].value("component", caps.component);
    caps.valence = cfg["caps"].value("valence", caps.valence);
  }
  Json counts = cfg.value("counts", Json::object());
  auto n = [&](const char* name, long dflt) { return counts.value(name, dflt); };

  std::map<std::string, CampaignOutcome> results;
  results["two_out_of_three"] = campaign_two_out_of_three(seed, n("two_out_of_three", 50), caps);
  results["dwyer_kan"] = campaign_dwyer_kan(seed + 1, n("dwyer_kan", 25), caps);
  results["zigzag"] = campaign_zigzag(seed + 2, n("zigzag", 25), caps);
  results["right_proper"] = campaign_right_proper(seed + 3, n("right_proper", 20), caps);
  results["tree_functoriality"] = campaign_tree_functoriality(seed + 4, n("tree_functoriality", 40), caps);
  results["hom_count"] = campaign_hom_count(seed + 5, n("hom_count", 10), caps);
  results["pushout_universal"] =
      campaign_pushout_universal(seed + 6, n("pushout_universal", 5), n("cocones", 5), caps);
  results["ff_pushout"] = campaign_ff_pushout(seed + 7, n("ff_pushout", 10), caps);

  Json r;
  r["command"] = "campaign";
  r["seed"] = seed;
  bool ok = true;
  std::ostringstream text;
  text << "campaign seed " << seed << "\n";
  Json props = Json::object();
  for (const auto& [name, oc] : results) {
    Json one;
    one["checked"] = oc.checked;
    one["violations"] = oc.violations;
    one["notes"] = oc.notes;
    props[name] = one;
    ok = ok && oc.violations == 0;
    text << "  " << name << ": " << oc.checked << " checked, " << oc.violations << " violation(s)\n";
  }
  r["properties"] = props;
  r["pass"] = ok;
  out.emit(r, text.str());
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"operadforge: finite coloured operads, tree colimits and the folk model structure"};
  app.require_subcommand(1);

  Output out;
  int bound = 4;
  int valence_cap = -1;
  uint64_t seed = 42;
  std::string preset = "discrete";
  std::string file;
  app.add_option("--format", out.format, "report format: json|text")->check(CLI::IsMember({"json", "text"}));
  app.add_option("--out", out.path, "write the report to PATH instead of stdout");
  app.add_option("--bound", bound, "vertex bound for saturations");
  app.add_option("--valence-cap", valence_cap, "signature valence cap for component sweeps");
  app.add_option("--seed", seed, "campaign seed");
  app.add_option("--preset", preset, "base model preset");

  auto* check = app.add_subcommand("check", "validate an operad, morphism, algebra, tree or bundle");
  check->fallthrough();
  check->add_option("file", file)->required();
  auto* cls = app.add_subcommand("classify", "folk model structure flags of a morphism");
  cls->fallthrough();
  cls->add_option("file", file)->required();
  auto* lift = app.add_subcommand("lift", "solve a lifting square exhaustively");
  lift->fallthrough();
  lift->add_option("file", file)->required();
  auto* push = app.add_subcommand("pushout", "saturation classes of a one-fiber span");
  push->fallthrough();
  push->add_option("file", file)->required();
  auto* colim = app.add_subcommand("colimit", "filtered colimit of a finite diagram");
  colim->fallthrough();
  colim->add_option("file", file)->required();
  auto* fr = app.add_subcommand("free", "enumerate a free-operad component");
  fr->fallthrough();
  fr->add_option("file", file)->required();
  auto* filt = app.add_subcommand("filtrate", "free-map push-out filtration with comparison");
  filt->fallthrough();
  filt->add_option("file", file)->required();
  auto* camp = app.add_subcommand("campaign", "seeded property campaigns");
  camp->fallthrough();
  camp->add_option("file", file);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (check->parsed()) return run_check(file, out);
    if (cls->parsed()) return run_classify(file, preset, out);
    if (lift->parsed()) return run_lift(file, out);
    if (push->parsed()) return run_pushout(file, bound, valence_cap, out);
    if (colim->parsed()) return run_colimit(file, valence_cap, out);
    if (fr->parsed()) return run_free(file, bound == 4 ? -1 : bound, out);
    if (filt->parsed()) return run_filtrate(file, bound == 4 ? -1 : bound, out);
    if (camp->parsed()) return run_campaign(file, seed, out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Json::exception& e) {
    std::cerr << "error: SchemaError: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
