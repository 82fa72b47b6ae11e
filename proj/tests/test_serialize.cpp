#include <catch2/catch_amalgamated.hpp>

#include "operadforge/builtins.hpp"
#include "operadforge/generate.hpp"
#include "operadforge/serialize.hpp"

using namespace operadforge;

#ifndef OPERADFORGE_DATA_DIR
#define OPERADFORGE_DATA_DIR "data"
#endif

namespace {
std::string data_path(const std::string& f) { return std::string(OPERADFORGE_DATA_DIR) + "/" + f; }
}  // namespace

TEST_CASE("operad round trip is exact") {
  for (const auto& o : {com_operad(3), interval_operad(3), as_sigma_operad(3), one_operad(3)}) {
    std::string once = dump_canonical(operad_to_json(o));
    FinOperad back = operad_from_json(Json::parse(once));
    CHECK(back == o);
    CHECK(dump_canonical(operad_to_json(back)) == once);
  }
}

TEST_CASE("shipped corpus round trips byte-for-byte") {
  for (const auto& f :
       {"com.json", "interval.json", "as_sigma.json", "one.json"}) {
    std::string bytes = read_file(data_path(f));
    FinOperad o = operad_from_json(Json::parse(bytes));
    CHECK(dump_canonical(operad_to_json(o)) == bytes);
  }
  std::string m = read_file(data_path("incl_1_to_interval.json"));
  CHECK(dump_canonical(morphism_to_json(morphism_from_json(Json::parse(m)))) == m);
  std::string a = read_file(data_path("z2_over_as.json"));
  CHECK(dump_canonical(algebra_to_json(algebra_from_json(Json::parse(a)))) == a);
  std::string t = read_file(data_path("pushout_tree.json"));
  OMTree tree = tree_from_json(Json::parse(t));
  std::vector<std::string> names;
  for (const auto& e : Json::parse(t).at("edges")) names.push_back(e.get<std::string>());
  CHECK(dump_canonical(tree_to_json(tree, names)) == t);
}

TEST_CASE("schema errors carry locations") {
  Json j = operad_to_json(com_operad(2));
  j.erase("units");
  CHECK_THROWS_WITH(operad_from_json(j), Catch::Matchers::ContainsSubstring("/units"));

  Json j2 = operad_to_json(com_operad(2));
  j2["units"] = Json::object();  // missing unit entry
  CHECK_THROWS_WITH(operad_from_json(j2), Catch::Matchers::ContainsSubstring("/units"));

  // morphism referencing an unknown colour
  Json m = Json::parse(read_file(data_path("incl_1_to_interval.json")));
  m["colour_map"]["0"] = "nope";
  CHECK_THROWS_AS(morphism_from_json(m), Error);
  try {
    morphism_from_json(m);
  } catch (const Error& e) {
    CHECK(e.code == "DanglingReference");
  }
}

TEST_CASE("tree serialization preserves the planar listing") {
  OMTree bot = corolla({Colour{"a"}, Colour{"b"}}, Colour{"d"}, "o");
  Json j = tree_to_json(bot);
  OMTree back = tree_from_json(j);
  CHECK(canonicalize(back).form == canonicalize(bot).form);
  // swapped planar listing parses to the mirror tree
  j["vertices"][0] = Json::array({"e2", "e1", "e0"});
  OMTree mirror = tree_from_json(j);
  CHECK(canonicalize(mirror).form != canonicalize(bot).form);
}

TEST_CASE("span and diagram bundles parse") {
  Span sp = span_from_json(Json::parse(read_file(data_path("span_as_to_com.json"))));
  CHECK(validate_span(sp).pass());
  Diagram d = diagram_from_json(Json::parse(read_file(data_path("chain_diagram.json"))));
  CHECK(validate_diagram(d).pass());
  CHECK(diagram_is_filtered(d));
  LiftSquare sq = lift_from_json(Json::parse(read_file(data_path("lift_square.json"))));
  CHECK(square_commutes(sq));
}

TEST_CASE("generated instances serialize and reparse") {
  Rng rng(7);
  GenCaps caps;
  for (int i = 0; i < 5; ++i) {
    FinOperad p = gen_operad(rng, caps);
    std::string s = dump_canonical(operad_to_json(p));
    CHECK(operad_from_json(Json::parse(s)) == p);
  }
}
