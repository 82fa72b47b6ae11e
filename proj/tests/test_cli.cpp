#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "operadforge/serialize.hpp"

using namespace operadforge;

#ifndef OPERADFORGE_CLI
#define OPERADFORGE_CLI "operadforge"
#endif
#ifndef OPERADFORGE_DATA_DIR
#define OPERADFORGE_DATA_DIR "data"
#endif

namespace {

std::string data_path(const std::string& f) { return std::string(OPERADFORGE_DATA_DIR) + "/" + f; }

int run(const std::string& args) {
  std::string cmd = std::string(OPERADFORGE_CLI) + " " + args + " >/dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

int run_to(const std::string& args, const std::string& outfile) {
  std::string cmd = std::string(OPERADFORGE_CLI) + " " + args + " --out " + outfile + " 2>/dev/null";
  int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

}  // namespace

TEST_CASE("exit code contract") {
  CHECK(run("check " + data_path("com.json")) == 0);
  CHECK(run("check " + data_path("z2_over_as.json")) == 0);
  CHECK(run("check /nonexistent.json") == 2);
  CHECK(run("bogus-subcommand") == 2);

  // a corrupted operad: unit remapped to a non-identity
  Json j = Json::parse(read_file(data_path("as_sigma.json")));
  j["units"]["0"] = "p10";
  write_file("/tmp/of_bad_operad.json", dump_canonical(j));
  CHECK(run("check /tmp/of_bad_operad.json") == 1);
}

TEST_CASE("classify golden flags") {
  REQUIRE(run_to("classify " + data_path("incl_1_to_interval.json"), "/tmp/of_classify.json") == 0);
  Json r = Json::parse(read_file("/tmp/of_classify.json"));
  CHECK(r["weak_equivalence"] == true);
  CHECK(r["fibration"] == false);
  CHECK(r["trivial_fibration"] == false);
  CHECK(r["dwyer_kan"] == true);

  REQUIRE(run_to("classify " + data_path("collapse_as_to_com.json"), "/tmp/of_classify2.json") == 0);
  Json r2 = Json::parse(read_file("/tmp/of_classify2.json"));
  CHECK(r2["surjective_on_colours"] == true);
  CHECK(r2["weak_equivalence"] == false);  // the collapse is not locally bijective
}

TEST_CASE("lift command") {
  REQUIRE(run_to("lift " + data_path("lift_square.json"), "/tmp/of_lift.json") == 0);
  Json r = Json::parse(read_file("/tmp/of_lift.json"));
  CHECK(r["found"] == true);
}

TEST_CASE("pushout command emits class tables") {
  REQUIRE(run_to("pushout " + data_path("span_as_to_com.json") + " --bound 2 --valence-cap 2",
                 "/tmp/of_push.json") == 0);
  Json r = Json::parse(read_file("/tmp/of_push.json"));
  CHECK(r["exact"] == true);
  CHECK(r["signatures"]["0,0->0"]["classes"] == 1);
}

TEST_CASE("free command matches the Catalan count") {
  REQUIRE(run_to("free " + data_path("free_binary.json"), "/tmp/of_free.json") == 0);
  Json r = Json::parse(read_file("/tmp/of_free.json"));
  CHECK(r["count"] == 5);  // Catalan(3)
  CHECK(r["exact"] == true);
}

TEST_CASE("filtrate command agrees with the pushout") {
  REQUIRE(run_to("filtrate " + data_path("filtration_binary.json"), "/tmp/of_filt.json") == 0);
  Json r = Json::parse(read_file("/tmp/of_filt.json"));
  CHECK(r["agrees"] == true);
  CHECK(r["stages"][0]["new_classes"] == 1);
  CHECK(r["stages"][1]["new_classes"] == 2);
}

TEST_CASE("colimit command computes the chain colimit") {
  REQUIRE(run_to("colimit " + data_path("chain_diagram.json") + " --valence-cap 2",
                 "/tmp/of_colim.json") == 0);
  Json r = Json::parse(read_file("/tmp/of_colim.json"));
  CHECK(r["valid"] == true);
  CHECK(r["operad"]["colours"].size() == 2);
}

TEST_CASE("reports are byte-identical across runs") {
  for (const std::string& args :
       {"campaign " + data_path("campaign_small.json"),
        "pushout " + data_path("span_as_to_com.json") + " --bound 2 --valence-cap 2",
        "classify " + data_path("incl_1_to_interval.json")}) {
    REQUIRE(run_to(args, "/tmp/of_det1.json") == 0);
    REQUIRE(run_to(args, "/tmp/of_det2.json") == 0);
    CHECK(read_file("/tmp/of_det1.json") == read_file("/tmp/of_det2.json"));
  }
}
