#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "whichway/cli.hpp"
#include "whichway/interferometer.hpp"
#include "whichway/report.hpp"

using namespace whichway;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "whichway");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path temp_file(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "whichway-tests";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("round to significant digits") {
  CHECK(round_significant(0.123456789012345, 12) == 0.123456789012);
  CHECK(round_significant(1234567.891234567, 12) == 1234567.89123);
  CHECK(round_significant(0.0, 12) == 0.0);
  CHECK(round_significant(-2.5e-17, 3) == -2.5e-17);
}

TEST_CASE("report rendering") {
  ScenarioReport r;
  r.scenario = "demo";
  r.parameters = {{"n", std::int64_t{3}}};
  r.add("x", 1.0 / 3.0);
  r.add("y", 0.5, Provenance::Sampled);
  r.tables.push_back({"t", {"a", "b"}, {{std::string("p,q"), 0.25}, {std::string("r"), 1.0}}});
  r.notes.push_back("note");

  const auto doc = to_json(r);
  CHECK(doc["scenario"] == "demo");
  CHECK(doc["results"]["x"]["value"].get<double>() == 0.333333333333);
  CHECK(doc["results"]["x"]["provenance"] == "exact");
  CHECK(doc["results"]["y"]["provenance"] == "sampled");
  CHECK(doc["tables"]["t"]["columns"][0] == "a");
  CHECK(doc["notes"][0] == "note");

  const auto csv = lines(to_csv(r));
  REQUIRE(csv.size() == 3);
  CHECK(csv[0] == "a,b");
  CHECK(csv[1] == "\"p,q\",0.25");

  CHECK(to_text(r).find("(sampled)") != std::string::npos);
  CHECK_THROWS_AS(r.scalar("missing"), std::out_of_range);
}

TEST_CASE("every scenario's JSON round-trips byte for byte") {
  const auto net_path = temp_file("fig2.json");
  std::ofstream(net_path) << to_json(fig2_network()).dump(2);
  for (const auto& entry : scenario_catalog()) {
    for (const std::string stats : {"boson", "fermion"}) {
      CAPTURE(entry.name);
      std::vector<std::string> args{"run", entry.name, "--statistics", stats, "--format", "json", "--trials", "2000"};
      if (entry.name == "network") {
        args.push_back("--network");
        args.push_back(net_path.string());
      }
      const auto r = run(args);
      REQUIRE(r.code == 0);
      const auto parsed = nlohmann::ordered_json::parse(r.out);
      CHECK(parsed.dump(2) + "\n" == r.out);
      CHECK(run(args).out == r.out);
    }
  }
}

TEST_CASE("tree report in JSON") {
  const auto r = run({"run", "tree", "--statistics", "fermion", "--depth", "2", "--format", "json"});
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["results"]["entangled_yield"]["value"].get<double>() == 0.75);
}

TEST_CASE("exact-only feedback run") {
  const auto r = run({"run", "feedback", "--depth", "7", "--trials", "0", "--format", "json"});
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["results"]["cumulative_failure"]["value"].get<double>() == 1.0 / 128.0);
  for (const auto& [name, value] : doc["results"].items()) CHECK(value["provenance"] == "exact");
}

TEST_CASE("complementarity CSV") {
  const auto r = run({"run", "complementarity", "--grid", "11", "--statistics", "boson", "--format", "csv"});
  REQUIRE(r.code == 0);
  const auto rows = lines(r.out);
  REQUIRE(rows.size() == 12);
  CHECK(rows[0] == "a_squared,E,D,E_plus_D,E_chsh");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    std::istringstream is(rows[i]);
    std::vector<double> cells;
    for (std::string c; std::getline(is, c, ',');) cells.push_back(std::stod(c));
    REQUIRE(cells.size() == 5);
    CHECK(std::abs(cells[3] - 1.0) < 1e-9);
  }
}

TEST_CASE("list") {
  const auto r = run({"list"});
  REQUIRE(r.code == 0);
  for (const std::string n : {"fig1", "fig2", "tree", "feedback", "statistics-test", "mixed-input", "complementarity",
                              "gaussian", "dual"}) {
    CHECK(r.out.find(n) != std::string::npos);
  }
  CHECK(run({"list"}).out == r.out);
  const auto j = nlohmann::json::parse(run({"list", "--format", "json"}).out);
  for (const auto& e : j) CHECK_FALSE(e["reproduces"].get<std::string>().empty());
}

TEST_CASE("usage errors exit with 2 before any output") {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"run", "no-such-scenario"},
           {},
           {"run"},
           {"run", "fig1", "--bogus"},
           {"run", "fig1", "--statistics", "anyon"},
           {"run", "fig1", "--format", "xml"},
           {"run", "tree", "--depth", "9"},
           {"run", "tree", "--depth", "0"},
           {"run", "feedback", "--depth", "0"},
           {"run", "feedback", "--trials", "-1"},
           {"run", "complementarity", "--grid", "1"},
           {"run", "gaussian", "--sigma", "0"},
           {"run", "dual", "--a2", "1.5"},
           {"run", "network"},
           {"run", "network", "--network", "/nonexistent/net.json"},
           {"network"},
       }) {
    const auto r = run(args);
    CAPTURE(args.size() > 1 ? args[1] : std::string());
    CHECK(r.code == cli::kExitUsage);
    CHECK(r.out.empty());
    CHECK_FALSE(r.err.empty());
  }

  const auto bad_json = temp_file("bad.json");
  std::ofstream(bad_json) << "{ not json";
  CHECK(run({"run", "network", "--network", bad_json.string()}).code == cli::kExitUsage);
  const auto bad_net = temp_file("bad-net.json");
  std::ofstream(bad_net) << R"({"inputs":["A","B"],"splitters":[["A","A","C","D"]],"monitored":["C","D"]})";
  CHECK(run({"run", "network", "--network", bad_net.string()}).code == cli::kExitUsage);
}

TEST_CASE("impossible post-selection is a scenario error") {
  // Only one detector: a two-detector coincidence can never happen.
  const auto p = temp_file("one-detector.json");
  std::ofstream(p) << R"({"inputs":["A","B"],"splitters":[["A","B","D","C"]],"monitored":["C"]})";
  const auto r = run({"run", "network", "--network", p.string()});
  CHECK(r.code == cli::kExitScenario);
  CHECK(r.out.empty());
  CHECK(r.err.find("post-selection") != std::string::npos);
}

TEST_CASE("output file and determinism") {
  const auto a = temp_file("a.json"), b = temp_file("b.json");
  fs::remove(a);
  fs::remove(b);
  REQUIRE(run({"run", "feedback", "--format", "json", "--output", a.string()}).code == 0);
  REQUIRE(run({"run", "feedback", "--format", "json", "-o", b.string()}).code == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK_FALSE(slurp(a).empty());
  const auto other_seed = run({"run", "feedback", "--format", "json", "--seed", "1"});
  CHECK(other_seed.out != slurp(a));
}

TEST_CASE("network command emits a loadable description") {
  const auto r = run({"network", "--depth", "3"});
  REQUIRE(r.code == 0);
  CHECK(network_from_json(nlohmann::json::parse(r.out)) == build_tree(3));
  CHECK(network_from_json(nlohmann::json::parse(run({"network", "--fig", "2"}).out)) == fig2_network());
}

TEST_CASE("help exits cleanly") {
  const auto r = run({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("run") != std::string::npos);
}
