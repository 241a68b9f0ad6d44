#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"

using nlohmann::json;
using wigner1d::cli::run_cli;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run call(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "wigner1d-cli-tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::string strip_meta(const std::string& csv) { return csv.substr(csv.find('\n') + 1); }

}  // namespace

TEST_CASE("constants emits the closed forms with metadata") {
  const auto r = call({"constants", "--beta", "1", "--rho", "2"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["data"]["c"].get<double>() == doctest::Approx(0.4254590641196608).epsilon(1e-14));
  CHECK(j["data"]["sigma2"].get<double>() == doctest::Approx(0.3282588213748328).epsilon(1e-14));
  for (const char* key : {"git_describe", "seed", "params", "timestamp"}) CHECK(j["meta"].contains(key));
  CHECK(j["meta"]["params"]["rho"] == 2.0);
}

TEST_CASE("usage errors exit with 2 and a JSON diagnostic") {
  const auto missing = call({"constants", "--beta", "1"});
  CHECK(missing.code == 2);
  CHECK(json::parse(missing.err)["error"] == "usage");
  CHECK(call({}).code == 2);
  CHECK(call({"nonsense"}).code == 2);
  CHECK(call({"oracle", "--beta", "1", "--rho", "1", "--n", "3"}).code == 2);
  CHECK(call({"spectrum", "--beta", "1", "--rho", "1", "--proposal", "stiff"}).code == 2);
  CHECK(call({"constants", "--help"}).code == 0);
}

TEST_CASE("config files: unknown keys fail, flags override") {
  const auto bad = scratch("bad.json");
  std::ofstream(bad) << R"({"beta": 1, "rho": 2, "temperature": 3})";
  const auto r = call({"constants", "--config", bad.string()});
  CHECK(r.code == 2);
  CHECK(json::parse(r.err)["error"] == "config");

  const auto good = scratch("good.json");
  std::ofstream(good) << R"({"beta": 1, "rho": 2})";
  const auto a = call({"constants", "--config", good.string()});
  REQUIRE(a.code == 0);
  CHECK(json::parse(a.out)["data"]["rho"] == 2.0);
  const auto b = call({"constants", "--config", good.string(), "--rho", "1"});
  REQUIRE(b.code == 0);
  CHECK(json::parse(b.out)["data"]["rho"] == 1.0);

  const auto flag = scratch("flag.json");
  std::ofstream(flag) << R"({"quick": "yes"})";
  CHECK(call({"validate", "--config", flag.string()}).code == 2);
  CHECK(call({"constants", "--config", scratch("missing.json").string()}).code == 2);
}

TEST_CASE("numerical failures exit with 3") {
  // far too few nodes for a usable density estimate
  const auto r = call({"density", "--beta", "1", "--rho", "1", "--ensemble", "60"});
  CHECK(r.code == 3);
  CHECK(json::parse(r.err)["error"] == "numerical");
}

TEST_CASE("CSV artifacts carry a single metadata line") {
  const auto r = call({"surface", "--beta", "1", "--rho", "1", "--ensemble", "400", "--n-max", "6"});
  REQUIRE(r.code == 0);
  REQUIRE(r.out.rfind("# ", 0) == 0);
  const auto meta = json::parse(r.out.substr(2, r.out.find('\n') - 2));
  CHECK(meta["command"] == "surface");
  CHECK(meta["results"].contains("s"));
  std::istringstream body(strip_meta(r.out));
  std::string line;
  std::getline(body, line);
  CHECK(line == "N,log_z,correction,correction_error");
  int rows = 0;
  while (std::getline(body, line)) ++rows;
  CHECK(rows == 5);
}

TEST_CASE("sample writes configurations and a sidecar") {
  const auto path = scratch("chain.csv");
  const std::vector<std::string> args{"sample", "--beta", "1", "--rho", "1", "--n", "3",
                                      "--sweeps", "40", "--thin", "4", "--seed", "9",
                                      "--out", path.string()};
  REQUIRE(call(args).code == 0);
  std::ifstream csv(path);
  std::stringstream text;
  text << csv.rdbuf();
  const std::string first = strip_meta(text.str());
  CHECK(first.rfind("x1,x2,x3\n", 0) == 0);
  std::ifstream side(std::filesystem::path(path).replace_extension(".json"));
  const auto j = json::parse(side);
  CHECK(j["data"]["configurations"] == 10);
  CHECK(j["data"]["chains"][0].contains("diagnostics"));

  REQUIRE(call(args).code == 0);
  std::ifstream again(path);
  std::stringstream text2;
  text2 << again.rdbuf();
  CHECK(strip_meta(text2.str()) == first);
  CHECK(call({"sample", "--beta", "1", "--rho", "1", "--n", "3", "--sweeps", "10"}).code == 2);
}

TEST_CASE("same seed, same data; different seed, different data") {
  const std::vector<std::string> base{"spectrum", "--beta", "1", "--rho", "1", "--ensemble", "300"};
  auto with_seed = [&](const char* seed) {
    auto args = base;
    args.insert(args.end(), {"--seed", seed});
    const auto r = call(args);
    REQUIRE(r.code == 0);
    return json::parse(r.out)["data"].dump();
  };
  CHECK(with_seed("4") == with_seed("4"));
  CHECK(with_seed("4") != with_seed("5"));
}

TEST_CASE("generated reference lists every subcommand") {
  const auto text = wigner1d::cli::reference_markdown();
  for (const char* name : {"constants", "free-energy", "surface", "density", "rdm", "correlations",
                           "symmetry-test", "sample", "spectrum", "oracle", "validate"})
    CHECK(text.find(std::string("## ") + name) != std::string::npos);
  CHECK(text.find("`--beta` | `required`") != std::string::npos);
  CHECK(call({"reference"}).out == text);
}
