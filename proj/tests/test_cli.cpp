#include "cli.hpp"

#include "tf/atom.hpp"
#include "tf/error.hpp"
#include "tf/molecular.hpp"

#include <catch_amalgamated.hpp>
#include <json.hpp>

#include <bit>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

using namespace tf;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::initializer_list<std::string> args) {
  std::vector<std::string> storage{"tf"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : storage) argv.push_back(s.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

fs::path scratch_dir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("tf_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

fs::path write_molecule(const std::string& name, const std::string& text) {
  const auto p = scratch_dir() / name;
  std::ofstream(p) << text;
  return p;
}

const std::string kH2 = R"({"nuclei":[{"Z":1,"R":[0,0,0]},{"Z":1,"R":[1,0,0]}]})";

} // namespace

TEST_CASE("atom subcommand writes a result record") {
  const auto path = (scratch_dir() / "res.json").string();
  const auto r = run({"atom", "--Z", "1", "--N", "1", "--out", path});
  REQUIRE(r.code == 0);
  const auto j = json::parse(slurp(path));
  CHECK(j["format_version"] == cli::kFormatVersion);
  CHECK(j["command"] == "atom");
  CHECK(j["energy"]["total"].get<double>() == solve_atom(1.0, 1.0).energy.total);
  CHECK(j["neutral"] == true);
  CHECK(j["solver"]["radial_node_count"] == 4001);

  const auto again = (scratch_dir() / "res2.json").string();
  REQUIRE(run({"atom", "--Z", "1", "--N", "1", "--out", again}).code == 0);
  CHECK(slurp(path) == slurp(again));
}

TEST_CASE("radial profile CSV") {
  const auto path = (scratch_dir() / "profile.csv").string();
  REQUIRE(run({"atom", "--Z", "2", "--N", "1", "--profile", path}).code == 0);
  std::istringstream in(slurp(path));
  std::string line;
  std::getline(in, line);
  CHECK(line == "r,rho,phi");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == solve_atom(2.0, 1.0).radial().density.grid.size());
}

TEST_CASE("universal subcommand prints the initial slope") {
  const auto r = run({"universal", "--q", "0"});
  CHECK(r.code == 0);
  CHECK(r.out == "initial_slope_B 1.588071023\n");
  const auto ion = run({"universal", "--q", "0.5"});
  CHECK(ion.code == 0);
  CHECK(ion.out.find("support_end_x0") != std::string::npos);
}

TEST_CASE("usage errors exit with code 2") {
  auto r = run({"atom", "--Z", "1", "--bogus"});
  CHECK(r.code == 2);
  CHECK_FALSE(r.err.empty());
  CHECK(run({}).code == 2);
  CHECK(run({"atom"}).code == 2);
  CHECK(run({"universal", "--q", "1.5"}).code == 2);
  CHECK(run({"mu-curve", "--Z", "1", "--samples", "0.5,0.25"}).code == 2);
  CHECK(run({"teller", "--config", (scratch_dir() / "missing.json").string()}).code == 2);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("solver failures exit with code 1") {
  const auto r = run({"atom", "--Z", "10", "--cW", "0.1", "--max-iterations", "1"});
  CHECK(r.code == 1);
  CHECK(r.err.find("solver failure") != std::string::npos);
}

TEST_CASE("molecule files") {
  const auto one = cli::parse_molecule(R"({"nuclei":[{"Z":3,"R":[0.5,0,-1]}]})");
  CHECK(one.nuclei.size() == 1);
  CHECK(one.nuclei[0].charge == 3.0);
  CHECK_FALSE(one.electrons.has_value());
  CHECK(cli::parse_molecule(R"({"nuclei":[{"Z":3,"R":[0,0,0]}],"N":2})").electrons == 2.0);

  CHECK_THROWS_AS(cli::parse_molecule(R"({"nuclei":[{"Z":1,"R":[0,0,0]},{"Z":1,"R":[0,0,0]}]})"), DomainError);
  CHECK_THROWS_AS(cli::parse_molecule(R"({"nuclei":[{"Z":-1,"R":[0,0,0]}]})"), DomainError);
  CHECK_THROWS_WITH(cli::parse_molecule(R"({"nuclei":[{"R":[0,0,0]}]})"), Catch::Matchers::ContainsSubstring("'Z'"));
  CHECK_THROWS_WITH(cli::parse_molecule(R"({"nuclei":[{"Z":1,"R":[0,0]}]})"), Catch::Matchers::ContainsSubstring("nuclei[0].R"));
  CHECK_THROWS_WITH(cli::parse_molecule(R"({"atoms":[]})"), Catch::Matchers::ContainsSubstring("'nuclei'"));
  CHECK_THROWS_WITH(cli::parse_molecule("{\"nuclei\":[\n{\"Z\":1,\n\"R\":[0,0,0]},,]}"),
                    Catch::Matchers::ContainsSubstring("line 3"));

  const NuclearConfiguration mol({{1.0, {0.1, -0.2, 0.3}}, {7.0, {1.0 / 3.0, 2e-5, 1e3}}});
  const auto text = cli::molecule_to_json(mol);
  CHECK(cli::parse_molecule(text).nuclei == mol);
  CHECK(cli::molecule_to_json(cli::parse_molecule(text).nuclei) == text);
}

TEST_CASE("molecule subcommand writes deterministic grid fields") {
  const auto mol = write_molecule("h2.json", kH2).string();
  const auto a = (scratch_dir() / "a").string(), b = (scratch_dir() / "b").string();
  REQUIRE(run({"molecule", "--config", mol, "--grid", "32", "--fields", a, "--out", a + "_result.json"}).code == 0);
  REQUIRE(run({"molecule", "--config", mol, "--grid", "32", "--fields", b, "--out", b + "_result.json"}).code == 0);
  for (const char* suffix : {"_density.bin", "_potential.bin", "_result.json"})
    CHECK(slurp(a + suffix) == slurp(b + suffix));

  const auto sidecar = json::parse(slurp(a + ".json"));
  CHECK(sidecar["format_version"] == cli::kFormatVersion);
  CHECK(sidecar["shape"] == json::array({32, 32, 32}));
  CHECK(sidecar["dtype"] == "float64");
  CHECK(sidecar["byte_order"] == "little");
  CHECK(sidecar["fields"]["density"] == "a_density.bin");

  SolverConfig sc;
  sc.grid3d_extent = 32;
  const auto sol = scf_solve(cli::parse_molecule(kH2).nuclei, 2.0, sc);
  const auto bytes = slurp(a + "_density.bin");
  REQUIRE(bytes.size() == 8 * sol.grid().density.values.size());
  bool same = true;
  for (std::size_t i = 0; i < sol.grid().density.values.size(); ++i) {
    std::uint64_t bits = 0;
    for (int k = 0; k < 8; ++k) bits |= std::uint64_t(static_cast<unsigned char>(bytes[8 * i + k])) << (8 * k);
    same = same && std::bit_cast<double>(bits) == sol.grid().density.values[i];
  }
  CHECK(same);
  const auto grid = sol.grid().density.grid;
  CHECK(sidecar["origin"][0].get<double>() == grid.origin[0]);
  CHECK(sidecar["spacing"][2].get<double>() == grid.spacing[2]);
}

TEST_CASE("teller, pressure, mu-curve, tail and check subcommands") {
  const auto mol = write_molecule("h2.json", kH2).string();
  const auto t = run({"teller", "--config", mol, "--grid", "32"});
  REQUIRE(t.code == 0);
  REQUIRE(t.out.rfind("teller_gap ", 0) == 0);
  CHECK(std::stod(t.out.substr(11)) > 0.0);

  const auto p = run({"pressure", "--config", mol, "--grid", "32", "--scales", "1,1.5"});
  REQUIRE(p.code == 0);
  CHECK(p.out.rfind("scale,energy\n1,", 0) == 0);

  const auto m = run({"mu-curve", "--Z", "1", "--samples", "0.5,1"});
  REQUIRE(m.code == 0);
  CHECK(m.out.rfind("N,mu\n0.5,", 0) == 0);
  CHECK(m.out.find("\n1,0\n") != std::string::npos);

  const auto tl = run({"tail", "--Z", "10"});
  CHECK(tl.code == 0);
  CHECK(tl.out.find("reference_243pi 763.4070148") != std::string::npos);

  const auto path = (scratch_dir() / "check.json").string();
  REQUIRE(run({"check", "--out", path}).code == 0);
  const auto report = json::parse(slurp(path));
  CHECK(report["all_passed"] == true);
  CHECK(report["checks"].size() >= 6);
}
