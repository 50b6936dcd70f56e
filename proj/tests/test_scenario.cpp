#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "grassrelay/scenario.hpp"
#include "json.hpp"

using namespace grassrelay;
namespace fs = std::filesystem;

namespace {

const char* kSmall = R"(# small two-hop scenario
[scenario]
name = small
seed = 3
output = out/small

[system]
m = 2
n = 2
l = 2
direct_link = false

[links]
p2_db = 8
sweep = P1
grid_db = 0, 6

[schedule]
intervals = 40
symbols = 20

[schemes]
list = optimal_no_dl, quantized_no_dl[N=4], random_codebook_baseline[N=4]

[codebooks]
seed = 5
restarts = 2
iterations = 100
random_books = 3

[bounds]
samples = 200
)";

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("grassrelay_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string replace(std::string text, const std::string& from, const std::string& to) {
  const auto at = text.find(from);
  REQUIRE(at != std::string::npos);
  return text.replace(at, from.size(), to);
}

}  // namespace

TEST_CASE("scenario parsing") {
  const ScenarioConfig c = parse_scenario(kSmall, "/base");
  CHECK(c.name == "small");
  CHECK(c.sim.seed == 3);
  CHECK(c.sim.dims == SystemDims{2, 2, 2});
  CHECK_FALSE(c.sim.direct_link);
  CHECK(c.sim.sweep == SweepLink::p1);
  CHECK(c.sim.grid_db == std::vector<double>{0, 6});
  CHECK(c.sim.intervals == 40);
  CHECK(c.sim.schemes.size() == 3);
  CHECK(c.sim.schemes[1].label() == "quantized_no_dl[N=4]");
  CHECK(c.codebook_seed == 5);
  CHECK(c.random_books == 3);
  CHECK(c.bound_samples == 200);
  CHECK(c.output_dir == fs::path("out/small"));
}

TEST_CASE("scenario errors") {
  CHECK_THROWS_WITH(parse_scenario(replace(kSmall, "list = optimal_no_dl, quantized_no_dl[N=4], random_codebook_baseline[N=4]", "list ="), "/"),
                    doctest::Contains("list"));
  CHECK_THROWS_WITH(parse_scenario(replace(kSmall, "m = 2", "m = 2\nmm = 3"), "/"),
                    doctest::Contains("mm is not a recognized key"));
  CHECK_THROWS_WITH(parse_scenario(replace(kSmall, "grid_db = 0, 6", "grid_db = 6, 0"), "/"),
                    doctest::Contains("strictly increasing"));
  CHECK_THROWS_WITH(parse_scenario(replace(kSmall, "sweep = P1", "sweep = P7"), "/"),
                    doctest::Contains("must be P0, P1 or P2"));
  CHECK_THROWS_WITH(parse_scenario(replace(kSmall, "[bounds]", "[extras]"), "/"),
                    doctest::Contains("unknown section [extras]"));
  CHECK_THROWS_WITH(parse_scenario(replace(kSmall, "intervals = 40", "intervals = forty"), "/"),
                    doctest::Contains("nonnegative integer"));
  CHECK_THROWS_WITH(parse_scenario(replace(kSmall, "direct_link = false", "direct_link = maybe"), "/"),
                    doctest::Contains("true or false"));
  CHECK_THROWS_WITH(parse_scenario(replace(kSmall, "m = 2", "m = 2\nm = 3"), "/", "dup.ini"),
                    doctest::Contains("dup.ini:"));
  CHECK_THROWS_WITH(parse_scenario(replace(kSmall, "random_books = 3", "random_books = 3\nfile_2x4 = missing.txt"), "/"),
                    doctest::Contains("does not exist"));
  CHECK_THROWS_AS(parse_scenario(replace(kSmall, "quantized_no_dl[N=4]", "quantized_no_dl[N=5]"), "/"),
                  ConfigError);
  CHECK_THROWS_AS(load_scenario("/nonexistent/config.ini"), ConfigError);
}

TEST_CASE("normalized config round-trips") {
  const ScenarioConfig c = parse_scenario(kSmall, "/base");
  const std::string ini = to_ini(c);
  const ScenarioConfig back = parse_scenario(ini, "/elsewhere");
  CHECK(to_ini(back) == ini);
  CHECK(back.sim.seed == c.sim.seed);
  // The output directory is not part of the echo, so manifests written to
  // different places stay identical.
  CHECK(ini.find("out/small") == std::string::npos);
}

TEST_CASE("overrides") {
  ScenarioConfig c = parse_scenario(kSmall, "/base");
  ScenarioOverrides o;
  o.seed = 99;
  o.intervals = 7;
  o.output_dir = "/tmp/x";
  apply_overrides(c, o);
  CHECK(c.sim.seed == 99);
  CHECK(c.sim.intervals == 7);
  CHECK(c.sim.symbols == 20);
  CHECK(c.output_dir == fs::path("/tmp/x"));
  ScenarioOverrides full;
  full.full_scale = true;
  apply_overrides(c, full);
  CHECK(c.sim.intervals == 20000);
  CHECK(c.sim.symbols == 200);
}

TEST_CASE("scenario runs are reproducible") {
  ScenarioConfig c = parse_scenario(kSmall, "/");
  c.output_dir = scratch_dir("run_a");
  std::ostringstream log, err;
  REQUIRE(run_scenario(c, ScenarioMode::full, log, err) == 0);
  const fs::path a = c.output_dir;
  c.output_dir = scratch_dir("run_b");
  REQUIRE(run_scenario(c, ScenarioMode::full, log, err) == 0);
  const fs::path b = c.output_dir;

  for (const char* f : {"ber.csv", "bounds.csv", "manifest.json", "codebooks/packing_m2_N4.txt",
                        "codebooks/random_m2_N4_2.txt"}) {
    INFO(f);
    REQUIRE(fs::exists(a / f));
    CHECK(slurp(a / f) == slurp(b / f));
  }
  const auto manifest = nlohmann::json::parse(slurp(a / "manifest.json"));
  CHECK(manifest["scenario"] == "small");
  CHECK(manifest["seed"] == 3);
  CHECK(manifest["files"]["ber.csv"] == git_blob_hash(slurp(a / "ber.csv")));
  const std::string bounds = slurp(a / "bounds.csv");
  CHECK(bounds.rfind("bound,codebook_size,sweep_var,snr_db,empirical_loss,bound_value,stderr,samples,satisfied\n", 0) == 0);
  CHECK(bounds.find("no_direct,4,P1,6,") != std::string::npos);

  // The written codebook loads back as an external file of the same shape.
  const Codebook packed = load_codebook(a / "codebooks/packing_m2_N4.txt");
  CHECK(packed.size() == 4);

  c.output_dir = scratch_dir("run_c");
  c.bounds = false;
  REQUIRE(run_scenario(c, ScenarioMode::bounds_only, log, err) == 0);
  CHECK_FALSE(fs::exists(c.output_dir / "ber.csv"));
  CHECK(fs::exists(c.output_dir / "manifest.json"));
  for (const fs::path& p : {a, b, c.output_dir}) fs::remove_all(p);
}

TEST_CASE("failed runs leave no partial outputs") {
  ScenarioConfig c = parse_scenario(kSmall, "/");
  const fs::path dir = scratch_dir("fail");
  fs::create_directories(dir / "ber.csv");  // blocks the CSV write
  c.output_dir = dir;
  std::ostringstream log, err;
  CHECK(run_scenario(c, ScenarioMode::full, log, err) == 1);
  CHECK(err.str().find("error:") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "codebooks"));
  CHECK_FALSE(fs::exists(dir / "manifest.json"));
  CHECK(fs::is_directory(dir / "ber.csv"));

  ScenarioConfig empty = parse_scenario(kSmall, "/");
  empty.sim.schemes.clear();
  empty.output_dir = scratch_dir("fail_new");
  CHECK(run_scenario(empty, ScenarioMode::full, log, err) == 1);
  CHECK_FALSE(fs::exists(empty.output_dir));
  fs::remove_all(dir);
}

TEST_CASE("git blob hashes") {
  CHECK(git_blob_hash("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
  CHECK(git_blob_hash("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a");
}

TEST_CASE("selfcheck") {
  const fs::path dir = scratch_dir("selfcheck");
  fs::create_directories(dir);
  const fs::path bad = dir / "bad.txt";
  std::ofstream(bad) << "2 2\n1 0 0 0\n0.5 0 0.5 0\n";
  const std::vector<SelfcheckItem> items = run_selfcheck({bad}, 1);
  bool others_pass = true, found = false;
  for (const SelfcheckItem& item : items) {
    if (item.name.find("bad.txt") != std::string::npos) {
      found = true;
      CHECK_FALSE(item.passed);
      CHECK(item.detail.find("not unit norm") != std::string::npos);
    } else {
      INFO(item.name << ": " << item.detail);
      others_pass = others_pass && item.passed;
    }
  }
  CHECK(found);
  CHECK(others_pass);
  fs::remove_all(dir);
}
