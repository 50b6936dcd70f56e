// Command-line front end: codebook generation, bound checks, BER sweeps and
// the self-check suite.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "grassrelay/scenario.hpp"

namespace fs = std::filesystem;
using namespace grassrelay;

namespace {

struct ScenarioFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> intervals;
  std::optional<std::uint64_t> symbols;
  std::optional<std::string> out;
  bool full_scale = false;
};

void add_scenario_flags(CLI::App* cmd, ScenarioFlags& f, bool schedule) {
  cmd->add_option("--config", f.config, "scenario file (see docs/config.md)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", f.seed, "master seed (overrides the config)");
  cmd->add_option("--out", f.out, "output directory (overrides the config)");
  if (schedule) {
    cmd->add_option("--intervals", f.intervals, "coherence intervals")->check(CLI::PositiveNumber);
    cmd->add_option("--symbols", f.symbols, "symbols per interval")->check(CLI::PositiveNumber);
    cmd->add_flag("--full-scale", f.full_scale, "use the full schedule (20000 x 200 by default)");
  }
}

int run(const ScenarioFlags& f, ScenarioMode mode) {
  try {
    ScenarioConfig config = load_scenario(f.config);
    ScenarioOverrides o;
    o.seed = f.seed;
    o.intervals = f.intervals;
    o.symbols = f.symbols;
    if (f.out) o.output_dir = *f.out;
    o.full_scale = f.full_scale;
    apply_overrides(config, o);
    return run_scenario(config, mode, std::cerr, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MIMO amplify-and-forward relay beamforming with limited feedback"};
  app.require_subcommand(1);

  // codebook gen | info
  auto* codebook = app.add_subcommand("codebook", "generate or inspect codebooks");
  codebook->require_subcommand(1);
  auto* gen = codebook->add_subcommand("gen", "generate a codebook");
  int dim = 2, size = 4;
  std::uint64_t book_seed = 1;
  bool random = false;
  GrassmannianOptions packing;
  std::string book_out;
  gen->add_option("--dim,-m", dim, "vector dimension")->required()->check(CLI::Range(1, 64));
  gen->add_option("--size,-N", size, "number of codewords")->required()->check(CLI::Range(2, 4096));
  gen->add_option("--seed", book_seed, "generator seed");
  gen->add_flag("--random", random, "random codebook instead of a line packing");
  gen->add_option("--restarts", packing.restarts, "packing restarts")->check(CLI::PositiveNumber);
  gen->add_option("--iterations", packing.iterations, "refinement steps per restart")
      ->check(CLI::NonNegativeNumber);
  gen->add_option("--out", book_out, "output file (default stdout)");

  auto* info = codebook->add_subcommand("info", "describe codebook files");
  std::vector<std::string> info_files;
  info->add_option("files", info_files, "codebook files")->required()->check(CLI::ExistingFile);

  ScenarioFlags bounds_flags, ber_flags;
  auto* bounds = app.add_subcommand("bounds", "check SNR-loss bounds for a scenario");
  add_scenario_flags(bounds, bounds_flags, false);
  auto* ber = app.add_subcommand("ber", "run a BER sweep (also writes bounds when enabled)");
  add_scenario_flags(ber, ber_flags, true);

  auto* selfcheck = app.add_subcommand("selfcheck", "run the fast invariant suite");
  std::vector<std::string> check_books;
  std::uint64_t check_seed = 1;
  selfcheck->add_option("--codebook", check_books, "also validate these codebook files");
  selfcheck->add_option("--seed", check_seed, "seed for the randomized checks");

  CLI11_PARSE(app, argc, argv);

  if (*gen) {
    try {
      RngStream rng(book_seed, (static_cast<std::uint64_t>(dim) << 32) | size);
      const Codebook book = random ? generate_random_codebook(rng, dim, size)
                                   : generate_grassmannian(rng, dim, size, packing);
      if (book_out.empty())
        std::cout << format_codebook(book);
      else
        save_codebook(book, book_out);
      std::cerr << "dim " << dim << ", N " << size << ", min distance " << book.min_distance()
                << "\n";
      return 0;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    }
  }
  if (*info) {
    int status = 0;
    for (const std::string& file : info_files) {
      try {
        const Codebook book = load_codebook(file);
        const int m = static_cast<int>(book.dim());
        const double n = static_cast<double>(book.size());
        std::cout << file << ": dim " << m << ", N " << book.size() << ", min distance "
                  << book.min_distance() << ", fingerprint " << book.fingerprint();
        if (m > 1) std::cout << ", distortion bound " << distortion_bound(m, n, book.min_distance());
        std::cout << "\n";
      } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        status = 1;
      }
    }
    return status;
  }
  if (*bounds) return run(bounds_flags, ScenarioMode::bounds_only);
  if (*ber) return run(ber_flags, ScenarioMode::full);
  if (*selfcheck) {
    const auto start = std::chrono::steady_clock::now();
    std::vector<fs::path> paths(check_books.begin(), check_books.end());
    const std::vector<SelfcheckItem> items = run_selfcheck(paths, check_seed);
    bool ok = true;
    for (const SelfcheckItem& item : items) {
      std::cout << (item.passed ? "PASS " : "FAIL ") << item.name << ": " << item.detail << "\n";
      ok = ok && item.passed;
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (ok ? "all checks passed" : "some checks failed") << " in " << seconds << " s\n";
    return ok ? 0 : 1;
  }
  return 0;
}
