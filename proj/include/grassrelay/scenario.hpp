#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "grassrelay/analysis.hpp"
#include "grassrelay/simulator.hpp"

namespace grassrelay {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One experiment: BER sweep, bound checks and the codebooks they use.
/// See docs/config.md for the file format.
struct ScenarioConfig {
  std::string name = "scenario";
  SimulationConfig sim;
  std::uint64_t full_intervals = 20000;
  std::uint64_t full_symbols = 200;

  std::uint64_t codebook_seed = 1;
  GrassmannianOptions packing;
  int random_books = 10;
  // (dim, size) -> file; replaces the generated packing of that shape.
  std::map<std::pair<int, int>, std::filesystem::path> codebook_files;

  bool bounds = true;
  std::size_t bound_samples = 2000;

  std::filesystem::path output_dir = "out";

  /// Throws ConfigError on an inconsistent config or a missing codebook file.
  void validate() const;
};

/// Parses the INI text. Relative codebook paths resolve against `base_dir`.
ScenarioConfig parse_scenario(std::string_view text, const std::filesystem::path& base_dir = {},
                              std::string_view source = "<config>");
ScenarioConfig load_scenario(const std::filesystem::path& path);

/// Normalized INI form of an effective config (echoed into the manifest).
std::string to_ini(const ScenarioConfig& config);

struct ScenarioOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> intervals;
  std::optional<std::uint64_t> symbols;
  std::optional<std::filesystem::path> output_dir;
  bool full_scale = false;
};

void apply_overrides(ScenarioConfig& config, const ScenarioOverrides& overrides);

/// Generates (or loads) every codebook the schemes and bounds need.
CodebookLibrary build_codebook_library(const ScenarioConfig& config);

struct BoundRow {
  std::string bound;  // no_direct, direct_full or direct_quantized
  int codebook_size = 0;
  SweepLink sweep = SweepLink::p1;
  double snr_db = 0.0;
  BoundReport report;
};

/// Paired Monte-Carlo loss against the matching analytic bound at every grid
/// point, for every codebook size used by a quantized scheme.
std::vector<BoundRow> run_bound_checks(const ScenarioConfig& config, const CodebookLibrary& books);
void write_bounds_csv(std::ostream& out, const std::vector<BoundRow>& rows);

/// Git blob id: SHA-1 of "blob <size>\0" followed by the content.
std::string git_blob_hash(std::string_view content);

enum class ScenarioMode { full, bounds_only };

/// Writes ber.csv (full mode), bounds.csv, codebooks/ and manifest.json into
/// the output directory. Returns 0 on success. On failure prints the error,
/// removes whatever this run wrote and returns 1.
int run_scenario(const ScenarioConfig& config, ScenarioMode mode, std::ostream& log,
                 std::ostream& err);

struct SelfcheckItem {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Fast invariant suite. Each supplied codebook file is loaded and checked.
std::vector<SelfcheckItem> run_selfcheck(const std::vector<std::filesystem::path>& codebooks = {},
                                         std::uint64_t seed = 1);

}  // namespace grassrelay
