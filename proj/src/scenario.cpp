#include "grassrelay/scenario.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "grassrelay/parallel.hpp"
#include "json.hpp"

namespace grassrelay {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const auto end = comma == std::string_view::npos ? s.size() : comma;
    std::string item = trim(s.substr(start, end - start));
    if (!item.empty()) out.push_back(std::move(item));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// Reads one INI section and remembers which keys were consumed so that
// leftovers can be reported as typos.
class Section {
 public:
  Section(const pt::ptree* tree, std::string name, std::string_view source)
      : tree_(tree), name_(std::move(name)), source_(source) {}

  std::optional<std::string> raw(const std::string& key) {
    used_.insert(key);
    if (!tree_) return std::nullopt;
    const auto child = tree_->get_child_optional(pt::ptree::path_type(key, '\0'));
    if (!child) return std::nullopt;
    return trim(child->data());
  }

  std::string require(const std::string& key) {
    auto v = raw(key);
    if (!v || v->empty()) fail(key, "is required");
    return *v;
  }

  std::uint64_t u64(const std::string& key, std::uint64_t fallback) {
    const auto v = raw(key);
    return v ? to_u64(key, *v) : fallback;
  }
  int integer(const std::string& key, int fallback) {
    const auto v = raw(key);
    if (!v) return fallback;
    const std::uint64_t x = to_u64(key, *v);
    if (x > 1'000'000'000ULL) fail(key, "is too large");
    return static_cast<int>(x);
  }
  double real(const std::string& key, double fallback) {
    const auto v = raw(key);
    return v ? to_double(key, *v) : fallback;
  }
  bool flag(const std::string& key, bool fallback) {
    const auto v = raw(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "yes" || *v == "1") return true;
    if (*v == "false" || *v == "no" || *v == "0") return false;
    fail(key, "must be true or false, got '" + *v + "'");
  }
  std::vector<double> reals(const std::string& key) {
    std::vector<double> out;
    for (const std::string& item : split_list(require(key))) out.push_back(to_double(key, item));
    return out;
  }

  // Keys matching `prefix` that were not read through the accessors above.
  std::vector<std::pair<std::string, std::string>> take_prefixed(const std::string& prefix) {
    std::vector<std::pair<std::string, std::string>> out;
    if (!tree_) return out;
    for (const auto& [key, value] : *tree_) {
      if (key.rfind(prefix, 0) == 0) {
        used_.insert(key);
        out.emplace_back(key, trim(value.data()));
      }
    }
    return out;
  }

  void reject_unknown() const {
    if (!tree_) return;
    for (const auto& [key, value] : *tree_)
      if (!used_.count(key)) fail(key, "is not a recognized key");
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ConfigError(std::string(source_) + ": [" + name_ + "] " + key + " " + what);
  }

 private:
  std::uint64_t to_u64(const std::string& key, const std::string& v) const {
    std::size_t used = 0;
    std::uint64_t x = 0;
    try {
      if (!v.empty() && v[0] != '-') x = std::stoull(v, &used, 0);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != v.size()) fail(key, "must be a nonnegative integer, got '" + v + "'");
    return x;
  }
  double to_double(const std::string& key, const std::string& v) const {
    std::size_t used = 0;
    double x = 0;
    try {
      x = std::stod(v, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != v.size() || !std::isfinite(x))
      fail(key, "must be a finite number, got '" + v + "'");
    return x;
  }

  const pt::ptree* tree_;
  std::string name_;
  std::string_view source_;
  std::set<std::string> used_;
};

std::vector<int> quantized_sizes(const ScenarioConfig& config) {
  std::set<int> sizes;
  for (const SchemeSpec& s : config.sim.schemes)
    if (uses_codebooks(s.id) && s.id != SchemeId::random_codebook_baseline)
      sizes.insert(s.codebook_size);
  return {sizes.begin(), sizes.end()};
}

std::string book_file_name(const std::string& kind, int dim, int size) {
  return "codebooks/" + kind + "_m" + std::to_string(dim) + "_N" + std::to_string(size);
}

}  // namespace

void ScenarioConfig::validate() const {
  try {
    sim.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(name + ": " + e.what());
  }
  if (full_intervals < 1 || full_symbols < 1)
    throw ConfigError(name + ": full-scale schedule needs >= 1 interval and symbol");
  if (packing.restarts < 1 || packing.iterations < 0)
    throw ConfigError(name + ": codebook restarts must be >= 1 and iterations >= 0");
  if (needs_random_books(sim.schemes) && random_books < 1)
    throw ConfigError(name + ": random_books must be >= 1");
  if (bounds && bound_samples < 2) throw ConfigError(name + ": bound samples must be >= 2");
  const auto required = required_codebooks(sim.schemes, sim.dims);
  for (const auto& [shape, file] : codebook_files) {
    if (std::find(required.begin(), required.end(), shape) == required.end())
      throw ConfigError(name + ": codebook file " + file.string() + " (m=" +
                        std::to_string(shape.first) + ", N=" + std::to_string(shape.second) +
                        ") is not used by any scheme");
    if (!fs::is_regular_file(file))
      throw ConfigError(name + ": codebook file " + file.string() + " does not exist");
  }
}

ScenarioConfig parse_scenario(std::string_view text, const fs::path& base_dir,
                              std::string_view source) {
  pt::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string(source) + ":" + std::to_string(e.line()) + ": " + e.message());
  }
  const std::set<std::string> known{"scenario", "system",    "links",     "schedule",
                                    "schemes",  "optimizer", "codebooks", "bounds"};
  for (const auto& [key, value] : tree) {
    if (value.empty() && !value.data().empty())
      throw ConfigError(std::string(source) + ": key '" + key + "' is outside any section");
    if (!known.count(key)) throw ConfigError(std::string(source) + ": unknown section [" + key + "]");
  }
  auto section = [&](const std::string& name) {
    const auto child = tree.get_child_optional(name);
    return Section(child ? &*child : nullptr, name, source);
  };

  ScenarioConfig c;
  SimulationConfig& sim = c.sim;

  Section scenario = section("scenario");
  c.name = scenario.raw("name").value_or("scenario");
  sim.seed = scenario.u64("seed", 1);
  if (const auto out = scenario.raw("output")) c.output_dir = *out;
  scenario.reject_unknown();

  Section system = section("system");
  sim.dims.m = system.integer("m", 2);
  sim.dims.n = system.integer("n", 2);
  sim.dims.l = system.integer("l", 2);
  sim.direct_link = system.flag("direct_link", false);
  system.reject_unknown();

  Section links = section("links");
  sim.p0_db = links.real("p0_db", 0.0);
  sim.p1_db = links.real("p1_db", 0.0);
  sim.p2_db = links.real("p2_db", 0.0);
  const std::string sweep = links.require("sweep");
  const auto sweep_link = parse_sweep_link(sweep);
  if (!sweep_link) links.fail("sweep", "must be P0, P1 or P2, got '" + sweep + "'");
  sim.sweep = *sweep_link;
  sim.grid_db = links.reals("grid_db");
  links.reject_unknown();

  Section schedule = section("schedule");
  sim.intervals = schedule.u64("intervals", 2000);
  sim.symbols = schedule.u64("symbols", 100);
  c.full_intervals = schedule.u64("full_intervals", 20000);
  c.full_symbols = schedule.u64("full_symbols", 200);
  schedule.reject_unknown();

  Section schemes = section("schemes");
  for (const std::string& label : split_list(schemes.raw("list").value_or(""))) {
    try {
      sim.schemes.push_back(SchemeSpec::parse(label));
    } catch (const std::invalid_argument& e) {
      schemes.fail("list", e.what());
    }
  }
  sim.feedback_b = schemes.integer("feedback_b", 4);
  sim.mmse_bits = schemes.integer("mmse_bits", 1);
  schemes.reject_unknown();

  Section optimizer = section("optimizer");
  const auto restarts = optimizer.raw("restarts");
  sim.ascent.restarts = restarts && *restarts != "auto" ? optimizer.integer("restarts", -1) : -1;
  sim.ascent.tol = optimizer.real("tol", sim.ascent.tol);
  sim.ascent.max_iterations = optimizer.integer("max_iterations", sim.ascent.max_iterations);
  sim.ascent.seed = optimizer.u64("seed", sim.ascent.seed);
  optimizer.reject_unknown();

  Section books = section("codebooks");
  c.codebook_seed = books.u64("seed", 1);
  c.packing.restarts = books.integer("restarts", c.packing.restarts);
  c.packing.iterations = books.integer("iterations", c.packing.iterations);
  c.random_books = books.integer("random_books", 10);
  for (const auto& [key, value] : books.take_prefixed("file_")) {
    int dim = 0, size = 0;
    char trailing = 0;
    if (std::sscanf(key.c_str(), "file_%dx%d%c", &dim, &size, &trailing) != 2 || dim < 1 ||
        size < 1)
      books.fail(key, "must look like file_<m>x<N>");
    if (value.empty()) books.fail(key, "needs a path");
    fs::path file = value;
    if (file.is_relative() && !base_dir.empty()) file = base_dir / file;
    c.codebook_files[{dim, size}] = file;
  }
  books.reject_unknown();

  Section bounds = section("bounds");
  c.bounds = bounds.flag("enabled", true);
  c.bound_samples = bounds.u64("samples", 2000);
  bounds.reject_unknown();

  c.validate();
  return c;
}

ScenarioConfig load_scenario(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scenario(text.str(), path.parent_path(), path.string());
}

std::string to_ini(const ScenarioConfig& c) {
  const SimulationConfig& sim = c.sim;
  std::ostringstream out;
  out << "[scenario]\nname = " << c.name << "\nseed = " << sim.seed << "\n\n";
  out << "[system]\nm = " << sim.dims.m << "\nn = " << sim.dims.n << "\nl = " << sim.dims.l
      << "\ndirect_link = " << (sim.direct_link ? "true" : "false") << "\n\n";
  out << "[links]\np0_db = " << format_double(sim.p0_db) << "\np1_db = " << format_double(sim.p1_db)
      << "\np2_db = " << format_double(sim.p2_db) << "\nsweep = " << to_string(sim.sweep)
      << "\ngrid_db = ";
  for (std::size_t i = 0; i < sim.grid_db.size(); ++i)
    out << (i ? ", " : "") << format_double(sim.grid_db[i]);
  out << "\n\n[schedule]\nintervals = " << sim.intervals << "\nsymbols = " << sim.symbols
      << "\nfull_intervals = " << c.full_intervals << "\nfull_symbols = " << c.full_symbols
      << "\n\n[schemes]\nlist = ";
  for (std::size_t i = 0; i < sim.schemes.size(); ++i)
    out << (i ? ", " : "") << sim.schemes[i].label();
  out << "\nfeedback_b = " << sim.feedback_b << "\nmmse_bits = " << sim.mmse_bits << "\n\n";
  out << "[optimizer]\nrestarts = ";
  if (sim.ascent.restarts < 0)
    out << "auto";
  else
    out << sim.ascent.restarts;
  out << "\ntol = " << format_double(sim.ascent.tol)
      << "\nmax_iterations = " << sim.ascent.max_iterations << "\nseed = " << sim.ascent.seed
      << "\n\n[codebooks]\nseed = " << c.codebook_seed << "\nrestarts = " << c.packing.restarts
      << "\niterations = " << c.packing.iterations << "\nrandom_books = " << c.random_books
      << "\n";
  for (const auto& [shape, file] : c.codebook_files)
    out << "file_" << shape.first << "x" << shape.second << " = " << file.generic_string() << "\n";
  out << "\n[bounds]\nenabled = " << (c.bounds ? "true" : "false")
      << "\nsamples = " << c.bound_samples << "\n";
  return out.str();
}

void apply_overrides(ScenarioConfig& config, const ScenarioOverrides& o) {
  if (o.full_scale) {
    config.sim.intervals = config.full_intervals;
    config.sim.symbols = config.full_symbols;
  }
  if (o.seed) config.sim.seed = *o.seed;
  if (o.intervals) config.sim.intervals = *o.intervals;
  if (o.symbols) config.sim.symbols = *o.symbols;
  if (o.output_dir) config.output_dir = *o.output_dir;
  config.validate();
}

CodebookLibrary build_codebook_library(const ScenarioConfig& config) {
  CodebookLibrary library;
  for (const auto& [dim, size] : required_codebooks(config.sim.schemes, config.sim.dims)) {
    const auto file = config.codebook_files.find({dim, size});
    if (file != config.codebook_files.end()) {
      Codebook book = load_codebook(file->second);
      if (book.dim() != dim || book.size() != size)
        throw CodebookError(file->second.string() + ": expected " + std::to_string(size) +
                            " codewords of dimension " + std::to_string(dim) + ", found " +
                            std::to_string(book.size()) + " of dimension " +
                            std::to_string(book.dim()));
      library.grassmannian.emplace(std::pair{dim, size}, std::move(book));
      continue;
    }
    RngStream rng(config.codebook_seed, (static_cast<std::uint64_t>(dim) << 32) | size);
    library.grassmannian.emplace(std::pair{dim, size},
                                 generate_grassmannian(rng, dim, size, config.packing));
  }
  if (needs_random_books(config.sim.schemes)) {
    std::vector<SchemeSpec> random_only;
    for (const SchemeSpec& s : config.sim.schemes)
      if (s.id == SchemeId::random_codebook_baseline) random_only.push_back(s);
    for (const auto& [dim, size] : required_codebooks(random_only, config.sim.dims)) {
      std::vector<Codebook>& list = library.random[{dim, size}];
      for (int k = 0; k < config.random_books; ++k) {
        RngStream rng(config.codebook_seed,
                      (1ULL << 62) | (static_cast<std::uint64_t>(dim) << 40) |
                          (static_cast<std::uint64_t>(size) << 16) | static_cast<std::uint64_t>(k));
        list.push_back(generate_random_codebook(rng, dim, size));
      }
    }
  }
  return library;
}

std::vector<BoundRow> run_bound_checks(const ScenarioConfig& config, const CodebookLibrary& books) {
  const SimulationConfig& sim = config.sim;
  const std::uint64_t seed = mix64(sim.seed ^ 0x626F756E6473ULL);
  std::vector<BoundRow> rows;
  for (int size : quantized_sizes(config)) {
    const Codebook& c1 = books.packing(sim.dims.m, size);
    const Codebook& c2 = books.packing(sim.dims.n, size);
    for (double db : sim.grid_db) {
      const LinkGains gains = sim.gains_at(db);
      auto add = [&](const char* name, const BoundReport& report) {
        rows.push_back(BoundRow{name, size, sim.sweep, db, report});
      };
      if (!sim.direct_link) {
        add("no_direct", no_direct_loss(seed, config.bound_samples, sim.dims, gains, c1, c2));
      } else {
        add("direct_full",
            direct_full_loss(seed, config.bound_samples, sim.dims, gains, c1, c2, sim.ascent));
        add("direct_quantized", direct_quantized_loss(seed, config.bound_samples, sim.dims, gains,
                                                      c1, c1, c2, sim.ascent));
      }
    }
  }
  return rows;
}

void write_bounds_csv(std::ostream& out, const std::vector<BoundRow>& rows) {
  out << "bound,codebook_size,sweep_var,snr_db,empirical_loss,bound_value,stderr,samples,"
         "satisfied\n";
  char buf[96];
  for (const BoundRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%.9e,%.9e,%.9e", r.report.empirical_loss,
                  r.report.bound_value, r.report.standard_error);
    out << r.bound << ',' << r.codebook_size << ',' << to_string(r.sweep) << ','
        << format_double(r.snr_db) << ',' << buf << ',' << r.report.samples << ','
        << (r.report.satisfied ? "true" : "false") << '\n';
  }
}

std::string git_blob_hash(std::string_view content) {
  const std::string header = "blob " + std::to_string(content.size()) + std::string(1, '\0');
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx) throw std::runtime_error("cannot allocate digest context");
  const bool ok = EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) == 1 &&
                  EVP_DigestUpdate(ctx, header.data(), header.size()) == 1 &&
                  EVP_DigestUpdate(ctx, content.data(), content.size()) == 1 &&
                  EVP_DigestFinal_ex(ctx, digest, &length) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) throw std::runtime_error("SHA-1 computation failed");
  std::string hex;
  char byte[3];
  for (unsigned int i = 0; i < length; ++i) {
    std::snprintf(byte, sizeof byte, "%02x", digest[i]);
    hex += byte;
  }
  return hex;
}

int run_scenario(const ScenarioConfig& config, ScenarioMode mode, std::ostream& log,
                 std::ostream& err) {
  const fs::path out_dir = config.output_dir;
  bool created_dir = false;
  std::vector<fs::path> written;
  try {
    config.validate();
    if (!fs::exists(out_dir)) {
      fs::create_directories(out_dir);
      created_dir = true;
    }
    nlohmann::ordered_json files = nlohmann::ordered_json::object();
    auto emit = [&](const std::string& relative, const std::string& content) {
      const fs::path path = out_dir / relative;
      fs::create_directories(path.parent_path());
      std::ofstream file(path, std::ios::binary);
      if (!file) throw std::runtime_error("cannot write " + path.string());
      written.push_back(path);
      file << content;
      if (!file) throw std::runtime_error("failed writing " + path.string());
      files[relative] = git_blob_hash(content);
    };

    log << config.name << ": preparing codebooks\n";
    const CodebookLibrary books = build_codebook_library(config);
    for (const auto& [shape, book] : books.grassmannian)
      emit(book_file_name("packing", shape.first, shape.second) + ".txt", format_codebook(book));
    for (const auto& [shape, list] : books.random)
      for (std::size_t k = 0; k < list.size(); ++k)
        emit(book_file_name("random", shape.first, shape.second) + "_" + std::to_string(k) +
                 ".txt",
             format_codebook(list[k]));

    if (mode == ScenarioMode::full) {
      log << config.name << ": simulating " << config.sim.intervals << " intervals x "
          << config.sim.symbols << " symbols, " << config.sim.schemes.size() << " schemes, "
          << config.sim.grid_db.size() << " points\n";
      std::ostringstream csv;
      write_ber_csv(csv, simulate_ber(config.sim, books), config.sim.seed);
      emit("ber.csv", csv.str());
    }
    if (config.bounds) {
      log << config.name << ": bound checks with " << config.bound_samples << " channels\n";
      const std::vector<BoundRow> rows = run_bound_checks(config, books);
      for (const BoundRow& r : rows)
        if (!r.report.satisfied)
          log << "warning: " << r.bound << " N=" << r.codebook_size << " at " << r.snr_db
              << " dB exceeds its bound\n";
      std::ostringstream csv;
      write_bounds_csv(csv, rows);
      emit("bounds.csv", csv.str());
    }

    nlohmann::ordered_json manifest;
    manifest["scenario"] = config.name;
    manifest["mode"] = mode == ScenarioMode::full ? "full" : "bounds";
    manifest["seed"] = config.sim.seed;
    manifest["fingerprint"] = config_fingerprint(config.sim, books);
    manifest["config"] = to_ini(config);
    manifest["files"] = files;
    const fs::path manifest_path = out_dir / "manifest.json";
    written.push_back(manifest_path);
    std::ofstream file(manifest_path, std::ios::binary);
    file << manifest.dump(2) << '\n';
    if (!file) throw std::runtime_error("failed writing " + manifest_path.string());
    log << config.name << ": wrote " << out_dir.string() << "\n";
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    std::error_code ec;
    if (created_dir) {
      fs::remove_all(out_dir, ec);
    } else {
      for (const fs::path& p : written) fs::remove(p, ec);
      if (fs::is_directory(out_dir / "codebooks", ec) && fs::is_empty(out_dir / "codebooks", ec))
        fs::remove(out_dir / "codebooks", ec);
    }
    return 1;
  }
}

// ---------------------------------------------------------------------------

namespace {

SelfcheckItem check(const std::string& name, const std::function<std::string()>& body) {
  SelfcheckItem item{name, false, {}};
  try {
    item.detail = body();
    item.passed = true;
  } catch (const std::exception& e) {
    item.detail = e.what();
  }
  return item;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw std::runtime_error(what);
}

}  // namespace

std::vector<SelfcheckItem> run_selfcheck(const std::vector<fs::path>& codebooks,
                                         std::uint64_t seed) {
  std::vector<SelfcheckItem> items;

  items.push_back(check("feedback bit accounting", [] {
    const SystemDims dims{3, 3, 3};
    for (int b : {0, 1, 4, 7}) {
      for (int n : {8, 16}) {
        const FeedbackBudget budget{n, n, n, b, 3};
        const int base = n == 8 ? 15 : 20;
        const int mod = n == 8 ? 9 : 12;
        require(feedback_bits(SchemeId::properly_quantized_dl, budget, dims, true) == base + 4 * b,
                "properly quantized count");
        require(feedback_bits(SchemeId::modified_quantized_dl, budget, dims, true) == mod + 2 * b,
                "modified quantized count");
        require(feedback_bits(SchemeId::mmse_baseline, budget, dims, true) == 54 + b, "MMSE count");
      }
    }
    require(feedback_bits(SchemeId::mmse_baseline, {}, {2, 2, 2}, false) == 16,
            "MMSE count without direct link");
    return std::string("exact");
  }));

  items.push_back(check("relay optimum beats random feasible points", [seed] {
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 20; ++i) {
      RngStream rng(seed, 0x7431000 + i);
      const ChannelSet ch = sample_channel_set(rng, {2, 2, 2}, LinkGains::from_db(0, 3, 6), false);
      const double optimum = optimal_no_direct(ch).snr.gamma_total;
      const double best = best_random_feasible_snr(ch, rng, 2000);
      worst = std::max(worst, best / optimum);
      require(best <= optimum * (1.0 + 1e-9), "random point exceeds the closed form");
    }
    return "best random / optimum = " + format_double(worst);
  }));

  items.push_back(check("inequality fuzz", [seed] {
    RngStream rng(seed, 0x1e44a);
    std::vector<Codebook> books;
    for (int m : {2, 3}) books.push_back(generate_random_codebook(rng, m, 8));
    for (int i = 0; i < 10000; ++i) {
      const double x1 = -std::log(rng.uniform()) * 5, x2 = -std::log(rng.uniform()) * 5;
      const double y1 = -std::log(rng.uniform()) * 5, y2 = -std::log(rng.uniform()) * 5;
      require(lemma1_check(x1, x2, y1, y2), "relayed SNR Lipschitz inequality");
      require(ratio_difference_check(x1, x2, y1 + 1e-3), "ratio difference inequality");
      const int m = 2 + i % 2;
      const ComplexVector u = sample_unit_vector(rng, m), v = sample_unit_vector(rng, m),
                          w = sample_unit_vector(rng, m);
      require(overlap_difference_check(u, v, w), "overlap difference inequality");
      const ComplexMatrix h = sample_complex_gaussian_matrix(rng, 3, m);
      require(lemma3_check(h, u, books[static_cast<std::size_t>(m - 2)]), "quantization gain bound");
      require(lemma6_check(h, u), "singular vector sandwich");
    }
    return std::string("10000 draws, no violations");
  }));

  items.push_back(check("mean channel energy", [seed] {
    const int p = 3, q = 3;
    double total = 0.0;
    const int samples = 20000;
    for (int i = 0; i < samples; ++i) {
      RngStream rng(seed, 0x1e2000 + static_cast<std::uint64_t>(i));
      total += svd(sample_complex_gaussian_matrix(rng, p, q)).singulars.squaredNorm();
    }
    const double mean = total / samples;
    require(std::abs(mean - p * q) <= 0.02 * p * q, "E{sum sigma^2} = " + format_double(mean));
    return "E{sum sigma^2} = " + format_double(mean) + " (3x3)";
  }));

  items.push_back(check("strongest-mode gap constant", [seed] {
    const GapEstimate gap = appendix3_gap(seed, 3, 3, 100000);
    require(std::abs(gap.gap_db - 1.24) <= 0.05, "gap " + format_double(gap.gap_db) + " dB");
    return "gap " + format_double(gap.gap_db) + " dB";
  }));

  items.push_back(check("combiner output SNR", [seed] {
    RngStream book_rng(seed, 0xc0de);
    const Codebook c = generate_grassmannian(book_rng, 3, 8, {4, 100});
    for (std::uint64_t i = 0; i < 20; ++i) {
      RngStream rng(seed, 0xc0b0 + i);
      const ChannelSet ch = sample_channel_set(rng, {3, 3, 3}, LinkGains::from_db(-2, 2, 2), true);
      for (const BeamformingSolution& sol :
           {optimal_with_direct(ch), properly_quantized_with_direct(
                                         ch, c, c, c, DirectLinkMode::quantized_singulars),
            baseline_switch_stronger(ch)}) {
        const double analytic = effective_link(ch, sol).combined_snr();
        require(std::abs(analytic - sol.snr.gamma_total) <= 1e-9 * sol.snr.gamma_total,
                "combined SNR differs from the beamforming SNR");
      }
    }
    return std::string("matches to 1e-9");
  }));

  items.push_back(check("line packing quality", [seed] {
    RngStream rng(seed, 0xbac0);
    const Codebook c = generate_grassmannian(rng, 2, 4);
    require(c.min_distance() >= std::sqrt(2.0 / 3.0) - 1e-4,
            "(2,4) packing distance " + format_double(c.min_distance()));
    return "(2,4) distance " + format_double(c.min_distance());
  }));

  for (const fs::path& path : codebooks) {
    items.push_back(check("codebook " + path.string(), [&path] {
      const Codebook c = load_codebook(path);
      return std::to_string(c.dim()) + " x " + std::to_string(c.size()) + ", distance " +
             format_double(c.min_distance());
    }));
  }
  return items;
}

}  // namespace grassrelay
