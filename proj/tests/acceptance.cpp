// Acceptance gate: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "grassrelay/analysis.hpp"
#include "grassrelay/parallel.hpp"
#include "grassrelay/scenario.hpp"

using namespace grassrelay;
namespace fs = std::filesystem;

#ifndef GRASSRELAY_SOURCE_DIR
#define GRASSRELAY_SOURCE_DIR "."
#endif

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

fs::path config_path(const std::string& name) {
  return fs::path(GRASSRELAY_SOURCE_DIR) / "configs" / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

const BerCurve& curve_named(const std::vector<BerCurve>& curves, const std::string& label) {
  for (const BerCurve& c : curves)
    if (c.scheme.label() == label) return c;
  throw std::runtime_error("no curve " + label);
}

// a <= b up to three combined binomial standard errors.
bool not_worse(const BerPoint& a, const BerPoint& b) {
  return a.ber <= b.ber + 3.0 * std::hypot(a.standard_error, b.standard_error);
}

// ---------------------------------------------------------------------------

Outcome table_one() {
  const SystemDims d{3, 3, 3};
  struct Row {
    SchemeId id;
    int n;
    int constant;
    int per_b;
  };
  const Row rows[] = {{SchemeId::properly_quantized_dl, 8, 15, 4},
                      {SchemeId::properly_quantized_dl, 16, 20, 4},
                      {SchemeId::modified_quantized_dl, 8, 9, 2},
                      {SchemeId::modified_quantized_dl, 16, 12, 2},
                      {SchemeId::mmse_baseline, 1, 54, 1}};
  int checked = 0;
  for (const Row& r : rows)
    for (int b = 0; b <= 16; ++b) {
      ++checked;
      if (feedback_bits(r.id, {r.n, r.n, r.n, b, 3}, d, true) != r.constant + r.per_b * b)
        return {false, fmt("%s N=%d b=%d mismatch", std::string(to_string(r.id)).c_str(), r.n, b)};
    }
  return {true, fmt("15+4b, 20+4b, 9+2b, 12+2b, 54+b exact for b = 0..16 (%d cases)", checked)};
}

Outcome gap_constant() {
  const GapEstimate g = appendix3_gap(2024, 3, 3, 100000);
  return {std::abs(g.gap_db - 1.24) <= 0.05,
          fmt("10log10(1+E{nu2^2}/E{nu1^2}) = %.4f dB (target 1.24 +- 0.05)", g.gap_db)};
}

Outcome mean_energy() {
  bool ok = true;
  std::string detail;
  for (auto [p, q] : {std::pair{2, 2}, std::pair{3, 3}, std::pair{2, 3}}) {
    const double sum = appendix3_gap(77 + p * 10 + q, p, q, 100000).mean_singular_sq.sum();
    const double rel = std::abs(sum / (p * q) - 1.0);
    ok = ok && rel <= 0.02;
    detail += fmt("%s(%d,%d): %.4f vs %d", detail.empty() ? "" : "; ", p, q, sum, p * q);
  }
  return {ok, detail};
}

Outcome rank_one_optimality() {
  const std::size_t instances = 200, draws = 10000;
  std::vector<double> ratio(instances);
  parallel_for(instances, [&](std::size_t i) {
    RngStream rng(4004, i);
    const LinkGains g{0.0, db_to_linear(-5 + 15 * rng.uniform()), db_to_linear(-5 + 15 * rng.uniform())};
    const ChannelSet ch = sample_channel_set(rng, {2, 2, 2}, g, false);
    const double best = optimal_no_direct(ch).snr.gamma_total;
    ratio[i] = best_random_feasible_snr(ch, rng, draws) / best;
  });
  double worst = 0.0;
  for (double r : ratio) worst = std::max(worst, r);
  return {worst <= 1.0 + 1e-9,
          fmt("%zu instances x %zu draws; best random / closed form = %.9f", instances, draws, worst)};
}

Outcome bound_suites() {
  bool ok = true;
  int rows = 0;
  double worst = -1e300;  // largest (loss - bound) / stderr
  RngStream book_rng(5005, 0);
  const Codebook c2_4 = generate_grassmannian(book_rng, 2, 4);
  const Codebook c2_8 = generate_grassmannian(book_rng, 2, 8);
  const Codebook c3_8 = generate_grassmannian(book_rng, 3, 8);
  auto record = [&](const BoundReport& r) {
    ++rows;
    ok = ok && r.satisfied;
    worst = std::max(worst, (r.empirical_loss - r.bound_value) / std::max(r.standard_error, 1e-300));
  };
  for (double p1 : {0.0, 4.0, 8.0})
    for (const Codebook* c : {&c2_4, &c2_8})
      record(no_direct_loss(5100 + static_cast<std::uint64_t>(p1), 10000, {2, 2, 2},
                            LinkGains::from_db(0, p1, 8), *c, *c));
  for (double p0 : {-4.0, 0.0, 4.0}) {
    const LinkGains g = LinkGains::from_db(p0, 2, 2);
    const auto seed = static_cast<std::uint64_t>(5200 + p0);
    record(direct_full_loss(seed, 10000, {3, 3, 3}, g, c3_8, c3_8));
    record(direct_quantized_loss(seed, 10000, {3, 3, 3}, g, c3_8, c3_8, c3_8));
  }
  return {ok, fmt("%d bound rows x 10^4 channels all within bound + 3 se (closest: loss - bound = %.1f se)",
                  rows, worst)};
}

Outcome isotropy() {
  const std::size_t instances = 2000;
  std::vector<double> stat(instances);
  RngStream q_rng(6006, 1u << 20);
  const ComplexVector q = sample_unit_vector(q_rng, 3);
  parallel_for(instances, [&](std::size_t i) {
    RngStream rng(6006, i);
    const ChannelSet ch = sample_channel_set(rng, {3, 3, 3}, LinkGains::from_db(0, 2, 2), true);
    stat[i] = std::norm(q.dot(optimal_with_direct(ch).tx));
  });
  const double d = ks_statistic(stat, [](double x) { return beta1_cdf(x, 2.0); });
  const double p = ks_pvalue(d, instances);

  const std::size_t rotations = 200;
  std::vector<double> err(rotations);
  parallel_for(rotations, [&](std::size_t i) {
    RngStream rng(6007, i);
    const ChannelSet ch = sample_channel_set(rng, {3, 3, 3}, LinkGains::from_db(0, 2, 2), true);
    const ComplexMatrix u = sample_unitary(rng, 3);
    ChannelSet rotated = ch;
    rotated.h1 = ch.h1 * u;
    rotated.h0 = ch.direct() * u;
    const BeamformingSolution a = optimal_with_direct(ch), b = optimal_with_direct(rotated);
    const RelayObjective f = direct_link_objective(ch, a.snr.gamma2);
    err[i] = std::abs(f.value(u * b.tx) - f.value(a.tx)) / f.value(a.tx);
  });
  double worst = 0.0;
  for (double e : err) worst = std::max(worst, e);
  return {p > 0.01 && worst <= 1e-8,
          fmt("KS vs Beta(1,2): D = %.4f, p = %.3f over %zu; rotation mismatch %.2e over %zu",
              d, p, instances, worst, rotations)};
}

Outcome fig6_ordering() {
  const ScenarioConfig c = load_scenario(config_path("fig6.ini"));
  const std::vector<BerCurve> curves = simulate_ber(c.sim, build_codebook_library(c));
  const BerCurve& opt = curve_named(curves, "optimal_no_dl");
  const BerCurve& n8 = curve_named(curves, "quantized_no_dl[N=8]");
  const BerCurve& n4 = curve_named(curves, "quantized_no_dl[N=4]");
  const BerCurve& rnd = curve_named(curves, "random_codebook_baseline[N=4]");
  bool ok = true;
  std::string detail;
  for (std::size_t p = 0; p < opt.points.size(); ++p) {
    const bool here = not_worse(opt.points[p], n8.points[p]) &&
                      not_worse(n8.points[p], n4.points[p]) &&
                      not_worse(n4.points[p], rnd.points[p]);
    ok = ok && here;
    if (!here) detail += fmt(" violated at P1=%g dB;", opt.points[p].snr_db);
  }
  const std::size_t last = opt.points.size() - 1;
  return {ok, fmt("%llux%llu, P1 0..12 dB: at %g dB BER %.2e <= %.2e <= %.2e <= %.2e",
                  static_cast<unsigned long long>(c.sim.intervals),
                  static_cast<unsigned long long>(c.sim.symbols), opt.points[last].snr_db,
                  opt.points[last].ber, n8.points[last].ber, n4.points[last].ber,
                  rnd.points[last].ber) + detail};
}

Outcome fig9_fig10() {
  bool ok = true;
  std::string detail;
  for (const char* name : {"fig9.ini", "fig10.ini"}) {
    const ScenarioConfig c = load_scenario(config_path(name));
    const std::vector<BerCurve> curves = simulate_ber(c.sim, build_codebook_library(c));
    const BerCurve& mmse = curve_named(curves, "mmse_baseline");
    double worst_ratio = 0.0;
    int beat = 0, points = 0;
    for (int n : {8, 16}) {
      const BerCurve& prop = curve_named(curves, "properly_quantized_dl[N=" + std::to_string(n) + "]");
      const BerCurve& mod = curve_named(curves, "modified_quantized_dl[N=" + std::to_string(n) + "]");
      for (std::size_t p = 0; p < prop.points.size(); ++p) {
        worst_ratio = std::max(worst_ratio, mod.points[p].ber / prop.points[p].ber);
        if (n == 16) {
          ++points;
          beat += prop.points[p].ber < mmse.points[p].ber && mod.points[p].ber < mmse.points[p].ber;
        }
      }
    }
    const bool here = worst_ratio <= 1.5 && beat >= 0.8 * points;
    ok = ok && here;
    detail += fmt("%s%s: modified/properly <= %.3f, both beat MMSE at %d/%d points",
                  detail.empty() ? "" : "; ", c.name.c_str(), worst_ratio, beat, points);
  }
  return {ok, detail};
}

Outcome lemma_fuzz() {
  const std::size_t draws = 100000;
  std::atomic<std::size_t> l1{0}, r1{0}, ov{0}, l3{0}, l6{0}, eq12{0};
  parallel_for(draws, [&](std::size_t i) {
    RngStream rng(9009, i);
    const double s = std::exp(8 * rng.uniform() - 4);
    l1 += !lemma1_check(s * rng.uniform(), s * rng.uniform(), s * rng.uniform(), s * rng.uniform());
    r1 += !ratio_difference_check(s * rng.uniform(), s * rng.uniform(), std::exp(6 * rng.uniform() - 3));
    const int dim = 2 + static_cast<int>(rng.uniform() * 3);
    const ComplexVector u = sample_unit_vector(rng, dim), v = sample_unit_vector(rng, dim),
                        w = sample_unit_vector(rng, dim);
    ov += !overlap_difference_check(u, v, w);
    const ComplexMatrix h = sample_complex_gaussian_matrix(rng, 1 + static_cast<int>(rng.uniform() * 4), dim);
    const Codebook c = generate_random_codebook(rng, dim, 4);
    l3 += !lemma3_check(h, u, c);
    l6 += !lemma6_check(h, v);
    RealVector sigma(dim);
    const ComplexVector x = s * sample_complex_gaussian_matrix(rng, dim, 1).col(0);
    const ComplexVector y = s * sample_complex_gaussian_matrix(rng, dim, 1).col(0);
    double power = 0.0;
    for (int k = 0; k < dim; ++k) {
      sigma[k] = rng.uniform();
      power += sigma[k] * sigma[k] * (std::norm(x[k]) + 1.0);
    }
    sigma /= std::sqrt(power);
    eq12 += !(fixed_relay_snr(x, sigma, y) <= fixed_relay_snr_bound(x.norm(), y.norm()) * (1 + 1e-12));
  });
  const std::size_t total = l1 + r1 + ov + l3 + l6 + eq12;
  return {total == 0,
          fmt("violations over %zu draws each: lemma1 %zu, ratio %zu, overlap %zu, lemma3 %zu, "
              "lemma6 %zu, fixed-relay %zu",
              draws, l1.load(), r1.load(), ov.load(), l3.load(), l6.load(), eq12.load())};
}

Outcome determinism() {
  ScenarioConfig c = load_scenario(config_path("fig9.ini"));
  c.sim.intervals = 300;
  c.bound_samples = 200;
  const fs::path base = fs::temp_directory_path() / "grassrelay_acceptance";
  fs::remove_all(base);
  std::ostringstream log, err;
  std::vector<fs::path> dirs;
  for (const char* threads : {"", "", "1"}) {
    c.output_dir = base / ("run" + std::to_string(dirs.size()));
    if (*threads) setenv("GRASSRELAY_THREADS", threads, 1);
    const int status = run_scenario(c, ScenarioMode::full, log, err);
    if (*threads) unsetenv("GRASSRELAY_THREADS");
    if (status != 0) return {false, "run failed: " + err.str()};
    dirs.push_back(c.output_dir);
  }
  bool ok = true;
  for (const char* f : {"ber.csv", "bounds.csv", "manifest.json"})
    for (std::size_t k = 1; k < dirs.size(); ++k)
      ok = ok && slurp(dirs[0] / f) == slurp(dirs[k] / f) && !slurp(dirs[0] / f).empty();
  const std::string hash = git_blob_hash(slurp(dirs[0] / "ber.csv"));
  fs::remove_all(base);
  return {ok, "fig9 scenario three times (last on one thread): ber.csv, bounds.csv, manifest.json "
              "byte-identical, ber.csv blob " + hash.substr(0, 12)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"feedback bit accounting (Table I)", table_one},
      {"strongest-mode gap constant 1.24 dB", gap_constant},
      {"mean channel energy E{sum sigma^2} = pq", mean_energy},
      {"rank-one relay optimality oracle", rank_one_optimality},
      {"SNR-loss bound suites", bound_suites},
      {"isotropy of the optimal Tx vector", isotropy},
      {"fig6 BER ordering", fig6_ordering},
      {"fig9/fig10 modified vs properly quantized vs MMSE", fig9_fig10},
      {"lemma fuzz suites", lemma_fuzz},
      {"determinism of scenario outputs", determinism},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k + 1);
    if (!wanted.empty() && !wanted.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !o.passed;
    std::cout << (o.passed ? "PASS" : "FAIL") << " criterion " << id << " " << criteria[k].first
              << ": " << o.detail << " [" << fmt("%.1f", secs) << " s]" << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
