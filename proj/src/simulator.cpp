#include "grassrelay/simulator.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <stdexcept>

#include "grassrelay/parallel.hpp"

namespace grassrelay {

namespace {

struct SchemeName {
  SchemeId id;
  std::string_view name;
};

constexpr std::array<SchemeName, 10> kSchemeNames{{
    {SchemeId::optimal_no_dl, "optimal_no_dl"},
    {SchemeId::quantized_no_dl, "quantized_no_dl"},
    {SchemeId::optimal_dl, "optimal_dl"},
    {SchemeId::modified_unquantized_dl, "modified_unquantized_dl"},
    {SchemeId::properly_quantized_dl, "properly_quantized_dl"},
    {SchemeId::modified_quantized_dl, "modified_quantized_dl"},
    {SchemeId::ignore_direct, "ignore_direct"},
    {SchemeId::switch_stronger, "switch_stronger"},
    {SchemeId::mmse_baseline, "mmse_baseline"},
    {SchemeId::random_codebook_baseline, "random_codebook_baseline"},
}};

int exact_log2(int size, const char* what) {
  if (size < 1 || !std::has_single_bit(static_cast<unsigned>(size)))
    throw std::invalid_argument(std::string(what) + " = " + std::to_string(size) +
                                " is not a power of two");
  return std::countr_zero(static_cast<unsigned>(size));
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

FeedbackBudget budget_for(const SchemeSpec& spec, const SimulationConfig& config) {
  FeedbackBudget budget;
  const int n = std::max(1, spec.codebook_size);
  budget.n0 = budget.n1 = budget.n2 = n;
  budget.b = config.feedback_b;
  budget.r0 = std::min(config.dims.l, config.dims.m);
  return budget;
}

}  // namespace

std::string_view to_string(SchemeId id) {
  for (const SchemeName& s : kSchemeNames)
    if (s.id == id) return s.name;
  return "unknown";
}

std::optional<SchemeId> parse_scheme_id(std::string_view name) {
  for (const SchemeName& s : kSchemeNames)
    if (s.name == name) return s.id;
  return std::nullopt;
}

const std::vector<SchemeId>& all_scheme_ids() {
  static const std::vector<SchemeId> ids = [] {
    std::vector<SchemeId> out;
    for (const SchemeName& s : kSchemeNames) out.push_back(s.id);
    return out;
  }();
  return ids;
}

bool requires_direct(SchemeId id) {
  switch (id) {
    case SchemeId::optimal_dl:
    case SchemeId::modified_unquantized_dl:
    case SchemeId::properly_quantized_dl:
    case SchemeId::modified_quantized_dl:
    case SchemeId::ignore_direct:
    case SchemeId::switch_stronger:
      return true;
    default:
      return false;
  }
}

bool uses_codebooks(SchemeId id) {
  switch (id) {
    case SchemeId::quantized_no_dl:
    case SchemeId::properly_quantized_dl:
    case SchemeId::modified_quantized_dl:
    case SchemeId::random_codebook_baseline:
      return true;
    default:
      return false;
  }
}

std::string SchemeSpec::label() const {
  std::string out(to_string(id));
  if (uses_codebooks(id)) out += "[N=" + std::to_string(codebook_size) + "]";
  return out;
}

SchemeSpec SchemeSpec::parse(std::string_view label) {
  SchemeSpec spec;
  std::string_view name = label;
  const auto bracket = label.find('[');
  if (bracket != std::string_view::npos) {
    name = label.substr(0, bracket);
    std::string_view rest = label.substr(bracket + 1);
    if (rest.size() < 4 || rest.substr(0, 2) != "N=" || rest.back() != ']')
      throw std::invalid_argument("bad scheme label '" + std::string(label) +
                                  "' (expected name[N=size])");
    const std::string digits(rest.substr(2, rest.size() - 3));
    std::size_t used = 0;
    int size = 0;
    try {
      size = std::stoi(digits, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != digits.size() || digits.empty())
      throw std::invalid_argument("bad codebook size in scheme label '" + std::string(label) + "'");
    spec.codebook_size = size;
  }
  const auto id = parse_scheme_id(name);
  if (!id) throw std::invalid_argument("unknown scheme '" + std::string(name) + "'");
  spec.id = *id;
  if (uses_codebooks(spec.id) && bracket == std::string_view::npos)
    throw std::invalid_argument("scheme '" + std::string(name) + "' needs a codebook size, e.g. " +
                                std::string(name) + "[N=8]");
  if (!uses_codebooks(spec.id) && bracket != std::string_view::npos)
    throw std::invalid_argument("scheme '" + std::string(name) + "' takes no codebook size");
  return spec;
}

void FeedbackBudget::validate() const {
  if (n0 < 1 || n1 < 1 || n2 < 1 || r0 < 1)
    throw std::invalid_argument("feedback budget: codebook sizes and R0 must be >= 1");
  if (b < 0) throw std::invalid_argument("feedback budget: b must be >= 0");
}

int feedback_bits(SchemeId id, const FeedbackBudget& budget, const SystemDims& dims,
                  bool direct_link) {
  budget.validate();
  const int m = dims.m, n = dims.n, l = dims.l;
  const auto properly = [&] {
    return (1 + budget.r0) * budget.b + budget.r0 * exact_log2(budget.n0, "N0") +
           exact_log2(budget.n1, "N1") + exact_log2(budget.n2, "N2");
  };
  const auto no_direct = [&] { return exact_log2(budget.n1, "N1") + exact_log2(budget.n2, "N2"); };
  switch (id) {
    case SchemeId::quantized_no_dl:
      return no_direct();
    case SchemeId::properly_quantized_dl:
      return properly();
    case SchemeId::modified_quantized_dl:
      return 2 * budget.b + exact_log2(budget.n0, "N0") + exact_log2(budget.n1, "N1") +
             exact_log2(budget.n2, "N2");
    case SchemeId::mmse_baseline:
      return direct_link ? 2 * (m * n + m * l + l * n) + budget.b : 2 * (m * n + n * l);
    case SchemeId::random_codebook_baseline:
      return direct_link ? properly() : no_direct();
    default:
      return 0;
  }
}

// ---------------------------------------------------------------------------

double EffectiveLink::combined_snr() const {
  return std::norm(h0) / noise0 + std::norm(hr) / noise_r;
}

EffectiveLink effective_link(const ChannelSet& ch, const BeamformingSolution& sol) {
  EffectiveLink link;
  const ComplexMatrix w = sol.relay_matrix();
  const ComplexVector relay_in = std::sqrt(ch.gains.p1) * (ch.h1 * sol.tx);
  const ComplexVector to_rx = std::sqrt(ch.gains.p2) * (w.adjoint() * (ch.h2.adjoint() * sol.rx));
  link.hr = to_rx.dot(relay_in);
  link.noise_r = sol.rx.squaredNorm() + to_rx.squaredNorm();
  if (sol.direct_rx && ch.h0) {
    link.h0 = std::sqrt(ch.gains.p0) * sol.direct_rx->dot(*ch.h0 * sol.tx);
    link.noise0 = sol.direct_rx->squaredNorm();
  }
  return link;
}

Complex combine_two_slots(Complex y0, Complex y1, const EffectiveLink& link) {
  if (!(link.noise0 > 0.0) || !(link.noise_r > 0.0))
    throw std::domain_error("combine_two_slots: noise variances must be > 0");
  return std::conj(link.h0) / link.noise0 * y0 + std::conj(link.hr) / link.noise_r * y1;
}

IntervalNoise draw_interval_noise(RngStream& rng, const SystemDims& dims, std::size_t symbols) {
  IntervalNoise noise;
  const auto cols = static_cast<Eigen::Index>(symbols);
  noise.symbols.resize(symbols);
  noise.relay.resize(dims.n, cols);
  noise.direct.resize(dims.l, cols);
  noise.rx.resize(dims.l, cols);
  for (Eigen::Index k = 0; k < cols; ++k) {
    noise.symbols[static_cast<std::size_t>(k)] = (rng() >> 63) ? 1 : -1;
    for (Eigen::Index i = 0; i < dims.n; ++i) noise.relay(i, k) = rng.complex_gaussian();
    for (Eigen::Index i = 0; i < dims.l; ++i) noise.direct(i, k) = rng.complex_gaussian();
    for (Eigen::Index i = 0; i < dims.l; ++i) noise.rx(i, k) = rng.complex_gaussian();
  }
  return noise;
}

std::vector<Complex> soft_outputs(const ChannelSet& ch, const BeamformingSolution& sol,
                                  const IntervalNoise& noise) {
  const auto count = static_cast<Eigen::Index>(noise.symbols.size());
  Eigen::RowVectorXcd x(count);
  for (Eigen::Index k = 0; k < count; ++k) x[k] = noise.symbols[static_cast<std::size_t>(k)];

  // Slot 1 at the relay, relay amplification, slot 2 at the Rx.
  const ComplexMatrix at_relay = std::sqrt(ch.gains.p1) * (ch.h1 * sol.tx) * x + noise.relay;
  const ComplexMatrix at_rx =
      std::sqrt(ch.gains.p2) * (ch.h2 * (sol.relay_matrix() * at_relay)) + noise.rx;
  const Eigen::RowVectorXcd y1 = sol.rx.adjoint() * at_rx;

  Eigen::RowVectorXcd y0 = Eigen::RowVectorXcd::Zero(count);
  if (sol.direct_rx && ch.h0) {
    const ComplexMatrix direct = std::sqrt(ch.gains.p0) * (*ch.h0 * sol.tx) * x + noise.direct;
    y0 = sol.direct_rx->adjoint() * direct;
  }

  const EffectiveLink link = effective_link(ch, sol);
  std::vector<Complex> out(static_cast<std::size_t>(count));
  for (Eigen::Index k = 0; k < count; ++k)
    out[static_cast<std::size_t>(k)] = combine_two_slots(y0[k], y1[k], link);
  return out;
}

std::uint64_t count_bit_errors(const ChannelSet& ch, const BeamformingSolution& sol,
                               const IntervalNoise& noise) {
  const std::vector<Complex> soft = soft_outputs(ch, sol, noise);
  std::uint64_t errors = 0;
  for (std::size_t k = 0; k < soft.size(); ++k) {
    const int decided = soft[k].real() >= 0.0 ? 1 : -1;
    errors += decided != noise.symbols[k];
  }
  return errors;
}

double measured_combined_snr(const ChannelSet& ch, const BeamformingSolution& sol,
                             const IntervalNoise& noise) {
  const std::vector<Complex> soft = soft_outputs(ch, sol, noise);
  if (soft.size() < 2) throw std::invalid_argument("measured_combined_snr needs >= 2 symbols");
  Complex gain{0.0, 0.0};
  for (std::size_t k = 0; k < soft.size(); ++k) gain += soft[k] * double(noise.symbols[k]);
  gain /= static_cast<double>(soft.size());
  double noise_power = 0.0;
  for (std::size_t k = 0; k < soft.size(); ++k)
    noise_power += std::norm(soft[k] - gain * double(noise.symbols[k]));
  noise_power /= static_cast<double>(soft.size() - 1);
  return std::norm(gain) / noise_power;
}

// ---------------------------------------------------------------------------

std::string_view to_string(SweepLink link) {
  switch (link) {
    case SweepLink::p0: return "P0";
    case SweepLink::p1: return "P1";
    case SweepLink::p2: return "P2";
  }
  return "unknown";
}

std::optional<SweepLink> parse_sweep_link(std::string_view name) {
  if (name == "P0" || name == "p0") return SweepLink::p0;
  if (name == "P1" || name == "p1") return SweepLink::p1;
  if (name == "P2" || name == "p2") return SweepLink::p2;
  return std::nullopt;
}

const Codebook& CodebookLibrary::packing(int dim, int size) const {
  const auto it = grassmannian.find({dim, size});
  if (it == grassmannian.end())
    throw std::out_of_range("no codebook for dim " + std::to_string(dim) + ", N = " +
                            std::to_string(size));
  return it->second;
}

const Codebook& CodebookLibrary::random_book(int dim, int size, std::uint64_t interval) const {
  const auto it = random.find({dim, size});
  if (it == random.end() || it->second.empty())
    throw std::out_of_range("no random codebooks for dim " + std::to_string(dim) + ", N = " +
                            std::to_string(size));
  return it->second[interval % it->second.size()];
}

std::vector<std::pair<int, int>> required_codebooks(const std::vector<SchemeSpec>& schemes,
                                                    const SystemDims& dims) {
  std::set<std::pair<int, int>> out;
  for (const SchemeSpec& s : schemes) {
    if (!uses_codebooks(s.id)) continue;
    out.insert({dims.m, s.codebook_size});
    out.insert({dims.n, s.codebook_size});
  }
  return {out.begin(), out.end()};
}

bool needs_random_books(const std::vector<SchemeSpec>& schemes) {
  return std::any_of(schemes.begin(), schemes.end(), [](const SchemeSpec& s) {
    return s.id == SchemeId::random_codebook_baseline;
  });
}

void SimulationConfig::validate() const {
  dims.validate();
  if (schemes.empty()) throw std::invalid_argument("scheme list is empty");
  if (grid_db.empty()) throw std::invalid_argument("sweep grid is empty");
  for (std::size_t i = 0; i < grid_db.size(); ++i) {
    if (!std::isfinite(grid_db[i])) throw std::invalid_argument("sweep grid has a non-finite value");
    if (i > 0 && !(grid_db[i] > grid_db[i - 1]))
      throw std::invalid_argument("sweep grid must be strictly increasing");
  }
  if (!std::isfinite(p0_db) || !std::isfinite(p1_db) || !std::isfinite(p2_db))
    throw std::invalid_argument("link SNRs must be finite");
  if (intervals < 1 || symbols < 1)
    throw std::invalid_argument("need >= 1 interval and >= 1 symbol per interval");
  if (sweep == SweepLink::p0 && !direct_link)
    throw std::invalid_argument("cannot sweep P0 without a direct link");
  if (feedback_b < 0) throw std::invalid_argument("feedback bits per scalar must be >= 0");
  if (mmse_bits < 1 || mmse_bits > 8) throw std::invalid_argument("mmse bits must be in [1, 8]");
  std::set<std::string> labels;
  for (const SchemeSpec& s : schemes) {
    if (requires_direct(s.id) && !direct_link)
      throw std::invalid_argument("scheme " + s.label() + " needs the direct link");
    if (uses_codebooks(s.id)) {
      if (s.codebook_size < 2)
        throw std::invalid_argument("scheme " + s.label() + " needs a codebook size >= 2");
      exact_log2(s.codebook_size, "codebook size");
      if (std::min(dims.m, dims.n) < 2)
        throw std::invalid_argument("codebook schemes need m, n >= 2");
    }
    if (!labels.insert(s.label()).second)
      throw std::invalid_argument("scheme " + s.label() + " listed twice");
  }
}

LinkGains SimulationConfig::gains_at(double swept_db) const {
  double p0 = p0_db, p1 = p1_db, p2 = p2_db;
  switch (sweep) {
    case SweepLink::p0: p0 = swept_db; break;
    case SweepLink::p1: p1 = swept_db; break;
    case SweepLink::p2: p2 = swept_db; break;
  }
  LinkGains g = LinkGains::from_db(p0, p1, p2);
  if (!direct_link) g.p0 = 0.0;
  return g;
}

std::string config_fingerprint(const SimulationConfig& config, const CodebookLibrary& books) {
  std::ostringstream text;
  text << "seed=" << config.seed << ";dims=" << config.dims.m << "," << config.dims.n << ","
       << config.dims.l << ";direct=" << config.direct_link << ";p=" << format_double(config.p0_db)
       << "," << format_double(config.p1_db) << "," << format_double(config.p2_db)
       << ";sweep=" << to_string(config.sweep) << ";grid=";
  for (double g : config.grid_db) text << format_double(g) << ",";
  text << ";schedule=" << config.intervals << "x" << config.symbols << ";b=" << config.feedback_b
       << ";mmse_bits=" << config.mmse_bits << ";ascent=" << config.ascent.restarts << ","
       << format_double(config.ascent.tol) << "," << config.ascent.max_iterations << ","
       << config.ascent.seed << ";books=";
  for (const auto& [key, book] : books.grassmannian) text << book.fingerprint() << ",";
  for (const auto& [key, list] : books.random)
    for (const Codebook& book : list) text << book.fingerprint() << ",";
  return hex64(fnv1a(text.str()));
}

BeamformingSolution solve_scheme(const SchemeSpec& scheme, const ChannelSet& ch,
                                 const CodebookLibrary& books, std::uint64_t interval,
                                 int mmse_bits, const AscentOptions& ascent) {
  const int m = ch.dims.m, n = ch.dims.n, size = scheme.codebook_size;
  switch (scheme.id) {
    case SchemeId::optimal_no_dl:
      return optimal_no_direct(ch);
    case SchemeId::quantized_no_dl:
      return quantized_no_direct(ch, books.packing(m, size), books.packing(n, size));
    case SchemeId::optimal_dl:
      return optimal_with_direct(ch, ascent);
    case SchemeId::modified_unquantized_dl:
      return modified_unquantized_with_direct(ch, ascent);
    case SchemeId::properly_quantized_dl:
      return properly_quantized_with_direct(ch, books.packing(m, size), books.packing(m, size),
                                            books.packing(n, size),
                                            DirectLinkMode::quantized_singulars);
    case SchemeId::modified_quantized_dl:
      return modified_quantized_with_direct(ch, books.packing(m, size), books.packing(m, size),
                                            books.packing(n, size));
    case SchemeId::ignore_direct:
      return baseline_ignore_direct(ch);
    case SchemeId::switch_stronger:
      return baseline_switch_stronger(ch);
    case SchemeId::mmse_baseline:
      return baseline_mmse_quantizer(ch, mmse_bits, ascent);
    case SchemeId::random_codebook_baseline: {
      const Codebook& c1 = books.random_book(m, size, interval);
      const Codebook& c2 = books.random_book(n, size, interval);
      if (ch.has_direct())
        return properly_quantized_with_direct(ch, c1, c1, c2, DirectLinkMode::quantized_singulars);
      return quantized_no_direct(ch, c1, c2);
    }
  }
  throw std::logic_error("unhandled scheme");
}

std::vector<BerCurve> simulate_ber(const SimulationConfig& config, const CodebookLibrary& books) {
  config.validate();
  const CoherenceSchedule schedule(config.intervals, config.symbols);
  const std::size_t schemes = config.schemes.size();
  const std::size_t points = config.grid_db.size();
  std::vector<LinkGains> gains;
  for (double db : config.grid_db) gains.push_back(config.gains_at(db));

  // errors[(interval * points + p) * schemes + k]
  std::vector<std::uint32_t> errors(config.intervals * points * schemes, 0);
  parallel_for(config.intervals, [&](std::size_t interval) {
    RngStream channel_rng = schedule.channel_stream(config.seed, interval);
    const ChannelSet base =
        sample_channel_set(channel_rng, config.dims, gains.front(), config.direct_link);
    RngStream noise_rng = schedule.noise_stream(config.seed, interval);
    const IntervalNoise noise = draw_interval_noise(noise_rng, config.dims, config.symbols);
    for (std::size_t p = 0; p < points; ++p) {
      const ChannelSet ch = base.with_gains(gains[p]);
      for (std::size_t k = 0; k < schemes; ++k) {
        const BeamformingSolution sol =
            solve_scheme(config.schemes[k], ch, books, interval, config.mmse_bits, config.ascent);
        errors[(interval * points + p) * schemes + k] =
            static_cast<std::uint32_t>(count_bit_errors(ch, sol, noise));
      }
    }
  });

  const std::string fingerprint = config_fingerprint(config, books);
  std::vector<BerCurve> curves;
  for (std::size_t k = 0; k < schemes; ++k) {
    BerCurve curve;
    curve.scheme = config.schemes[k];
    curve.sweep = config.sweep;
    curve.fingerprint = fingerprint;
    curve.feedback_bits = feedback_bits(curve.scheme.id, budget_for(curve.scheme, config),
                                        config.dims, config.direct_link);
    for (std::size_t p = 0; p < points; ++p) {
      BerPoint point;
      point.snr_db = config.grid_db[p];
      for (std::size_t i = 0; i < config.intervals; ++i)
        point.bit_errors += errors[(i * points + p) * schemes + k];
      point.bits_sent = schedule.total_symbols();
      point.ber = static_cast<double>(point.bit_errors) / static_cast<double>(point.bits_sent);
      point.standard_error =
          std::sqrt(point.ber * (1.0 - point.ber) / static_cast<double>(point.bits_sent));
      curve.points.push_back(point);
    }
    curves.push_back(std::move(curve));
  }
  return curves;
}

void write_ber_csv(std::ostream& out, const std::vector<BerCurve>& curves, std::uint64_t seed) {
  out << "scheme,sweep_var,snr_db,bit_errors,bits_sent,ber,stderr,feedback_bits,seed\n";
  char buf[64];
  for (const BerCurve& curve : curves) {
    for (const BerPoint& p : curve.points) {
      out << curve.scheme.label() << ',' << to_string(curve.sweep) << ',' << format_double(p.snr_db)
          << ',' << p.bit_errors << ',' << p.bits_sent << ',';
      std::snprintf(buf, sizeof buf, "%.9e,%.9e", p.ber, p.standard_error);
      out << buf << ',' << curve.feedback_bits << ',' << seed << '\n';
    }
  }
}

}  // namespace grassrelay
