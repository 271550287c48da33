#pragma once

// Monte Carlo harness: sweeps (relay position, SNR, protocol) over random
// channel realizations, averages per-protocol metrics, and writes a CSV
// whose header carries the fully resolved configuration and its content
// hash.  Realizations are independent work items; aggregation always runs
// in realization order, so the worker count never changes the output.

#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "baselines.hpp"
#include "channel.hpp"
#include "common.hpp"
#include "detail/sha1.hpp"
#include "ps.hpp"
#include "tma.hpp"
#include "ubps.hpp"

namespace swiptrelay {

enum class Protocol { ps, ubps, eps, tma, etm };

inline const char* protocol_name(Protocol p) {
  switch (p) {
    case Protocol::ps: return "PS";
    case Protocol::ubps: return "UBPS";
    case Protocol::eps: return "EPS";
    case Protocol::tma: return "TMA";
    case Protocol::etm: return "ETM";
  }
  return "?";
}

inline Protocol protocol_from_name(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (s == "PS") return Protocol::ps;
  if (s == "UBPS" || s == "UB-PS") return Protocol::ubps;
  if (s == "EPS") return Protocol::eps;
  if (s == "TMA") return Protocol::tma;
  if (s == "ETM") return Protocol::etm;
  throw ConfigError("config: unknown protocol '" + s + "'");
}

inline bool is_mode_adaptive(Protocol p) {
  return p == Protocol::tma || p == Protocol::etm;
}

struct ExperimentSpec {
  double sd_distance = 2.0;
  std::vector<double> d_values{1.0};
  std::vector<double> snr_grid_db{20.0};
  std::vector<Protocol> protocols{Protocol::ps, Protocol::ubps, Protocol::eps, Protocol::tma,
                                  Protocol::etm};
  int n_realizations = 1000;
  std::uint64_t seed = 1;
  ChannelParams channel{};
  double peak_power_db = 5.0;
  double alpha_step = 1e-3;
  TmaInnerSolver tma_inner = TmaInnerSolver::exact_per_subcarrier;
  EtmAssignment etm_assignment = EtmAssignment::largest_gain_coop;
  double ellipsoid_tol = 1e-5;
  long max_iter = 0;  // 0 keeps the solver default
  std::string output = "results.csv";

  void validate() const {
    if (n_realizations < 1) throw ConfigError("config: n_realizations must be >= 1");
    if (d_values.empty()) throw ConfigError("config: d_values must not be empty");
    for (double d : d_values) Geometry{sd_distance, d}.validate();
    if (snr_grid_db.empty()) throw ConfigError("config: snr_grid_db must not be empty");
    for (double s : snr_grid_db)
      if (!std::isfinite(s)) throw ConfigError("config: snr values must be finite");
    if (!std::isfinite(peak_power_db)) throw ConfigError("config: peak_power_db must be finite");
    if (!(alpha_step > 0.0) || alpha_step > 1.0)
      throw ConfigError("config: alpha_step must be in (0, 1]");
    if (!(ellipsoid_tol > 0.0)) throw ConfigError("config: ellipsoid_tol must be > 0");
    if (max_iter < 0) throw ConfigError("config: max_iter must be >= 0");
    if (output.empty()) throw ConfigError("config: output must not be empty");
    channel.validate();
  }
};

namespace detail {

inline void check_known_keys(const nlohmann::json& j,
                             std::initializer_list<const char*> allowed, const char* where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) known = true;
    if (!known)
      throw ConfigError(std::string("config: unknown key '") + it.key() + "' in " + where);
  }
}

}  // namespace detail

inline ExperimentSpec spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  detail::check_known_keys(
      j,
      {"sd_distance", "d_values", "snr_grid_db", "protocols", "n_realizations", "seed",
       "channel", "peak_power_db", "alpha_step", "tma_inner", "etm_assignment", "ellipsoid_tol",
       "max_iter", "output"},
      "top level");

  ExperimentSpec spec;
  spec.sd_distance = j.value("sd_distance", spec.sd_distance);
  if (j.contains("d_values")) spec.d_values = j.at("d_values").get<std::vector<double>>();
  if (j.contains("snr_grid_db"))
    spec.snr_grid_db = j.at("snr_grid_db").get<std::vector<double>>();
  if (j.contains("protocols")) {
    spec.protocols.clear();
    for (const auto& name : j.at("protocols"))
      spec.protocols.push_back(protocol_from_name(name.get<std::string>()));
  }
  spec.n_realizations = j.value("n_realizations", spec.n_realizations);
  spec.seed = j.value("seed", spec.seed);

  if (j.contains("channel")) {
    const nlohmann::json& c = j.at("channel");
    detail::check_known_keys(
        c, {"n_subcarriers", "pathloss_exponent", "shadowing_sigma_db", "tap_powers_db",
            "tap_indices"},
        "channel");
    spec.channel.n_subcarriers = c.value("n_subcarriers", spec.channel.n_subcarriers);
    spec.channel.pathloss_exponent =
        c.value("pathloss_exponent", spec.channel.pathloss_exponent);
    spec.channel.shadowing_sigma_db =
        c.value("shadowing_sigma_db", spec.channel.shadowing_sigma_db);
    if (c.contains("tap_powers_db"))
      spec.channel.tap_powers_db = c.at("tap_powers_db").get<std::vector<double>>();
    if (c.contains("tap_indices"))
      spec.channel.tap_indices = c.at("tap_indices").get<std::vector<int>>();
  }

  spec.peak_power_db = j.value("peak_power_db", spec.peak_power_db);
  spec.alpha_step = j.value("alpha_step", spec.alpha_step);
  if (j.contains("tma_inner")) {
    const std::string v = j.at("tma_inner").get<std::string>();
    if (v == "exact" || v == "exact_per_subcarrier")
      spec.tma_inner = TmaInnerSolver::exact_per_subcarrier;
    else if (v == "paper" || v == "paper_closed_form")
      spec.tma_inner = TmaInnerSolver::paper_closed_form;
    else
      throw ConfigError("config: tma_inner must be 'exact_per_subcarrier' or "
                        "'paper_closed_form'");
  }
  if (j.contains("etm_assignment")) {
    const std::string v = j.at("etm_assignment").get<std::string>();
    if (v == "largest_gain" || v == "largest_gain_coop")
      spec.etm_assignment = EtmAssignment::largest_gain_coop;
    else if (v == "first_half" || v == "first_half_coop")
      spec.etm_assignment = EtmAssignment::first_half_coop;
    else
      throw ConfigError("config: etm_assignment must be 'largest_gain_coop' or "
                        "'first_half_coop'");
  }
  spec.ellipsoid_tol = j.value("ellipsoid_tol", spec.ellipsoid_tol);
  spec.max_iter = j.value("max_iter", spec.max_iter);
  spec.output = j.value("output", spec.output);
  spec.validate();
  return spec;
}

inline nlohmann::json spec_to_json(const ExperimentSpec& spec) {
  nlohmann::json protocols = nlohmann::json::array();
  for (Protocol p : spec.protocols) protocols.push_back(protocol_name(p));
  return nlohmann::json{
      {"sd_distance", spec.sd_distance},
      {"d_values", spec.d_values},
      {"snr_grid_db", spec.snr_grid_db},
      {"protocols", protocols},
      {"n_realizations", spec.n_realizations},
      {"seed", spec.seed},
      {"channel",
       {{"n_subcarriers", spec.channel.n_subcarriers},
        {"pathloss_exponent", spec.channel.pathloss_exponent},
        {"shadowing_sigma_db", spec.channel.shadowing_sigma_db},
        {"tap_powers_db", spec.channel.tap_powers_db},
        {"tap_indices", spec.channel.tap_indices}}},
      {"peak_power_db", spec.peak_power_db},
      {"alpha_step", spec.alpha_step},
      {"tma_inner", spec.tma_inner == TmaInnerSolver::exact_per_subcarrier
                        ? "exact_per_subcarrier"
                        : "paper_closed_form"},
      {"etm_assignment", spec.etm_assignment == EtmAssignment::largest_gain_coop
                             ? "largest_gain_coop"
                             : "first_half_coop"},
      {"ellipsoid_tol", spec.ellipsoid_tol},
      {"max_iter", spec.max_iter},
      {"output", spec.output}};
}

inline ExperimentSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config: " + path + ": " + e.what());
  }
  return spec_from_json(j);
}

// Single-line resolved form; its git-style blob hash identifies the run.
inline std::string canonical_config(const ExperimentSpec& spec) {
  return spec_to_json(spec).dump();
}

struct ResultRow {
  Protocol protocol = Protocol::ps;
  double d = 0.0;
  double snr_db = 0.0;
  int n_included = 0;
  int n_excluded = 0;
  double mean_rate_bits = 0.0;  // bits per two-slot frame per subcarrier
  std::optional<double> mean_frac_info, mean_frac_harvest;   // splitting protocols
  std::optional<double> mean_frac_coop, mean_frac_direct;    // mode protocols
  std::optional<double> mean_pct_coop, mean_pct_direct, mean_pct_idle;
  std::optional<double> mean_pct_active;
};

namespace detail {

struct RealizationMetrics {
  bool ok = false;
  double rate_bits = 0.0;
  double frac_info = 0.0, frac_harvest = 0.0;
  double frac_coop = 0.0, frac_direct = 0.0;
  double pct_coop = 0.0, pct_direct = 0.0, pct_idle = 0.0;
  double pct_active = 0.0;
};

inline double active_pct(const std::vector<double>& p, double peak) {
  if (p.empty()) return 0.0;
  const double eps = 1e-12 * std::max(1.0, peak);
  int used = 0;
  for (double v : p)
    if (v > eps) ++used;
  return 100.0 * used / static_cast<double>(p.size());
}

inline RealizationMetrics splitting_metrics(const std::vector<double>& p_s,
                                            const std::vector<double>& alpha, double rate,
                                            bool converged, double peak) {
  RealizationMetrics m;
  m.ok = converged && std::isfinite(rate);
  m.rate_bits = rate * kNatsToBits / static_cast<double>(p_s.size());
  double total = 0.0, info = 0.0;
  for (std::size_t i = 0; i < p_s.size(); ++i) {
    total += p_s[i];
    info += p_s[i] * alpha[i];
  }
  if (total > 0.0) {
    m.frac_info = info / total;
    m.frac_harvest = 1.0 - m.frac_info;
  }
  m.pct_active = active_pct(p_s, peak);
  return m;
}

inline RealizationMetrics mode_metrics(const TmaSolution& sol, double peak) {
  RealizationMetrics m;
  m.ok = sol.converged && std::isfinite(sol.rate);
  const int n = static_cast<int>(sol.y_c.size());
  m.rate_bits = sol.rate * kNatsToBits / static_cast<double>(n);
  double coop_power = 0.0, direct_power = 0.0;
  int n_coop = 0, n_direct = 0;
  for (int i = 0; i < n; ++i) {
    if (sol.y_c[i]) {
      coop_power += sol.p_sr[i];
      ++n_coop;
    } else if (sol.y_d[i]) {
      direct_power += sol.p_sd[i];
      ++n_direct;
    }
  }
  const double total = coop_power + direct_power;
  if (total > 0.0) {
    m.frac_coop = coop_power / total;
    m.frac_direct = direct_power / total;
  }
  m.pct_coop = 100.0 * n_coop / static_cast<double>(n);
  m.pct_direct = 100.0 * n_direct / static_cast<double>(n);
  m.pct_idle = 100.0 - m.pct_coop - m.pct_direct;
  (void)peak;
  return m;
}

inline RealizationMetrics evaluate_protocol(Protocol proto, const ChannelRealization& ch,
                                            const ExperimentSpec& spec, double total_power) {
  EllipsoidOptions eopt;
  eopt.tol = spec.ellipsoid_tol;
  eopt.max_iter = spec.max_iter;
  const double peak = db_to_linear(spec.peak_power_db);

  switch (proto) {
    case Protocol::ps:
    case Protocol::eps: {
      PsConfig cfg{total_power, peak, spec.alpha_step, eopt};
      const PsSolution sol = proto == Protocol::ps ? solve_ps(ch, cfg) : solve_eps(ch, cfg);
      const std::vector<double> alpha(ch.h.size(), sol.alpha);
      return splitting_metrics(sol.p_s, alpha, sol.rate, sol.converged, peak);
    }
    case Protocol::ubps: {
      PsConfig cfg{total_power, peak, spec.alpha_step, eopt};
      const UbPsSolution sol = solve_ubps(ch, cfg);
      return splitting_metrics(sol.p_s, sol.alpha, sol.rate, sol.converged, peak);
    }
    case Protocol::tma:
    case Protocol::etm: {
      TmaConfig cfg{total_power, peak, spec.tma_inner, eopt};
      const TmaSolution sol = proto == Protocol::tma
                                  ? solve_tma(ch, cfg)
                                  : solve_etm(ch, cfg, spec.etm_assignment);
      return mode_metrics(sol, peak);
    }
  }
  throw ConfigError("unreachable protocol");
}

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string format_cell(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string{};
}

}  // namespace detail

inline constexpr const char* kCsvHeader =
    "protocol,d,snr_db,n_realizations,n_excluded,mean_rate_bits,mean_frac_power_info,"
    "mean_frac_power_harvest,mean_frac_power_coop,mean_frac_power_direct,mean_pct_subc_coop,"
    "mean_pct_subc_direct,mean_pct_subc_idle,mean_pct_subc_active";

struct RunOptions {
  std::string out_dir;  // empty keeps spec.output as given
  int jobs = 0;         // 0 picks the hardware concurrency
  std::optional<std::uint64_t> seed_override;
  std::function<void(const ResultRow&)> on_row;
};

struct RunReport {
  std::string csv_path;
  std::vector<ResultRow> rows;
  long total_excluded = 0;
};

inline std::string render_csv(const ExperimentSpec& spec, const std::vector<ResultRow>& rows) {
  const std::string config = canonical_config(spec);
  std::string out;
  out += "# config_sha1 " + detail::git_blob_sha1(config) + "\n";
  out += "# config " + config + "\n";
  out += kCsvHeader;
  out += '\n';
  for (const ResultRow& r : rows) {
    out += protocol_name(r.protocol);
    out += ',' + detail::format_number(r.d);
    out += ',' + detail::format_number(r.snr_db);
    out += ',' + std::to_string(r.n_included);
    out += ',' + std::to_string(r.n_excluded);
    out += ',' + detail::format_number(r.mean_rate_bits);
    out += ',' + detail::format_cell(r.mean_frac_info);
    out += ',' + detail::format_cell(r.mean_frac_harvest);
    out += ',' + detail::format_cell(r.mean_frac_coop);
    out += ',' + detail::format_cell(r.mean_frac_direct);
    out += ',' + detail::format_cell(r.mean_pct_coop);
    out += ',' + detail::format_cell(r.mean_pct_direct);
    out += ',' + detail::format_cell(r.mean_pct_idle);
    out += ',' + detail::format_cell(r.mean_pct_active);
    out += '\n';
  }
  return out;
}

inline RunReport run_experiment(ExperimentSpec spec, const RunOptions& opt = {}) {
  if (opt.seed_override) spec.seed = *opt.seed_override;
  spec.validate();

  ChannelParams params = spec.channel;
  params.seed = spec.seed;
  const int n_protocols = static_cast<int>(spec.protocols.size());
  const int jobs = opt.jobs > 0 ? opt.jobs
                                : std::max(1, static_cast<int>(std::thread::hardware_concurrency()));

  RunReport report;
  for (double d : spec.d_values) {
    const Geometry geom{spec.sd_distance, d};
    for (double snr_db : spec.snr_grid_db) {
      const double total_power = db_to_linear(snr_db);

      std::vector<std::vector<detail::RealizationMetrics>> table(
          spec.n_realizations, std::vector<detail::RealizationMetrics>(n_protocols));
      auto work = [&](int r) {
        const ChannelRealization ch = generate(params, geom, r);
        for (int k = 0; k < n_protocols; ++k) {
          try {
            table[r][k] =
                detail::evaluate_protocol(spec.protocols[k], ch, spec, total_power);
          } catch (const std::exception&) {
            table[r][k].ok = false;
          }
        }
      };

      if (jobs <= 1 || spec.n_realizations == 1) {
        for (int r = 0; r < spec.n_realizations; ++r) work(r);
      } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        for (int t = 0; t < std::min(jobs, spec.n_realizations); ++t)
          pool.emplace_back([&] {
            for (int r = next.fetch_add(1); r < spec.n_realizations; r = next.fetch_add(1))
              work(r);
          });
        for (std::thread& t : pool) t.join();
      }

      for (int k = 0; k < n_protocols; ++k) {
        ResultRow row;
        row.protocol = spec.protocols[k];
        row.d = d;
        row.snr_db = snr_db;
        double rate = 0, fi = 0, fh = 0, fc = 0, fd = 0, pc = 0, pd = 0, pi = 0, pa = 0;
        for (int r = 0; r < spec.n_realizations; ++r) {
          const detail::RealizationMetrics& m = table[r][k];
          if (!m.ok) {
            ++row.n_excluded;
            continue;
          }
          ++row.n_included;
          rate += m.rate_bits;
          fi += m.frac_info;
          fh += m.frac_harvest;
          fc += m.frac_coop;
          fd += m.frac_direct;
          pc += m.pct_coop;
          pd += m.pct_direct;
          pi += m.pct_idle;
          pa += m.pct_active;
        }
        if (row.n_included > 0) {
          const double inv = 1.0 / row.n_included;
          row.mean_rate_bits = rate * inv;
          if (is_mode_adaptive(spec.protocols[k])) {
            row.mean_frac_coop = fc * inv;
            row.mean_frac_direct = fd * inv;
            row.mean_pct_coop = pc * inv;
            row.mean_pct_direct = pd * inv;
            row.mean_pct_idle = pi * inv;
          } else {
            row.mean_frac_info = fi * inv;
            row.mean_frac_harvest = fh * inv;
            row.mean_pct_active = pa * inv;
          }
        }
        report.total_excluded += row.n_excluded;
        if (opt.on_row) opt.on_row(row);
        report.rows.push_back(row);
      }
    }
  }

  std::filesystem::path out_path(spec.output);
  if (!opt.out_dir.empty() && !out_path.is_absolute())
    out_path = std::filesystem::path(opt.out_dir) / out_path;
  if (out_path.has_parent_path()) std::filesystem::create_directories(out_path.parent_path());
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw ConfigError("run: cannot write '" + out_path.string() + "'");
  out << render_csv(spec, report.rows);
  report.csv_path = out_path.string();
  return report;
}

}  // namespace swiptrelay
