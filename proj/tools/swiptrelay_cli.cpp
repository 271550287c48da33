// Command-line front end: Monte Carlo runs, result summaries, channel
// dumps, and a hidden solver-vs-oracle smoke check.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <swiptrelay/swiptrelay.hpp>

namespace {

int cmd_run(const std::string& config_path, const std::string& out_dir, int jobs,
            bool seed_set, std::uint64_t seed) {
  swiptrelay::ExperimentSpec spec = swiptrelay::load_spec(config_path);
  swiptrelay::RunOptions opt;
  opt.out_dir = out_dir;
  opt.jobs = jobs;
  if (seed_set) opt.seed_override = seed;
  opt.on_row = [](const swiptrelay::ResultRow& r) {
    std::printf("%-4s d=%-4g snr=%-5g dB  n=%d excl=%d  rate=%.6g bits\n",
                swiptrelay::protocol_name(r.protocol), r.d, r.snr_db, r.n_included,
                r.n_excluded, r.mean_rate_bits);
    std::fflush(stdout);
  };

  const swiptrelay::RunReport rep = swiptrelay::run_experiment(spec, opt);
  std::printf("wrote %s (%zu rows, %ld excluded realizations)\n", rep.csv_path.c_str(),
              rep.rows.size(), rep.total_excluded);
  return 0;
}

int cmd_summarize(const std::string& csv_path, std::string out_dir) {
  if (out_dir.empty()) {
    const auto parent = std::filesystem::path(csv_path).parent_path();
    out_dir = parent.empty() ? "." : parent.string();
  }
  const swiptrelay::SummarizeReport rep = swiptrelay::summarize_results(csv_path, out_dir);
  std::fputs(rep.table.c_str(), stdout);
  for (const std::string& f : rep.files_written) std::printf("wrote %s\n", f.c_str());
  return 0;
}

int cmd_dump_channel(const swiptrelay::ChannelParams& params, const swiptrelay::Geometry& geom,
                     int realization) {
  const swiptrelay::ChannelRealization ch = swiptrelay::generate(params, geom, realization);
  std::printf("n,h,g,f\n");
  for (int i = 0; i < ch.size(); ++i)
    std::printf("%d,%.12g,%.12g,%.12g\n", i, ch.h[i], ch.g[i], ch.f[i]);
  return 0;
}

int cmd_oracle_check(std::uint64_t seed, int instances, const std::vector<double>& snr_db) {
  swiptrelay::ChannelParams params;
  params.n_subcarriers = 2;
  params.tap_powers_db = {0.0};
  params.tap_indices = {0};
  params.seed = seed;
  const swiptrelay::Geometry geom{2.0, 1.0};

  swiptrelay::OracleOptions oracle_opt;
  oracle_opt.alpha_step = 1e-2;

  bool all_ok = true;
  for (int r = 0; r < instances; ++r) {
    const swiptrelay::ChannelRealization ch = swiptrelay::generate(params, geom, r);
    for (double snr : snr_db) {
      const double total = swiptrelay::db_to_linear(snr);

      swiptrelay::PsConfig ps_cfg;
      ps_cfg.total_power = total;
      ps_cfg.alpha_step = 1e-2;
      const double ps_rate = swiptrelay::solve_ps(ch, ps_cfg).rate;
      const double ps_ref = swiptrelay::ps_bruteforce(ch, ps_cfg, oracle_opt).rate;

      swiptrelay::TmaConfig tma_cfg;
      tma_cfg.total_power = total;
      const double tma_rate = swiptrelay::solve_tma(ch, tma_cfg).rate;
      const double tma_ref = swiptrelay::tma_bruteforce(ch, tma_cfg, oracle_opt).rate;

      const double ub_rate = swiptrelay::solve_ubps(ch, ps_cfg).rate;
      const double ub_ref = swiptrelay::ubps_bruteforce(ch, ps_cfg, oracle_opt).rate;

      const auto ratio = [](double got, double ref) { return ref > 0.0 ? got / ref : 1.0; };
      const double ps_q = ratio(ps_rate, ps_ref);
      const double tma_q = ratio(tma_rate, tma_ref);
      const bool ok = ps_q >= 0.97 && ps_q <= 1.005 && tma_q >= 0.97 && tma_q <= 1.005;
      all_ok = all_ok && ok;
      std::printf(
          "instance %d snr=%gdB  ps %.6g/%.6g (%.4f)  tma %.6g/%.6g (%.4f)  "
          "ubps %.6g/%.6g (%.4f)  %s\n",
          r, snr, ps_rate, ps_ref, ps_q, tma_rate, tma_ref, tma_q, ub_rate, ub_ref,
          ratio(ub_rate, ub_ref), ok ? "ok" : "MISMATCH");
    }
  }
  return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SWIPT OFDM relay resource allocation"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run a Monte Carlo experiment from a config file");
  std::string config_path, out_dir;
  int jobs = 0;
  std::uint64_t seed = 0;
  run->add_option("--config", config_path, "JSON experiment config")->required();
  auto* seed_opt = run->add_option("--seed", seed, "override the config seed");
  run->add_option("--out", out_dir, "directory for the output CSV");
  run->add_option("--jobs", jobs, "worker threads (default: hardware concurrency)");

  auto* summ = app.add_subcommand("summarize", "tabulate a results CSV and emit plot data");
  std::string in_csv, summ_out;
  summ->add_option("--in", in_csv, "results CSV from 'run'")->required();
  summ->add_option("--out", summ_out, "directory for plot data files (default: CSV's)");

  auto* dump = app.add_subcommand("dump-channel", "print one channel realization as CSV");
  swiptrelay::ChannelParams dump_params;
  double dump_d = 1.0, dump_sd = 2.0;
  int dump_realization = 0;
  dump->add_option("--n", dump_params.n_subcarriers, "subcarrier count");
  dump->add_option("--pathloss-exp", dump_params.pathloss_exponent, "path-loss exponent");
  dump->add_option("--sigma-db", dump_params.shadowing_sigma_db, "shadowing std dev (dB)");
  dump->add_option("--taps-db", dump_params.tap_powers_db, "tap powers (dB)");
  dump->add_option("--tap-indices", dump_params.tap_indices, "tap sample offsets");
  dump->add_option("--seed", dump_params.seed, "channel seed");
  dump->add_option("--d", dump_d, "source-relay distance");
  dump->add_option("--sd-distance", dump_sd, "source-destination distance");
  dump->add_option("--realization", dump_realization, "realization index");

  auto* check = app.add_subcommand("oracle-check", "compare solvers against brute force");
  check->group("");  // diagnostic, hidden from help
  std::uint64_t check_seed = 1;
  int check_instances = 3;
  std::vector<double> check_snr{0.0, 5.0, 10.0};
  check->add_option("--seed", check_seed, "channel seed");
  check->add_option("--instances", check_instances, "number of realizations");
  check->add_option("--snr-db", check_snr, "SNR grid (dB)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, out_dir, jobs, seed_opt->count() > 0, seed);
    if (summ->parsed()) return cmd_summarize(in_csv, summ_out);
    if (dump->parsed())
      return cmd_dump_channel(dump_params, swiptrelay::Geometry{dump_sd, dump_d},
                              dump_realization);
    if (check->parsed()) return cmd_oracle_check(check_seed, check_instances, check_snr);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
