#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <swiptrelay/detail/sha1.hpp>
#include <swiptrelay/experiment.hpp>
#include <swiptrelay/summarize.hpp>

using namespace swiptrelay;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path temp_dir(const std::string& leaf) {
  const auto dir = std::filesystem::temp_directory_path() / "swiptrelay_tests" / leaf;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

ExperimentSpec tiny_spec() {
  ExperimentSpec spec;
  spec.d_values = {1.0};
  spec.snr_grid_db = {5.0};
  spec.protocols = {Protocol::ps, Protocol::tma};
  spec.n_realizations = 3;
  spec.seed = 7;
  spec.channel.n_subcarriers = 4;
  spec.channel.tap_powers_db = {0.0, -10.0};
  spec.channel.tap_indices = {0, 1};
  spec.alpha_step = 0.05;
  spec.ellipsoid_tol = 1e-3;
  spec.output = "tiny.csv";
  return spec;
}

}  // namespace

TEST_CASE("hash primitives match the published test vectors") {
  REQUIRE(detail::sha1_hex("abc") == "a9993e364706816aba3e25717850c26c9cd0d89d");
  REQUIRE(detail::sha1_hex("") == "da39a3ee5e6b4b0d3255bfef95601890afd80709");
  REQUIRE(detail::sha1_hex(std::string(1000000, 'a')) ==
          "34aa973cd4c4daa4f61eeb2bdbad27316534016f");
  // Same digest `git hash-object` assigns to a blob with this content.
  REQUIRE(detail::git_blob_sha1("hello\n") ==
          "ce013625030ba8dba906f756967f9e9ca394464a");
}

TEST_CASE("protocol names round-trip") {
  REQUIRE(protocol_from_name("PS") == Protocol::ps);
  REQUIRE(protocol_from_name("ub-ps") == Protocol::ubps);
  REQUIRE(protocol_from_name("tma") == Protocol::tma);
  REQUIRE(protocol_from_name("Eps") == Protocol::eps);
  REQUIRE(protocol_from_name("ETM") == Protocol::etm);
  REQUIRE_THROWS_AS(protocol_from_name("bogus"), ConfigError);
  for (Protocol p : {Protocol::ps, Protocol::ubps, Protocol::eps, Protocol::tma,
                     Protocol::etm})
    REQUIRE(protocol_from_name(protocol_name(p)) == p);
}

TEST_CASE("config parsing") {
  SECTION("an empty object yields the defaults") {
    const ExperimentSpec spec = spec_from_json(nlohmann::json::object());
    REQUIRE(spec.sd_distance == 2.0);
    REQUIRE(spec.d_values == std::vector<double>{1.0});
    REQUIRE(spec.n_realizations == 1000);
    REQUIRE(spec.channel.n_subcarriers == 64);
    REQUIRE(spec.protocols.size() == 5);
  }
  SECTION("unknown keys are rejected") {
    REQUIRE_THROWS_AS(spec_from_json({{"snr_grid", {10.0}}}), ConfigError);
    REQUIRE_THROWS_AS(spec_from_json({{"channel", {{"taps", {0.0}}}}}), ConfigError);
  }
  SECTION("values survive a serialization round trip") {
    const ExperimentSpec spec = tiny_spec();
    const ExperimentSpec back = spec_from_json(spec_to_json(spec));
    REQUIRE(canonical_config(back) == canonical_config(spec));
  }
  SECTION("invalid values are rejected") {
    ExperimentSpec spec = tiny_spec();
    spec.n_realizations = 0;
    REQUIRE_THROWS_AS(spec.validate(), ConfigError);
    spec = tiny_spec();
    spec.alpha_step = 0.0;
    REQUIRE_THROWS_AS(spec.validate(), ConfigError);
    spec = tiny_spec();
    spec.d_values = {2.0};  // relay on top of the destination
    REQUIRE_THROWS_AS(spec.validate(), ConfigError);
  }
}

TEST_CASE("per-realization metrics") {
  SECTION("splitting fractions weight the ratio by source power") {
    const detail::RealizationMetrics m = detail::splitting_metrics(
        {1.0, 1.0}, {0.25, 0.25}, std::log(2.0), true, kDefaultPeakPower);
    REQUIRE(m.ok);
    REQUIRE(m.rate_bits == Catch::Approx(0.5).margin(1e-12));
    REQUIRE(m.frac_info == Catch::Approx(0.25).margin(1e-12));
    REQUIRE(m.frac_harvest == Catch::Approx(0.75).margin(1e-12));
    REQUIRE(m.pct_active == 100.0);
  }
  SECTION("mode fractions count assigned subcarriers") {
    TmaSolution sol;
    sol.y_c = {1, 0, 0, 0};
    sol.y_d = {0, 1, 1, 0};
    sol.p_sr = {2.0, 0.0, 0.0, 0.0};
    sol.p_sd = {0.0, 1.0, 1.0, 0.0};
    sol.p_r = {0.0, 0.0, 0.0, 0.0};
    sol.rate = 1.0;
    sol.converged = true;
    const detail::RealizationMetrics m = detail::mode_metrics(sol, kDefaultPeakPower);
    REQUIRE(m.frac_coop == Catch::Approx(0.5).margin(1e-12));
    REQUIRE(m.frac_direct == Catch::Approx(0.5).margin(1e-12));
    REQUIRE(m.pct_coop == 25.0);
    REQUIRE(m.pct_direct == 50.0);
    REQUIRE(m.pct_idle == 25.0);
  }
  SECTION("tiny powers do not count as active subcarriers") {
    const double pct = detail::active_pct({1e-15, 0.5, 0.0, 2.0}, kDefaultPeakPower);
    REQUIRE(pct == 50.0);
  }
}

TEST_CASE("experiment runs are deterministic") {
  const auto dir_a = temp_dir("det_a");
  const auto dir_b = temp_dir("det_b");
  const ExperimentSpec spec = tiny_spec();

  RunOptions opt;
  opt.jobs = 1;
  opt.out_dir = dir_a.string();
  const RunReport a = run_experiment(spec, opt);
  opt.out_dir = dir_b.string();
  const RunReport b = run_experiment(spec, opt);

  REQUIRE(a.rows.size() == 2);  // one row per protocol
  REQUIRE(a.total_excluded == 0);
  REQUIRE(slurp(a.csv_path) == slurp(b.csv_path));
}

TEST_CASE("worker count does not change the output") {
  const auto dir_a = temp_dir("jobs_1");
  const auto dir_b = temp_dir("jobs_2");
  const ExperimentSpec spec = tiny_spec();

  RunOptions opt;
  opt.jobs = 1;
  opt.out_dir = dir_a.string();
  const RunReport a = run_experiment(spec, opt);
  opt.jobs = 2;
  opt.out_dir = dir_b.string();
  const RunReport b = run_experiment(spec, opt);
  REQUIRE(slurp(a.csv_path) == slurp(b.csv_path));
}

TEST_CASE("seed override changes the embedded config") {
  const auto dir_a = temp_dir("seed_a");
  const auto dir_b = temp_dir("seed_b");
  const ExperimentSpec spec = tiny_spec();

  RunOptions opt;
  opt.jobs = 1;
  opt.out_dir = dir_a.string();
  const RunReport a = run_experiment(spec, opt);
  opt.seed_override = 9;
  opt.out_dir = dir_b.string();
  const RunReport b = run_experiment(spec, opt);

  const ParsedResults pa = parse_results_csv(a.csv_path);
  const ParsedResults pb = parse_results_csv(b.csv_path);
  REQUIRE(pa.config_sha1 != pb.config_sha1);
  REQUIRE(pa.config_line.find("\"seed\":7") != std::string::npos);
  REQUIRE(pb.config_line.find("\"seed\":9") != std::string::npos);
}

TEST_CASE("written results parse back and summarize") {
  const auto dir = temp_dir("roundtrip");
  const ExperimentSpec spec = tiny_spec();
  RunOptions opt;
  opt.jobs = 1;
  opt.out_dir = dir.string();
  const RunReport rep = run_experiment(spec, opt);

  const ParsedResults parsed = parse_results_csv(rep.csv_path);
  REQUIRE(parsed.rows.size() == rep.rows.size());
  REQUIRE(parsed.config_sha1 == detail::git_blob_sha1(parsed.config_line));
  for (std::size_t i = 0; i < parsed.rows.size(); ++i) {
    const ResultRow& p = parsed.rows[i];
    const ResultRow& r = rep.rows[i];
    REQUIRE(p.protocol == r.protocol);
    REQUIRE(p.d == r.d);
    REQUIRE(p.snr_db == r.snr_db);
    REQUIRE(p.n_included == r.n_included);
    REQUIRE(p.mean_rate_bits == Catch::Approx(r.mean_rate_bits).epsilon(1e-10));
    REQUIRE(p.mean_frac_info.has_value() == r.mean_frac_info.has_value());
    REQUIRE(p.mean_frac_coop.has_value() == r.mean_frac_coop.has_value());
  }

  // Reported fractions are proper and complementary.
  for (const ResultRow& r : parsed.rows) {
    if (r.mean_frac_info) {
      REQUIRE(*r.mean_frac_info >= 0.0);
      REQUIRE(*r.mean_frac_info <= 1.0);
      REQUIRE(*r.mean_frac_info + *r.mean_frac_harvest <= 1.0 + 1e-6);
    }
    if (r.mean_frac_coop) {
      REQUIRE(*r.mean_frac_coop >= 0.0);
      REQUIRE(*r.mean_frac_coop + *r.mean_frac_direct <= 1.0 + 1e-6);
      REQUIRE(*r.mean_pct_coop + *r.mean_pct_direct + *r.mean_pct_idle ==
              Catch::Approx(100.0).margin(1e-9));
    }
  }

  const SummarizeReport sum = summarize_results(rep.csv_path, (dir / "plots").string());
  REQUIRE(sum.files_written.size() == 8);  // 2 protocols x 4 figure kinds
  for (const std::string& f : sum.files_written) REQUIRE(std::filesystem::exists(f));
  REQUIRE(sum.table.find("PS") != std::string::npos);
  REQUIRE(sum.table.find("TMA") != std::string::npos);
}

TEST_CASE("malformed results are reported with line numbers") {
  const auto dir = temp_dir("malformed");

  SECTION("bad number") {
    const auto path = dir / "bad_number.csv";
    std::ofstream out(path);
    out << "# config_sha1 deadbeef\n# config {}\n" << kCsvHeader << "\n";
    out << "PS,1,10,5,0,not_a_number,0.5,0.5,,,,,,100\n";
    out.close();
    try {
      parse_results_csv(path.string());
      FAIL("expected a parse error");
    } catch (const ConfigError& e) {
      REQUIRE(std::string(e.what()).find(":4:") != std::string::npos);
    }
  }
  SECTION("wrong column count") {
    const auto path = dir / "short_row.csv";
    std::ofstream out(path);
    out << kCsvHeader << "\nPS,1,10\n";
    out.close();
    REQUIRE_THROWS_AS(parse_results_csv(path.string()), ConfigError);
  }
  SECTION("unexpected header") {
    const auto path = dir / "bad_header.csv";
    std::ofstream out(path);
    out << "protocol,d\nPS,1\n";
    out.close();
    REQUIRE_THROWS_AS(parse_results_csv(path.string()), ConfigError);
  }
  SECTION("missing file") {
    REQUIRE_THROWS_AS(parse_results_csv((dir / "nope.csv").string()), ConfigError);
  }
}
