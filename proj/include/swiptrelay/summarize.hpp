#pragma once

// Post-processing of result files: a human-readable table plus
// plot-ready two-column data files (one file per protocol per figure
// kind, gnuplot block format keyed by the swept variable).

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "common.hpp"
#include "experiment.hpp"

namespace swiptrelay {

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

inline double parse_csv_number(const std::string& s, const std::string& path, int line_no,
                               const char* col) {
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE)
    throw ConfigError(path + ":" + std::to_string(line_no) + ": malformed number in column " +
                      col);
  return v;
}

inline std::optional<double> parse_csv_optional(const std::string& s, const std::string& path,
                                                int line_no, const char* col) {
  if (s.empty()) return std::nullopt;
  return parse_csv_number(s, path, line_no, col);
}

}  // namespace detail

struct ParsedResults {
  std::string config_line;  // embedded resolved config, if present
  std::string config_sha1;
  std::vector<ResultRow> rows;
};

inline ParsedResults parse_results_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("summarize: cannot open '" + path + "'");

  ParsedResults res;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.rfind("# config_sha1 ", 0) == 0) res.config_sha1 = line.substr(14);
      if (line.rfind("# config ", 0) == 0) res.config_line = line.substr(9);
      continue;
    }
    if (!header_seen) {
      if (line != kCsvHeader)
        throw ConfigError(path + ":" + std::to_string(line_no) + ": unexpected header row");
      header_seen = true;
      continue;
    }

    const std::vector<std::string> f = detail::split_csv_line(line);
    if (f.size() != 14)
      throw ConfigError(path + ":" + std::to_string(line_no) + ": expected 14 fields, got " +
                        std::to_string(f.size()));
    ResultRow row;
    try {
      row.protocol = protocol_from_name(f[0]);
    } catch (const ConfigError&) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": unknown protocol '" + f[0] +
                        "'");
    }
    row.d = detail::parse_csv_number(f[1], path, line_no, "d");
    row.snr_db = detail::parse_csv_number(f[2], path, line_no, "snr_db");
    row.n_included =
        static_cast<int>(detail::parse_csv_number(f[3], path, line_no, "n_realizations"));
    row.n_excluded =
        static_cast<int>(detail::parse_csv_number(f[4], path, line_no, "n_excluded"));
    row.mean_rate_bits = detail::parse_csv_number(f[5], path, line_no, "mean_rate_bits");
    row.mean_frac_info = detail::parse_csv_optional(f[6], path, line_no, "mean_frac_power_info");
    row.mean_frac_harvest =
        detail::parse_csv_optional(f[7], path, line_no, "mean_frac_power_harvest");
    row.mean_frac_coop = detail::parse_csv_optional(f[8], path, line_no, "mean_frac_power_coop");
    row.mean_frac_direct =
        detail::parse_csv_optional(f[9], path, line_no, "mean_frac_power_direct");
    row.mean_pct_coop = detail::parse_csv_optional(f[10], path, line_no, "mean_pct_subc_coop");
    row.mean_pct_direct =
        detail::parse_csv_optional(f[11], path, line_no, "mean_pct_subc_direct");
    row.mean_pct_idle = detail::parse_csv_optional(f[12], path, line_no, "mean_pct_subc_idle");
    row.mean_pct_active =
        detail::parse_csv_optional(f[13], path, line_no, "mean_pct_subc_active");
    res.rows.push_back(row);
  }
  if (!header_seen && !res.rows.empty())
    throw ConfigError(path + ": missing header row");
  return res;
}

namespace detail {

inline std::string render_table(const std::vector<ResultRow>& rows) {
  const std::vector<std::string> headers = {
      "protocol",   "d",          "snr_db",    "n",         "excl",
      "rate_bits",  "frac_info",  "frac_harv", "frac_coop", "frac_dir",
      "pct_coop",   "pct_dir",    "pct_idle",  "pct_active"};
  std::vector<std::vector<std::string>> cells;
  for (const ResultRow& r : rows) {
    cells.push_back({protocol_name(r.protocol), format_number(r.d), format_number(r.snr_db),
                     std::to_string(r.n_included), std::to_string(r.n_excluded),
                     format_number(r.mean_rate_bits), format_cell(r.mean_frac_info),
                     format_cell(r.mean_frac_harvest), format_cell(r.mean_frac_coop),
                     format_cell(r.mean_frac_direct), format_cell(r.mean_pct_coop),
                     format_cell(r.mean_pct_direct), format_cell(r.mean_pct_idle),
                     format_cell(r.mean_pct_active)});
    for (std::string& c : cells.back())
      if (c.empty()) c = "-";
  }

  std::vector<std::size_t> width(headers.size());
  for (std::size_t c = 0; c < headers.size(); ++c) {
    width[c] = headers[c].size();
    for (const auto& row : cells) width[c] = std::max(width[c], row[c].size());
  }

  const auto emit = [&](const std::vector<std::string>& row, std::string& out) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) out += "  ";
      out.append(width[c] - row[c].size(), ' ');
      out += row[c];
    }
    out += '\n';
  };

  std::string out;
  emit(headers, out);
  for (const auto& row : cells) emit(row, out);
  return out;
}

// Fraction/percentage columns that apply to the protocol family, with
// their values for one row.
inline std::pair<std::string, std::vector<double>> fraction_columns(const ResultRow& r) {
  if (is_mode_adaptive(r.protocol)) {
    return {"frac_coop frac_direct pct_coop pct_direct pct_idle",
            {r.mean_frac_coop.value_or(0.0), r.mean_frac_direct.value_or(0.0),
             r.mean_pct_coop.value_or(0.0), r.mean_pct_direct.value_or(0.0),
             r.mean_pct_idle.value_or(0.0)}};
  }
  return {"frac_info frac_harvest pct_active",
          {r.mean_frac_info.value_or(0.0), r.mean_frac_harvest.value_or(0.0),
           r.mean_pct_active.value_or(0.0)}};
}

// One plot file: per-block key (the fixed variable), x, then payload.
inline std::string render_blocks(const std::vector<ResultRow>& rows, bool x_is_snr,
                                 bool fractions) {
  std::set<double> block_keys;
  for (const ResultRow& r : rows) block_keys.insert(x_is_snr ? r.d : r.snr_db);

  std::string out;
  bool first_block = true;
  for (double key : block_keys) {
    std::vector<const ResultRow*> block;
    for (const ResultRow& r : rows)
      if ((x_is_snr ? r.d : r.snr_db) == key) block.push_back(&r);
    std::stable_sort(block.begin(), block.end(), [&](const ResultRow* a, const ResultRow* b) {
      return (x_is_snr ? a->snr_db : a->d) < (x_is_snr ? b->snr_db : b->d);
    });

    if (!first_block) out += '\n';
    first_block = false;
    out += std::string("# ") + (x_is_snr ? "d = " : "snr_db = ") + format_number(key) + '\n';
    if (fractions) out += "# columns: x " + fraction_columns(*block.front()).first + '\n';
    for (const ResultRow* r : block) {
      out += format_number(x_is_snr ? r->snr_db : r->d);
      if (fractions) {
        for (double v : fraction_columns(*r).second) out += ' ' + format_number(v);
      } else {
        out += ' ' + format_number(r->mean_rate_bits);
      }
      out += '\n';
    }
  }
  return out;
}

}  // namespace detail

struct SummarizeReport {
  std::string table;
  std::vector<std::string> files_written;
};

inline SummarizeReport summarize_results(const std::string& csv_path,
                                         const std::string& out_dir) {
  const ParsedResults parsed = parse_results_csv(csv_path);

  SummarizeReport rep;
  if (parsed.rows.empty()) {
    rep.table = "no data rows\n";
    return rep;
  }
  rep.table = detail::render_table(parsed.rows);

  std::vector<Protocol> order;
  for (const ResultRow& r : parsed.rows)
    if (std::find(order.begin(), order.end(), r.protocol) == order.end())
      order.push_back(r.protocol);

  std::filesystem::create_directories(out_dir);
  for (Protocol p : order) {
    std::vector<ResultRow> rows;
    for (const ResultRow& r : parsed.rows)
      if (r.protocol == p) rows.push_back(r);

    const struct {
      const char* stem;
      bool x_is_snr;
      bool fractions;
    } kinds[] = {{"plot_rate_vs_snr_", true, false},
                 {"plot_fractions_vs_snr_", true, true},
                 {"plot_rate_vs_d_", false, false},
                 {"plot_fractions_vs_d_", false, true}};
    for (const auto& kind : kinds) {
      const std::filesystem::path path =
          std::filesystem::path(out_dir) / (kind.stem + std::string(protocol_name(p)) + ".dat");
      std::ofstream out(path, std::ios::binary);
      if (!out) throw ConfigError("summarize: cannot write '" + path.string() + "'");
      out << detail::render_blocks(rows, kind.x_is_snr, kind.fractions);
      rep.files_written.push_back(path.string());
    }
  }
  return rep;
}

}  // namespace swiptrelay
