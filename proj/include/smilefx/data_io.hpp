#pragma once

// Dataset CSV ingestion and output, atomic file writes, and the synthetic
// data generator that stands in for desk data.

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "smilefx/arma_garch.hpp"
#include "smilefx/dataset.hpp"
#include "smilefx/errors.hpp"
#include "smilefx/transform.hpp"

namespace smilefx {

inline constexpr std::string_view dataset_header = "date,alpha,nu,rho,spot,rate_dom,rate_for";

namespace io_detail {

inline std::vector<std::string_view> split(std::string_view line, char sep = ',') {
  std::vector<std::string_view> out;
  std::size_t begin = 0;
  while (true) {
    const auto pos = line.find(sep, begin);
    out.push_back(line.substr(begin, pos == std::string_view::npos ? std::string_view::npos : pos - begin));
    if (pos == std::string_view::npos) break;
    begin = pos + 1;
  }
  return out;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline double parse_double(std::string_view text, std::size_t line, std::string_view field) {
  text = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
    fail(ErrorKind::ParseError,
         "line " + std::to_string(line) + ": field '" + std::string(field) + "' is not a number");
  return value;
}

}  // namespace io_detail

// Shortest text that reads back to the same double.
inline std::string format_exact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Report formatting: 10 significant digits.
inline std::string format_report(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// Writes to a sibling temporary and renames over the target.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::Io, "cannot open " + tmp.string() + " for writing");
    out << contents;
    out.flush();
    if (!out) fail(ErrorKind::Io, "write to " + tmp.string() + " failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) fail(ErrorKind::Io, "rename to " + path.string() + " failed: " + ec.message());
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Dataset parse_dataset(std::string_view text, double maturity = 1.0 / 12.0) {
  Dataset data;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    std::string_view line = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;
    line = io_detail::trim(line);
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != dataset_header)
        fail(ErrorKind::ParseError, "line 1: header must be '" + std::string(dataset_header) + "'");
      header_seen = true;
      continue;
    }
    const auto cells = io_detail::split(line);
    if (cells.size() != 7)
      fail(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": expected 7 fields, got " +
                                      std::to_string(cells.size()));
    const std::string date(io_detail::trim(cells[0]));
    if (date.empty()) fail(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": empty date");
    SabrParams p{io_detail::parse_double(cells[1], line_no, "alpha"), io_detail::parse_double(cells[2], line_no, "nu"),
                 io_detail::parse_double(cells[3], line_no, "rho")};
    MarketSnapshot s{io_detail::parse_double(cells[4], line_no, "spot"),
                     io_detail::parse_double(cells[5], line_no, "rate_dom"),
                     io_detail::parse_double(cells[6], line_no, "rate_for"), maturity};

    const std::string row = "row " + std::to_string(data.size() + 1) + " (line " + std::to_string(line_no) + ")";
    auto reject = [&](std::string_view field, std::string_view why) {
      fail(ErrorKind::InvariantViolation, row + ": field '" + std::string(field) + "' " + std::string(why));
    };
    if (!(p.alpha > 0.0) || !std::isfinite(p.alpha)) reject("alpha", "must be > 0");
    if (!(p.nu > 0.0) || !std::isfinite(p.nu)) reject("nu", "must be > 0");
    if (!(p.rho > -1.0 && p.rho < 1.0)) reject("rho", "must lie in (-1, 1)");
    if (!(s.spot > 0.0) || !std::isfinite(s.spot)) reject("spot", "must be > 0");
    if (!std::isfinite(s.rate_dom)) reject("rate_dom", "must be finite");
    if (!std::isfinite(s.rate_for)) reject("rate_for", "must be finite");
    if (!data.dates.empty() && !(data.dates.back() < date))
      fail(ErrorKind::OutOfOrder, row + ": date " + date + " does not follow " + data.dates.back());

    data.dates.push_back(date);
    data.params.push_back(p);
    data.snapshots.push_back(s);
  }
  if (!header_seen) fail(ErrorKind::ParseError, "empty dataset file");
  return data;
}

inline Dataset load_dataset(const std::filesystem::path& path, double maturity = 1.0 / 12.0) {
  return parse_dataset(read_file(path), maturity);
}

inline std::string dataset_to_csv(const Dataset& data) {
  std::string out(dataset_header);
  out += '\n';
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& p = data.params[i];
    const auto& s = data.snapshots[i];
    out += data.dates[i];
    for (double v : {p.alpha, p.nu, p.rho, s.spot, s.rate_dom, s.rate_for}) {
      out += ',';
      out += format_exact(v);
    }
    out += '\n';
  }
  return out;
}

inline void write_dataset(const Dataset& data, const std::filesystem::path& path) {
  write_file_atomic(path, dataset_to_csv(data));
}

struct SyntheticSpec {
  std::size_t n_days = 1363;
  ReferenceModel alpha_model = reference_alpha_model();
  ReferenceModel nu_model = reference_nu_model();
  ReferenceModel rho_model = reference_rho_model();
  SabrParams initial{1.0, 0.6, -0.2};
  double spot0 = 100.0;
  double spot_vol = 0.10;  // annualised, daily steps of spot_vol / sqrt(252)
  double rate_dom = 0.001;
  double rate_for = 0.02;
  double maturity = 1.0 / 12.0;
  std::string start_date = "2006-09-29";

  void validate() const {
    if (n_days < 2) fail(ErrorKind::InvalidInput, "n_days must be >= 2");
    alpha_model.params.validate(alpha_model.spec);
    nu_model.params.validate(nu_model.spec);
    rho_model.params.validate(rho_model.spec);
    initial.validate();
    MarketSnapshot{spot0, rate_dom, rate_for, maturity}.validate();
    if (!(spot_vol >= 0.0)) fail(ErrorKind::InvalidInput, "spot_vol must be >= 0");
  }
};

namespace io_detail {

// Consecutive weekdays starting at `start` (YYYY-MM-DD).
inline std::vector<std::string> weekday_calendar(const std::string& start, std::size_t n) {
  using namespace std::chrono;
  int y = 0;
  unsigned m = 0;
  unsigned d = 0;
  if (std::sscanf(start.c_str(), "%d-%u-%u", &y, &m, &d) != 3)
    fail(ErrorKind::InvalidInput, "start date must be YYYY-MM-DD");
  const year_month_day ymd{year{y}, month{m}, day{d}};
  if (!ymd.ok()) fail(ErrorKind::InvalidInput, "start date is not a calendar date");
  sys_days day_point{ymd};
  std::vector<std::string> out;
  out.reserve(n);
  while (out.size() < n) {
    const weekday wd{day_point};
    if (wd != Saturday && wd != Sunday) {
      const year_month_day cur{day_point};
      char buf[16];
      std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(cur.year()), static_cast<unsigned>(cur.month()),
                    static_cast<unsigned>(cur.day()));
      out.emplace_back(buf);
    }
    day_point += days{1};
  }
  return out;
}

inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

}  // namespace io_detail

// Simulates the three differenced transformed-parameter series from their
// ARMA-GARCH models, integrates them from the initial levels and maps back
// to SABR parameters. Spot follows a driftless geometric random walk.
inline Dataset generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed) {
  spec.validate();
  const std::size_t n = spec.n_days;
  const TransformedParams start = to_unconstrained(spec.initial);

  auto levels = [&](const ReferenceModel& model, double first, std::uint64_t stream) {
    const auto diffs = simulate(model.spec, model.params, n - 1, io_detail::stream_seed(seed, stream));
    return undifference(first, diffs);
  };
  const auto a = levels(spec.alpha_model, start.a, 1);
  const auto nn = levels(spec.nu_model, start.n, 2);
  const auto r = levels(spec.rho_model, start.r, 3);

  std::mt19937_64 spot_rng(io_detail::stream_seed(seed, 4));
  std::normal_distribution<double> normal(0.0, 1.0);
  const double daily = spec.spot_vol / std::sqrt(252.0);

  Dataset data;
  data.dates = io_detail::weekday_calendar(spec.start_date, n);
  double log_return = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    if (t > 0) log_return += daily * normal(spot_rng);
    // day 0 carries the configured values exactly
    data.params.push_back(t == 0 ? spec.initial : from_unconstrained({a[t], nn[t], r[t]}));
    data.snapshots.push_back({spec.spot0 * std::exp(log_return), spec.rate_dom, spec.rate_for, spec.maturity});
  }
  return data;
}

}  // namespace smilefx
