#pragma once

// CSV and JSON serialisation of backtest and strategy reports. Numbers are
// written with 10 significant digits; JSON mirrors the CSV fields.

#include <json.hpp>

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "smilefx/backtest.hpp"
#include "smilefx/data_io.hpp"
#include "smilefx/errors.hpp"
#include "smilefx/strategy.hpp"

namespace smilefx {

enum class ReportFormat { Csv, Json };

inline ReportFormat parse_report_format(std::string_view name) {
  if (name == "csv") return ReportFormat::Csv;
  if (name == "json") return ReportFormat::Json;
  fail(ErrorKind::InvalidInput, "format must be csv or json");
}

inline constexpr std::string_view backtest_csv_header = "strike_rel,horizon,model_mae_bp,rw_mae_bp";
inline constexpr std::string_view strategy_csv_header =
    "structure,delta,avg_return,std_return,standardized,frequency,n_trades";

namespace report_detail {

// Rounded to the printed precision so JSON and CSV carry the same values.
inline double rounded(double v) { return std::stod(format_report(v)); }

}  // namespace report_detail

inline std::string to_csv(const BacktestReport& report) {
  std::string out(backtest_csv_header);
  out += '\n';
  for (std::size_t hi = 0; hi < report.horizons.size(); ++hi) {
    for (std::size_t k = 0; k < report.strike_rel.size(); ++k) {
      out += format_report(report.strike_rel[k]) + ',' + std::to_string(report.horizons[hi]) + ',' +
             format_report(report.model_mae_bp[hi][k]) + ',' + format_report(report.rw_mae_bp[hi][k]) + '\n';
    }
  }
  return out;
}

inline nlohmann::json to_json(const BacktestReport& report) {
  using report_detail::rounded;
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t hi = 0; hi < report.horizons.size(); ++hi)
    for (std::size_t k = 0; k < report.strike_rel.size(); ++k)
      rows.push_back({{"strike_rel", rounded(report.strike_rel[k])},
                      {"horizon", report.horizons[hi]},
                      {"model_mae_bp", rounded(report.model_mae_bp[hi][k])},
                      {"rw_mae_bp", rounded(report.rw_mae_bp[hi][k])}});
  nlohmann::json summary = nlohmann::json::array();
  if (!report.horizons.empty() && !report.strike_rel.empty()) {
    const auto s = error_summary(report);
    for (std::size_t hi = 0; hi < s.horizons.size(); ++hi)
      summary.push_back({{"horizon", s.horizons[hi]},
                         {"model_mean_bp", rounded(s.model_mean_bp[hi])},
                         {"rw_mean_bp", rounded(s.rw_mean_bp[hi])}});
  }
  return {{"rows", rows},
          {"summary", summary},
          {"days_scored", report.days.size()},
          {"skipped_origins", report.skipped_origins},
          {"smiles_checked", report.smiles_checked},
          {"arbitrage_failures", report.arbitrage_failures}};
}

inline std::string to_csv(const StrategyReport& report) {
  std::string out(strategy_csv_header);
  out += '\n';
  for (auto kind : {StructureKind::Strangle, StructureKind::RiskReversal}) {
    for (const auto& row : report.rows(kind)) {
      out += std::string(to_string(kind)) + ',' + format_report(row.delta) + ',' + format_report(row.avg_return) + ',' +
             format_report(row.std_return) + ',' + format_report(row.standardized) + ',' +
             format_report(row.frequency) + ',' + std::to_string(row.n_trades) + '\n';
    }
  }
  return out;
}

inline nlohmann::json to_json(const StrategyReport& report) {
  using report_detail::rounded;
  nlohmann::json rows = nlohmann::json::array();
  for (auto kind : {StructureKind::Strangle, StructureKind::RiskReversal})
    for (const auto& row : report.rows(kind))
      rows.push_back({{"structure", to_string(kind)},
                      {"delta", rounded(row.delta)},
                      {"avg_return", rounded(row.avg_return)},
                      {"std_return", rounded(row.std_return)},
                      {"standardized", rounded(row.standardized)},
                      {"frequency", rounded(row.frequency)},
                      {"n_trades", row.n_trades}});
  return {{"rows", rows},
          {"n_days", report.n_days},
          {"skipped_origins", report.skipped_origins},
          {"untradeable_days", report.untradeable_days}};
}

template <typename Report>
void write_report(const Report& report, const std::filesystem::path& path, ReportFormat format) {
  if (format == ReportFormat::Csv) {
    write_file_atomic(path, to_csv(report));
  } else {
    write_file_atomic(path, to_json(report).dump(2) + "\n");
  }
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

inline CsvTable parse_csv(std::string_view text) {
  CsvTable table;
  std::size_t pos = 0;
  bool first = true;
  while (pos < text.size()) {
    const auto end = text.find('\n', pos);
    const auto line = io_detail::trim(text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos));
    pos = end == std::string_view::npos ? text.size() : end + 1;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    for (auto c : io_detail::split(line)) cells.emplace_back(c);
    if (first) {
      table.header = std::move(cells);
      first = false;
    } else {
      table.rows.push_back(std::move(cells));
    }
  }
  return table;
}

}  // namespace smilefx
