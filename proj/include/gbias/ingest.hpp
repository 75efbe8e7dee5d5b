#pragma once

// Indicator panels: long-format (date, company, indicator, value) tables.
//
// CSV schema: header `date,company,indicator,value`, ISO-8601 dates
// (YYYY-MM-DD), indicator codes PE PFE PB POC PIC PFC PCE, `.` decimal
// point, no thousands separators, `\n` or `\r\n` line endings. Fields are
// not quoted, so company identifiers cannot contain commas.

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gbias/sampling.hpp"

namespace gbias {

using Date = std::chrono::year_month_day;

/// Parses YYYY-MM-DD; throws DataError on malformed or invalid days.
Date parse_date(std::string_view text);
std::string format_date(Date d);

enum class Indicator { kPE, kPFE, kPB, kPOC, kPIC, kPFC, kPCE };

inline constexpr Indicator kAllIndicators[] = {Indicator::kPE,  Indicator::kPFE, Indicator::kPB,
                                               Indicator::kPOC, Indicator::kPIC, Indicator::kPFC,
                                               Indicator::kPCE};

std::string_view to_string(Indicator indicator) noexcept;
Indicator parse_indicator(std::string_view code);
/// Price-to-cash-flow ratios (operating, investing, financing) are analyzed
/// per sign branch; the others keep only positive values.
bool is_cash_flow(Indicator indicator) noexcept;

struct Observation {
  Date date;
  std::string company;
  Indicator indicator = Indicator::kPE;
  double value = 0.0;

  bool operator==(const Observation&) const = default;
};

class IndicatorPanel {
 public:
  IndicatorPanel() = default;
  /// Throws DataError on a duplicate (date, company, indicator) key.
  explicit IndicatorPanel(std::vector<Observation> rows);

  const std::vector<Observation>& rows() const noexcept { return rows_; }
  std::size_t size() const noexcept { return rows_.size(); }

  /// Ascending dates on which the indicator has at least one row.
  std::vector<Date> dates(Indicator indicator) const;
  /// Values at (date, indicator) in row order; empty if absent.
  std::vector<double> values(Date date, Indicator indicator) const;
  bool has(Date date, Indicator indicator) const;

  bool operator==(const IndicatorPanel& other) const { return rows_ == other.rows_; }

 private:
  using Key = std::pair<Indicator, std::chrono::sys_days>;
  std::vector<Observation> rows_;
  std::map<Key, std::vector<std::size_t>> index_;
};

IndicatorPanel read_panel_csv(std::istream& in, const std::string& source = "<stream>");
/// Throws DataError naming the path when the file cannot be opened.
IndicatorPanel load_panel(const std::filesystem::path& path);
void write_panel_csv(std::ostream& out, const IndicatorPanel& panel);
void save_panel(const std::filesystem::path& path, const IndicatorPanel& panel);

struct CrossSection {
  Date date;
  Indicator indicator = Indicator::kPE;
  SignBranch sign = SignBranch::kAll;
  std::vector<double> values;  ///< all > 0
  std::size_t raw_count = 0;
  std::size_t dropped_cap = 0;
  std::size_t dropped_sign = 0;
  std::size_t dropped_zero = 0;
};

/// Cap filter, then sign selection. For cash-flow indicators the negative
/// branch is sign-flipped and `all` merges both branches as magnitudes; for
/// the other indicators negatives are dropped and `negative` is rejected.
CrossSection cross_section(const IndicatorPanel& panel, Date date, Indicator indicator,
                           const SamplingProtocol& protocol);

}  // namespace gbias
