#include "gbias/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>

#include "gbias/error.hpp"
#include "gbias/format.hpp"

namespace gbias {
namespace {

constexpr std::string_view kHeader = "date,company,indicator,value";

template <class Int>
bool parse_int(std::string_view s, Int& out) {
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::string key_text(Date d, std::string_view company, Indicator ind) {
  return "(" + format_date(d) + ", " + std::string(company) + ", " +
         std::string(to_string(ind)) + ")";
}

}  // namespace

Date parse_date(std::string_view text) {
  int y = 0;
  unsigned m = 0, d = 0;
  if (text.size() != 10 || text[4] != '-' || text[7] != '-' ||
      !parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), m) ||
      !parse_int(text.substr(8, 2), d))
    throw DataError("malformed date '" + std::string(text) + "' (expected YYYY-MM-DD)");
  const Date date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
  if (!date.ok()) throw DataError("invalid calendar day '" + std::string(text) + "'");
  return date;
}

std::string format_date(Date d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

std::string_view to_string(Indicator indicator) noexcept {
  switch (indicator) {
    case Indicator::kPE: return "PE";
    case Indicator::kPFE: return "PFE";
    case Indicator::kPB: return "PB";
    case Indicator::kPOC: return "POC";
    case Indicator::kPIC: return "PIC";
    case Indicator::kPFC: return "PFC";
    case Indicator::kPCE: return "PCE";
  }
  return "?";
}

Indicator parse_indicator(std::string_view code) {
  for (Indicator ind : kAllIndicators)
    if (to_string(ind) == code) return ind;
  throw DataError("unknown indicator '" + std::string(code) +
                  "' (expected PE, PFE, PB, POC, PIC, PFC or PCE)");
}

bool is_cash_flow(Indicator indicator) noexcept {
  return indicator == Indicator::kPOC || indicator == Indicator::kPIC ||
         indicator == Indicator::kPFC;
}

IndicatorPanel::IndicatorPanel(std::vector<Observation> rows) : rows_(std::move(rows)) {
  std::set<std::tuple<Indicator, std::chrono::sys_days, std::string_view>> seen;
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const Observation& o = rows_[i];
    if (!o.date.ok()) throw DataError("invalid calendar day in panel row " + std::to_string(i));
    const std::chrono::sys_days day{o.date};
    if (!seen.emplace(o.indicator, day, o.company).second)
      throw DataError("duplicate key " + key_text(o.date, o.company, o.indicator));
    index_[{o.indicator, day}].push_back(i);
  }
}

std::vector<Date> IndicatorPanel::dates(Indicator indicator) const {
  std::vector<Date> out;
  for (const auto& [key, rows] : index_)
    if (key.first == indicator) out.emplace_back(key.second);
  return out;
}

std::vector<double> IndicatorPanel::values(Date date, Indicator indicator) const {
  std::vector<double> out;
  const auto it = index_.find({indicator, std::chrono::sys_days{date}});
  if (it == index_.end()) return out;
  out.reserve(it->second.size());
  for (std::size_t i : it->second) out.push_back(rows_[i].value);
  return out;
}

bool IndicatorPanel::has(Date date, Indicator indicator) const {
  return index_.contains({indicator, std::chrono::sys_days{date}});
}

IndicatorPanel read_panel_csv(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) -> DataError {
    return DataError(source + ":" + std::to_string(line_no) + ": " + what);
  };
  auto strip_cr = [](std::string& s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
  };

  if (!std::getline(in, line)) throw DataError(source + ": empty file (missing header)");
  ++line_no;
  strip_cr(line);
  if (line != kHeader) throw fail("expected header '" + std::string(kHeader) + "'");

  std::vector<Observation> rows;
  std::set<std::tuple<Indicator, std::chrono::sys_days, std::string>> seen;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != 4)
      throw fail("expected 4 fields, found " + std::to_string(fields.size()));
    Observation o;
    try {
      o.date = parse_date(fields[0]);
      o.indicator = parse_indicator(fields[2]);
    } catch (const DataError& e) {
      throw fail(e.what());
    }
    if (fields[1].empty()) throw fail("empty company identifier");
    o.company = std::string(fields[1]);
    const std::string_view v = fields[3];
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), o.value);
    if (v.empty() || ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(o.value))
      throw fail("non-numeric value '" + std::string(v) + "'");
    if (!seen.emplace(o.indicator, std::chrono::sys_days{o.date}, o.company).second)
      throw fail("duplicate key " + key_text(o.date, o.company, o.indicator));
    rows.push_back(std::move(o));
  }
  return IndicatorPanel(std::move(rows));
}

IndicatorPanel load_panel(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open panel file '" + path.string() + "'");
  return read_panel_csv(in, path.string());
}

void write_panel_csv(std::ostream& out, const IndicatorPanel& panel) {
  out << kHeader << '\n';
  for (const Observation& o : panel.rows())
    out << format_date(o.date) << ',' << o.company << ',' << to_string(o.indicator) << ','
        << format_double(o.value) << '\n';
}

void save_panel(const std::filesystem::path& path, const IndicatorPanel& panel) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write panel file '" + path.string() + "'");
  write_panel_csv(out, panel);
}

CrossSection cross_section(const IndicatorPanel& panel, Date date, Indicator indicator,
                           const SamplingProtocol& protocol) {
  protocol.validate();
  if (!is_cash_flow(indicator) && protocol.sign == SignBranch::kNegative)
    throw DomainError("negative branch is only defined for cash-flow indicators, not " +
                      std::string(to_string(indicator)));
  const auto raw = panel.values(date, indicator);
  if (raw.empty())
    throw DataError("no data for " + std::string(to_string(indicator)) + " on " +
                    format_date(date));

  CrossSection cs;
  cs.date = date;
  cs.indicator = indicator;
  cs.sign = protocol.sign;
  cs.raw_count = raw.size();
  const auto kept = magnitude_filter(raw, protocol.magnitude_cap);
  cs.dropped_cap = raw.size() - kept.size();
  SignSplit split = sign_split(kept);
  cs.dropped_zero = split.zeros;

  switch (protocol.sign) {
    case SignBranch::kPositive:
      cs.values = std::move(split.positive);
      cs.dropped_sign = split.negative.size();
      break;
    case SignBranch::kNegative:
      cs.values = std::move(split.negative);
      cs.dropped_sign = split.positive.size();
      break;
    case SignBranch::kAll:
      cs.values = std::move(split.positive);
      if (is_cash_flow(indicator))
        cs.values.insert(cs.values.end(), split.negative.begin(), split.negative.end());
      else
        cs.dropped_sign = split.negative.size();
      break;
  }
  if (cs.values.empty())
    throw DataError("cross-section " + std::string(to_string(indicator)) + " " +
                    std::string(to_string(protocol.sign)) + " on " + format_date(date) +
                    " is empty after filtering");
  return cs;
}

}  // namespace gbias
