#include "gbias/cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "config.hpp"
#include "gbias/distributions.hpp"
#include "gbias/error.hpp"
#include "gbias/format.hpp"
#include "gbias/gof.hpp"
#include "gbias/ingest.hpp"
#include "gbias/pipeline.hpp"
#include "gbias/rng.hpp"
#include "gbias/sampling.hpp"
#include "gbias/simulate.hpp"
#include "manifest.hpp"

namespace gbias::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Flags {
  std::string panel;
  std::string values;
  std::string config;
  std::string out;
  std::vector<std::string> indicators;
  std::string date;
  std::string sign;
  std::string mode = "bootstrap";
  std::string method = "all";
  std::uint64_t seed = 0;
  std::size_t bootstrap = 2000;
  std::size_t quantiles = 300;
  std::size_t bins = 0;
  double cap = 1000.0;
  bool force = false;
  bool seed_given = false;
  bool quantiles_given = false;
};

// ---------------------------------------------------------------- helpers

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << text;
}

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

SamplingProtocol protocol_from(const Flags& f) {
  SamplingProtocol p;
  p.magnitude_cap = f.cap;
  p.quantile_points = f.quantiles;
  try {
    p.validate();
  } catch (const DomainError& e) {
    throw UsageError(std::string("--cap/--quantiles: ") + e.what());
  }
  return p;
}

GofOptions gof_options_from(const Flags& f) {
  GofOptions o;
  o.boot.replicates = f.bootstrap;
  o.boot.seed = f.seed;
  o.chi2_bins = f.bins;
  if (f.mode == "bootstrap")
    o.mode = PValueMode::kBootstrap;
  else if (f.mode == "asymptotic")
    o.mode = PValueMode::kAsymptotic;
  else
    throw UsageError("--mode must be 'bootstrap' or 'asymptotic'");
  if (o.mode == PValueMode::kBootstrap) {
    try {
      o.boot.validate();
    } catch (const DomainError& e) {
      throw UsageError(std::string("--bootstrap: ") + e.what());
    }
  }
  return o;
}

template <class Fn>
auto as_usage(const std::string& flag, Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    throw UsageError(flag + ": " + e.what());
  }
}

std::string index_label(Indicator ind, SignBranch sign) {
  std::string label(to_string(ind));
  if (is_cash_flow(ind) && sign == SignBranch::kPositive) label += '+';
  if (is_cash_flow(ind) && sign == SignBranch::kNegative) label += '-';
  return label;
}

json gof_json(const GofResult& r) {
  json j;
  j["method"] = to_string(r.method);
  j["statistic"] = r.statistic;
  j["p_value"] = r.p_value;
  j["stars"] = to_string(r.stars);
  j["n"] = r.n;
  if (r.dof) j["dof"] = *r.dof;
  if (r.method == GofMethod::kAd) j["clipped"] = r.clipped;
  return j;
}

std::string gof_csv_row(const GofResult& r) {
  return std::string(to_string(r.method)) + ',' + format_double(r.statistic) + ',' +
         format_double(r.p_value) + ',' + std::string(to_string(r.stars)) + ',' +
         std::to_string(r.n) + '\n';
}

std::vector<double> read_values_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open values file '" + path.string() + "'");
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
    if (ec != std::errc{} || ptr != line.data() + line.size() || !std::isfinite(v)) {
      if (line_no == 1) continue;  // header
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": non-numeric value '" +
                      line + "'");
    }
    values.push_back(v);
  }
  return values;
}

// Runs `body` with a fresh output directory; removes it again on failure.
void with_output_dir(const Flags& f, RunManifest& manifest,
                     const std::function<void(const fs::path&)>& body) {
  if (f.out.empty()) throw UsageError("--out is required");
  const fs::path out(f.out);
  if (fs::exists(out)) {
    if (!f.force)
      throw UsageError("output directory '" + out.string() + "' exists (use --force to replace)");
    fs::remove_all(out);
  }
  fs::create_directories(out);
  try {
    manifest.started = std::chrono::system_clock::now();
    body(out);
    manifest.finished = std::chrono::system_clock::now();
    manifest.tool_version = kToolVersion;
    manifest.write(out);
  } catch (...) {
    std::error_code ec;
    fs::remove_all(out, ec);
    throw;
  }
}

std::map<std::string, std::string> snapshot(const Flags& f) {
  std::map<std::string, std::string> c;
  if (!f.panel.empty()) c["panel"] = f.panel;
  if (!f.values.empty()) c["values"] = f.values;
  if (!f.config.empty()) c["config"] = f.config;
  std::string inds;
  for (const auto& i : f.indicators) inds += (inds.empty() ? "" : ";") + i;
  if (!inds.empty()) c["indicator"] = inds;
  if (!f.date.empty()) c["date"] = f.date;
  if (!f.sign.empty()) c["sign"] = f.sign;
  c["mode"] = f.mode;
  c["method"] = f.method;
  c["bootstrap"] = std::to_string(f.bootstrap);
  c["quantiles"] = std::to_string(f.quantiles);
  c["bins"] = std::to_string(f.bins);
  c["cap"] = format_double(f.cap);
  return c;
}

// Values for fit/gof: either --values or a single panel cross-section.
struct Selection {
  std::vector<double> values;
  json description;
};

Selection select_values(const Flags& f, RunManifest& manifest) {
  Selection s;
  if (!f.values.empty() && !f.panel.empty()) throw UsageError("use either --values or --panel");
  if (!f.values.empty()) {
    s.values = read_values_file(f.values);
    manifest.add_input(f.values);
    s.description["source"] = f.values;
    return s;
  }
  if (f.panel.empty()) throw UsageError("one of --values or --panel is required");
  if (f.indicators.size() != 1) throw UsageError("--indicator must name exactly one indicator");
  if (f.date.empty()) throw UsageError("--date is required with --panel");
  const Indicator ind = as_usage("--indicator", [&] { return parse_indicator(f.indicators[0]); });
  const Date date = as_usage("--date", [&] { return parse_date(f.date); });
  SamplingProtocol proto;
  proto.magnitude_cap = f.cap;
  proto.sign = f.sign.empty() ? SignBranch::kAll : as_usage("--sign", [&] { return parse_sign(f.sign); });
  as_usage("--cap", [&] { proto.validate(); return 0; });
  if (!is_cash_flow(ind) && proto.sign == SignBranch::kNegative)
    throw UsageError("--sign negative is only defined for POC, PIC and PFC");

  const IndicatorPanel panel = load_panel(f.panel);
  manifest.add_input(f.panel);
  CrossSection cs = cross_section(panel, date, ind, proto);
  s.description["source"] = f.panel;
  s.description["date"] = format_date(date);
  s.description["indicator"] = to_string(ind);
  s.description["sign"] = to_string(proto.sign);
  s.description["raw_count"] = cs.raw_count;
  s.description["dropped_cap"] = cs.dropped_cap;
  s.description["dropped_sign"] = cs.dropped_sign;
  s.description["dropped_zero"] = cs.dropped_zero;
  s.values = std::move(cs.values);
  return s;
}

// ---------------------------------------------------------------- analyze

void cmd_analyze(const Flags& f, std::ostream& out) {
  if (f.panel.empty()) throw UsageError("--panel is required");
  const SamplingProtocol proto = protocol_from(f);
  const GofOptions options = gof_options_from(f);
  std::optional<SignBranch> sign;
  if (!f.sign.empty()) sign = as_usage("--sign", [&] { return parse_sign(f.sign); });
  std::vector<Indicator> requested;
  for (const auto& code : f.indicators)
    requested.push_back(as_usage("--indicator", [&] { return parse_indicator(code); }));
  for (Indicator ind : requested)
    if (sign == SignBranch::kNegative && !is_cash_flow(ind))
      throw UsageError("--sign negative is only defined for POC, PIC and PFC");

  RunManifest manifest;
  manifest.command = "analyze";
  manifest.config = snapshot(f);
  manifest.seed = f.seed;

  with_output_dir(f, manifest, [&](const fs::path& dir) {
    const IndicatorPanel panel = load_panel(f.panel);
    manifest.add_input(f.panel);

    std::vector<std::pair<Indicator, SignBranch>> jobs;
    const bool all = requested.empty();
    for (Indicator ind : all ? std::vector<Indicator>(std::begin(kAllIndicators), std::end(kAllIndicators))
                             : requested) {
      if (all && panel.dates(ind).empty()) continue;
      if (sign) {
        if (*sign == SignBranch::kNegative && !is_cash_flow(ind)) continue;
        jobs.emplace_back(ind, *sign);
      } else if (is_cash_flow(ind)) {
        jobs.emplace_back(ind, SignBranch::kPositive);
        jobs.emplace_back(ind, SignBranch::kNegative);
      } else {
        jobs.emplace_back(ind, SignBranch::kAll);
      }
    }
    if (jobs.empty()) throw DataError("nothing to analyze in '" + f.panel + "'");

    json summary = json::array();
    std::string table = "index,KS,CHI2,AD\n";
    for (const auto& [ind, sg] : jobs) {
      const PValueSeries series = daily_bias_series(panel, ind, sg, proto, options);
      const std::string stem = "series_" + std::string(to_string(ind)) + "_" + std::string(to_string(sg));

      std::string csv = "date,method,statistic,p_value,stars,n\n";
      json entries = json::array();
      for (const DailyEntry& e : series.entries) {
        json je;
        je["date"] = format_date(e.date);
        je["section_size"] = e.section_size;
        je["results"] = json::array();
        for (const GofResult& r : e.results) {
          csv += format_date(e.date) + ',' + gof_csv_row(r);
          je["results"].push_back(gof_json(r));
        }
        entries.push_back(std::move(je));
      }
      write_text(dir / (stem + ".csv"), csv);

      json skipped = json::array();
      for (const SkippedDay& s : series.skipped)
        skipped.push_back({{"date", format_date(s.date)}, {"reason", s.reason}});
      json minima = json::object();
      table += index_label(ind, sg);
      for (const auto& m : series.minima) {
        table += ',';
        if (!m) continue;
        minima[std::string(to_string(m->method))] = {{"date", format_date(m->date)},
                                                     {"p_value", m->p_value},
                                                     {"stars", to_string(stars_for(m->p_value))}};
        table += fixed4(m->p_value) + std::string(to_string(stars_for(m->p_value)));
      }
      table += '\n';

      json js;
      js["indicator"] = to_string(ind);
      js["sign"] = to_string(sg);
      js["index"] = index_label(ind, sg);
      js["analyzed_days"] = series.entries.size();
      js["skipped_days"] = series.skipped.size();
      js["minima"] = minima;
      js["skipped"] = skipped;
      json full = js;
      full["entries"] = std::move(entries);
      write_text(dir / (stem + ".json"), full.dump(2) + '\n');
      summary.push_back(std::move(js));
    }
    json doc;
    doc["multiplicity_correction"] = "none";
    doc["quantile_points"] = proto.quantile_points;
    doc["magnitude_cap"] = proto.magnitude_cap;
    doc["bootstrap_replicates"] = options.mode == PValueMode::kBootstrap ? f.bootstrap : 0;
    doc["series"] = std::move(summary);
    write_text(dir / "summary.json", doc.dump(2) + '\n');
    write_text(dir / "table.csv", table);
    out << table;
  });
}

// ---------------------------------------------------------------- fit

json fit_json(const std::string& name, int k, double aic, bool converged, double ll,
              int iterations, const json& params) {
  json j;
  j["model"] = name;
  j["free_parameters"] = k;
  j["params"] = params;
  j["log_likelihood"] = ll;
  j["aic"] = aic;
  j["converged"] = converged;
  j["iterations"] = iterations;
  return j;
}

json gpd_params_json(const GpdParams& p) {
  return {{"kappa", p.kappa}, {"alpha", p.alpha}, {"gamma", p.gamma}, {"mu_loc", p.mu_loc}};
}

void cmd_fit(const Flags& f, std::ostream& out) {
  if (f.quantiles < 10) throw UsageError("--quantiles must be >= 10");
  RunManifest manifest;
  manifest.command = "fit";
  manifest.config = snapshot(f);
  if (f.seed_given) manifest.seed = f.seed;

  // Validate selectors before creating the output directory.
  if (f.values.empty() && f.panel.empty()) throw UsageError("one of --values or --panel is required");

  with_output_dir(f, manifest, [&](const fs::path& dir) {
    const Selection sel = select_values(f, manifest);
    const ShapeComparison cmp = fit_bias_shape(sel.values);

    json doc;
    doc["section"] = sel.description;
    doc["n"] = sel.values.size();
    doc["models"] = json::array(
        {fit_json("lognormal", 2, cmp.aic[0], cmp.lognormal.converged, cmp.lognormal.log_likelihood,
                  cmp.lognormal.iterations,
                  {{"mu", cmp.lognormal.params.mu}, {"sigma", cmp.lognormal.params.sigma}}),
         fit_json("gpd1", 3, cmp.aic[1], cmp.gpd1.converged, cmp.gpd1.log_likelihood,
                  cmp.gpd1.iterations, gpd_params_json(cmp.gpd1.params)),
         fit_json("gpd2", 4, cmp.aic[2], cmp.gpd2.converged, cmp.gpd2.log_likelihood,
                  cmp.gpd2.iterations, gpd_params_json(cmp.gpd2.params))});
    write_text(dir / "shape.json", doc.dump(2) + '\n');

    std::string overlay = "x,lognormal,gpd1,gpd2\n";
    for (const DensityRow& r : density_overlay(cmp, sel.values))
      overlay += format_double(r.x) + ',' + format_double(r.lognormal) + ',' +
                 format_double(r.gpd1) + ',' + format_double(r.gpd2) + '\n';
    write_text(dir / "overlay.csv", overlay);

    const std::size_t k = std::min(f.quantiles, sel.values.size());
    std::string qq = "probability,theoretical,empirical,log_theoretical,log_empirical\n";
    for (const QQPoint& p : qq_plot_data(sel.values, k).points)
      qq += format_double(p.probability) + ',' + format_double(p.theoretical) + ',' +
            format_double(p.empirical) + ',' + format_double(std::log(p.theoretical)) + ',' +
            format_double(std::log(p.empirical)) + '\n';
    write_text(dir / "qq.csv", qq);

    out << "lognormal AIC " << format_double(cmp.aic[0]) << "\ngpd1 AIC " << format_double(cmp.aic[1])
        << "\ngpd2 AIC " << format_double(cmp.aic[2]) << '\n';
  });
}

// ---------------------------------------------------------------- gof

std::vector<GofMethod> methods_from(const std::string& name) {
  if (name == "all") return {kAllMethods.begin(), kAllMethods.end()};
  return {as_usage("--method", [&] { return parse_method(name); })};
}

void cmd_gof(const Flags& f, std::ostream& out) {
  const GofOptions options = gof_options_from(f);
  const auto methods = methods_from(f.method);
  if (f.quantiles_given && f.quantiles < 10) throw UsageError("--quantiles must be >= 10");
  if (f.values.empty() && f.panel.empty()) throw UsageError("one of --values or --panel is required");
  RunManifest manifest;
  manifest.command = "gof";
  manifest.config = snapshot(f);
  manifest.seed = f.seed;

  with_output_dir(f, manifest, [&](const fs::path& dir) {
    Selection sel = select_values(f, manifest);
    std::vector<double> sample = sel.values;
    if (f.quantiles_given) sample = quantile_subsample(sample, f.quantiles);
    const auto results = gof_test_all(sample, options);
    const auto fit = lognormal_fit(sample);

    std::string csv = "method,statistic,p_value,stars,n\n";
    json doc;
    doc["section"] = sel.description;
    doc["subsampled"] = f.quantiles_given;
    doc["fitted"] = {{"mu", fit.params.mu}, {"sigma", fit.params.sigma}};
    doc["mode"] = f.mode;
    doc["results"] = json::array();
    for (GofMethod m : methods) {
      const GofResult& r = results[static_cast<std::size_t>(m)];
      csv += gof_csv_row(r);
      doc["results"].push_back(gof_json(r));
    }
    write_text(dir / "gof.csv", csv);
    write_text(dir / "gof.json", doc.dump(2) + '\n');
    out << csv;
  });
}

// ---------------------------------------------------------------- simulate

class ConfigReader {
 public:
  explicit ConfigReader(std::map<std::string, std::string> kv) : kv_(std::move(kv)) {}

  std::string text(const std::string& key, const std::string& fallback) {
    used_.insert(key);
    const auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
  }

  double real(const std::string& key, double fallback) {
    used_.insert(key);
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    double v = 0.0;
    const std::string& s = it->second;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v))
      throw UsageError("config field '" + key + "': expected a number, got '" + s + "'");
    return v;
  }

  std::size_t count(const std::string& key, std::size_t fallback) {
    used_.insert(key);
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    std::size_t v = 0;
    const std::string& s = it->second;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
      throw UsageError("config field '" + key + "': expected a non-negative integer, got '" + s + "'");
    return v;
  }

  bool flag(const std::string& key, bool fallback) {
    const std::string s = text(key, fallback ? "true" : "false");
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw UsageError("config field '" + key + "': expected true or false, got '" + s + "'");
  }

  void reject_unknown() const {
    for (const auto& [k, v] : kv_)
      if (!used_.contains(k)) throw UsageError("config field '" + k + "': unknown key");
  }

  const std::map<std::string, std::string>& entries() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
  std::set<std::string> used_;
};

void cmd_simulate(const Flags& f, std::ostream& out, std::ostream& err) {
  if (f.config.empty()) throw UsageError("--config is required");
  ConfigReader cfgfile = [&] {
    try {
      return ConfigReader(read_key_value_file(f.config));
    } catch (const DataError& e) {
      if (!fs::exists(f.config)) throw;
      throw UsageError(e.what());
    }
  }();

  const std::string process = cfgfile.text("process", "gibrat");
  if (process != "gibrat" && process != "kesten")
    throw UsageError("config field 'process': expected gibrat or kesten, got '" + process + "'");
  const bool kesten = process == "kesten";
  ProcessConfig cfg;
  cfg.x0 = cfgfile.real("x0", cfg.x0);
  cfg.steps = cfgfile.count("steps", kesten ? 2000 : cfg.steps);
  cfg.n_paths = cfgfile.count("n_paths", cfg.n_paths);
  cfg.growth.m = cfgfile.real("m", cfg.growth.m);
  cfg.growth.v = cfgfile.real("v", cfg.growth.v);
  cfg.seed = f.seed;
  if (kesten) {
    EpsilonLaw eps;
    const std::string law = cfgfile.text("epsilon_law", "constant");
    if (law == "constant")
      eps.kind = EpsilonLaw::Kind::kConstant;
    else if (law == "exponential")
      eps.kind = EpsilonLaw::Kind::kExponential;
    else
      throw UsageError("config field 'epsilon_law': expected constant or exponential");
    eps.mean = cfgfile.real("epsilon", 1.0);
    cfg.epsilon = eps;
  }
  const bool hill = cfgfile.flag("hill", kesten);
  const std::size_t hill_k = cfgfile.count("hill_k", 0);
  const bool run_gof = cfgfile.flag("gof", !kesten);
  const std::string gof_method = cfgfile.text("gof_method", "all");
  const std::size_t gof_boot = cfgfile.count("bootstrap", f.bootstrap);
  const std::size_t gof_quantiles = cfgfile.count("quantiles", 0);
  cfgfile.reject_unknown();
  try {
    cfg.validate();
  } catch (const DomainError& e) {
    throw UsageError(std::string("config field ") + e.what());
  }
  const auto methods = methods_from(gof_method);
  GofOptions gopt;
  gopt.boot.replicates = gof_boot;
  gopt.boot.seed = derive_seed(f.seed, {0x676f66});
  if (run_gof) as_usage("config field 'bootstrap'", [&] { gopt.boot.validate(); return 0; });
  if (gof_quantiles != 0 && gof_quantiles < 10)
    throw UsageError("config field 'quantiles': must be >= 10 (or 0 for no subsampling)");

  RunManifest manifest;
  manifest.command = "simulate";
  manifest.config = cfgfile.entries();
  manifest.config["config"] = f.config;
  manifest.seed = f.seed;

  with_output_dir(f, manifest, [&](const fs::path& dir) {
    manifest.add_input(f.config);
    const auto values = kesten ? kesten_simulate(cfg, [&](const std::string& m) { err << "warning: " << m << '\n'; })
                               : gibrat_simulate(cfg);
    std::string csv = "x_T\n";
    for (double v : values) csv += format_double(v) + '\n';
    write_text(dir / "xt.csv", csv);

    json report;
    report["process"] = process;
    report["x0"] = cfg.x0;
    report["steps"] = cfg.steps;
    report["n_paths"] = cfg.n_paths;
    report["m"] = cfg.growth.m;
    report["v"] = cfg.growth.v;
    if (cfg.epsilon)
      report["epsilon"] = {{"law", cfg.epsilon->kind == EpsilonLaw::Kind::kConstant ? "constant" : "exponential"},
                           {"mean", cfg.epsilon->mean}};
    report["seed"] = f.seed;
    double mean_log = 0.0;
    for (double v : values) mean_log += std::log(v);
    mean_log /= static_cast<double>(values.size());
    report["mean_log"] = mean_log;
    if (kesten && cfg.growth.m < 0.0) report["kesten_exponent"] = kesten_exponent(cfg.growth.m, cfg.growth.v);
    if (hill) {
      const std::size_t k = hill_k == 0 ? default_hill_k(values.size()) : hill_k;
      const TailEstimate t = hill_tail_index(values, k);
      report["hill"] = {{"index", t.index}, {"k", t.k_used}, {"std_error", t.std_error}};
      out << "hill index " << format_double(t.index) << " (k = " << t.k_used << ", stderr "
          << format_double(t.std_error) << ")\n";
    }
    if (run_gof) {
      const auto sample = gof_quantiles ? quantile_subsample(values, gof_quantiles) : values;
      const auto results = gof_test_all(sample, gopt);
      json arr = json::array();
      for (GofMethod m : methods) {
        const GofResult& r = results[static_cast<std::size_t>(m)];
        arr.push_back(gof_json(r));
        out << to_string(r.method) << " p = " << format_double(r.p_value) << '\n';
      }
      report["gof"] = std::move(arr);
    }
    write_text(dir / "report.json", report.dump(2) + '\n');
  });
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Global bias detection in stock-fundamental indicators"};
  app.require_subcommand(1);
  Flags f;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", f.out, "Output directory (must not exist unless --force)")->required();
    sub->add_flag("--force", f.force, "Replace an existing output directory");
  };
  auto add_panel = [&](CLI::App* sub) {
    sub->add_option("--panel", f.panel, "Long-format panel CSV (date,company,indicator,value)");
    sub->add_option("--indicator", f.indicators, "Indicator code: PE PFE PB POC PIC PFC PCE");
    sub->add_option("--sign", f.sign, "Sign branch: positive, negative or all");
    sub->add_option("--cap", f.cap, "Magnitude cap; keeps |v| < cap");
  };
  auto add_test = [&](CLI::App* sub) {
    sub->add_option("--bootstrap", f.bootstrap, "Bootstrap replicates (>= 100)");
    sub->add_option("--mode", f.mode, "p-values: bootstrap or asymptotic");
    sub->add_option("--bins", f.bins, "Chi-square bins (0 = min(20, n/5))");
  };

  CLI::App* analyze = app.add_subcommand("analyze", "Daily p-value series and lowest-p table");
  add_common(analyze);
  add_panel(analyze);
  add_test(analyze);
  analyze->add_option("--seed", f.seed, "Master seed")->required();
  analyze->add_option("--quantiles", f.quantiles, "Quantile points per day (>= 10)");

  CLI::App* fit = app.add_subcommand("fit", "Log-normal vs GPD shape comparison for one section");
  add_common(fit);
  add_panel(fit);
  fit->add_option("--values", f.values, "Single-column CSV of values");
  fit->add_option("--date", f.date, "Cross-section date (YYYY-MM-DD)");
  fit->add_option("--quantiles", f.quantiles, "Q-Q points (>= 10)");
  CLI::Option* fit_seed = fit->add_option("--seed", f.seed, "Recorded in the manifest; fitting is deterministic");

  CLI::App* gof = app.add_subcommand("gof", "Goodness-of-fit tests against a fitted log-normal");
  add_common(gof);
  add_panel(gof);
  add_test(gof);
  gof->add_option("--values", f.values, "Single-column CSV of values");
  gof->add_option("--date", f.date, "Cross-section date (YYYY-MM-DD)");
  gof->add_option("--method", f.method, "ks, chi2, ad or all");
  gof->add_option("--seed", f.seed, "Bootstrap seed")->required();
  CLI::Option* gof_quantiles = gof->add_option("--quantiles", f.quantiles, "Subsample to K quantile points first");

  CLI::App* simulate = app.add_subcommand("simulate", "Gibrat or Kesten simulation from a config file");
  add_common(simulate);
  simulate->add_option("--config", f.config, "Flat key = value process config")->required();
  simulate->add_option("--seed", f.seed, "Master seed")->required();
  simulate->add_option("--bootstrap", f.bootstrap, "Default bootstrap replicates for the gof report");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    if (!analyze->parsed() && !fit->parsed() && !gof->parsed() && !simulate->parsed())
      err << app.help();
    return kExitUsage;
  }
  f.seed_given = fit_seed->count() > 0;
  f.quantiles_given = gof_quantiles->count() > 0;

  try {
    if (analyze->parsed()) cmd_analyze(f, out);
    if (fit->parsed()) cmd_fit(f, out);
    if (gof->parsed()) cmd_gof(f, out);
    if (simulate->parsed()) cmd_simulate(f, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace gbias::cli
