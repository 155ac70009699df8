#include "btcpanel/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "btcpanel/csv.hpp"
#include "btcpanel/digest.hpp"
#include "btcpanel/errors.hpp"
#include "btcpanel/ingest.hpp"
#include "btcpanel/stats.hpp"

namespace btcpanel {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

TimeFe parse_time_fe(const std::string& s) {
  if (s == "none") return TimeFe::None;
  if (s == "biweek") return TimeFe::Biweek;
  if (s == "month") return TimeFe::Month;
  throw ConfigError("time_fe must be none, biweek or month; got " + s);
}

std::string time_fe_name(TimeFe fe) {
  switch (fe) {
    case TimeFe::None: return "none";
    case TimeFe::Biweek: return "biweek";
    case TimeFe::Month: return "month";
  }
  return "?";
}

double midpoint_median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

void RunConfig::validate() const {
  if (!(ratio_bounds.lower < 1.0 && 1.0 < ratio_bounds.upper))
    throw ConfigError("ratio bounds must satisfy lower < 1 < upper");
  if (delta < 0 || delta > 1) throw ConfigError("delta must lie in [0,1]");
  if (rejection_threshold < 0 || rejection_threshold > 1)
    throw ConfigError("rejection_threshold must lie in [0,1]");
}

std::string RunConfig::canonical_text() const {
  std::ostringstream ss;
  ss << "trades=" << trades.string() << '\n'
     << "oer=" << oer.string() << '\n'
     << "areaer_flags=" << areaer_flags.string() << '\n'
     << "areaer_regime=" << areaer_regime.string() << '\n'
     << "remittance=" << remittance.string() << '\n'
     << "freedom=" << freedom.string() << '\n'
     << "bars=" << bars.string() << '\n'
     << "blockchain=" << blockchain.string() << '\n'
     << "registry=" << registry.string() << '\n'
     << "out_dir=" << out_dir.string() << '\n'
     << "ratio_lower=" << format_decimal(ratio_bounds.lower) << '\n'
     << "ratio_upper=" << format_decimal(ratio_bounds.upper) << '\n'
     << "delta=" << format_decimal(delta) << '\n'
     << "micro_time_fe=" << time_fe_name(micro_time_fe) << '\n'
     << "cost_time_fe=" << time_fe_name(cost_time_fe) << '\n'
     << "weekly_aggregation="
     << (weekly_aggregation == WeeklyAggregation::Mean ? "mean" : "volume_weighted")
     << '\n'
     << "rejection_threshold=" << format_decimal(rejection_threshold) << '\n'
     << "seed=" << seed << '\n';
  return ss.str();
}

RunConfig parse_run_config(std::istream& source) {
  RunConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(source, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t") != std::string::npos)
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": expected key = value");
      continue;
    }
    auto trim = [](std::string s) {
      std::size_t b = s.find_first_not_of(" \t");
      std::size_t e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key == "trades") cfg.trades = value;
    else if (key == "oer") cfg.oer = value;
    else if (key == "areaer_flags") cfg.areaer_flags = value;
    else if (key == "areaer_regime") cfg.areaer_regime = value;
    else if (key == "remittance") cfg.remittance = value;
    else if (key == "freedom") cfg.freedom = value;
    else if (key == "bars") cfg.bars = value;
    else if (key == "blockchain") cfg.blockchain = value;
    else if (key == "registry") cfg.registry = value;
    else if (key == "out_dir") cfg.out_dir = value;
    else if (key == "ratio_lower") cfg.ratio_bounds.lower = std::stod(value);
    else if (key == "ratio_upper") cfg.ratio_bounds.upper = std::stod(value);
    else if (key == "delta") cfg.delta = std::stod(value);
    else if (key == "micro_time_fe") cfg.micro_time_fe = parse_time_fe(value);
    else if (key == "cost_time_fe") cfg.cost_time_fe = parse_time_fe(value);
    else if (key == "weekly_aggregation") {
      if (value == "mean") cfg.weekly_aggregation = WeeklyAggregation::Mean;
      else if (value == "volume_weighted")
        cfg.weekly_aggregation = WeeklyAggregation::VolumeWeighted;
      else throw ConfigError("weekly_aggregation must be mean or volume_weighted");
    } else if (key == "rejection_threshold") cfg.rejection_threshold = std::stod(value);
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(std::stoull(value));
    else throw ConfigError("unknown config key: " + key);
  }
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path.string());
  return parse_run_config(in);
}

namespace {

std::ifstream open_input(const fs::path& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(std::string("cannot open ") + what + ": " + path.string());
  return in;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << content;
}

struct RejectionLog {
  std::vector<std::pair<std::string, Rejection>> entries;

  template <typename T>
  void absorb(const std::string& input, const ParseResult<T>& result,
              double threshold) {
    for (const Rejection& r : result.rejections) entries.emplace_back(input, r);
    std::size_t total = result.input_rows();
    if (total > 0 &&
        static_cast<double>(result.rejections.size()) >
            threshold * static_cast<double>(total))
      throw ThresholdAbort("rejection threshold exceeded for " + input + ": " +
                           std::to_string(result.rejections.size()) + " of " +
                           std::to_string(total) + " rows rejected");
  }

  std::string to_csv() const {
    std::ostringstream ss;
    ss << "input,line,reason,raw\n";
    for (const auto& [input, r] : entries)
      ss << input << ',' << r.line << ',' << r.reason << ',' << r.raw << '\n';
    return ss.str();
  }
};

}  // namespace

BuildArtifacts cmd_build(const RunConfig& config) {
  config.validate();
  if (config.trades.empty() || config.oer.empty() || config.registry.empty())
    throw ConfigError("cmd_build requires trades, oer and registry paths");
  fs::create_directories(config.out_dir);

  RejectionLog rejections;
  auto registry_stream = open_input(config.registry, "registry");
  CurrencyRegistry registry = parse_registry(registry_stream);

  auto trades_stream = open_input(config.trades, "trades");
  auto trades = parse_trades(trades_stream, registry);
  if (trades.rows.empty()) {
    write_file(config.out_dir / "rejections.csv", rejections.to_csv());
    throw ThresholdAbort("no trade data");
  }
  rejections.absorb("trades", trades, config.rejection_threshold);

  auto oer_stream = open_input(config.oer, "oer");
  auto oer = parse_oer(oer_stream);
  rejections.absorb("oer", oer, config.rejection_threshold);

  ParseResult<AreaerRecord> areaer;
  if (!config.areaer_flags.empty()) {
    auto flags_stream = open_input(config.areaer_flags, "areaer_flags");
    auto regime_stream = open_input(config.areaer_regime, "areaer_regime");
    areaer = parse_areaer(flags_stream, regime_stream);
    rejections.absorb("areaer", areaer, config.rejection_threshold);
  }
  ParseResult<RemittanceQuote> remittance;
  if (!config.remittance.empty()) {
    auto s = open_input(config.remittance, "remittance");
    remittance = parse_remittance(s);
    rejections.absorb("remittance", remittance, config.rejection_threshold);
  }
  ParseResult<FreedomScore> freedom;
  if (!config.freedom.empty()) {
    auto s = open_input(config.freedom, "freedom");
    freedom = parse_freedom(s);
    rejections.absorb("freedom", freedom, config.rejection_threshold);
  }
  ParseResult<MarketBar> bars;
  if (!config.bars.empty()) {
    auto s = open_input(config.bars, "bars");
    bars = parse_market_bars(s);
    rejections.absorb("bars", bars, config.rejection_threshold);
  }
  ParseResult<BlockchainMetrics> blockchain;
  if (!config.blockchain.empty()) {
    auto s = open_input(config.blockchain, "blockchain");
    blockchain = parse_blockchain(s);
    rejections.absorb("blockchain", blockchain, config.rejection_threshold);
  }

  auto daily = aggregate_daily(trades.rows, config.ratio_bounds);
  std::size_t corrected = 0;
  for (const DailyPrice& p : daily) corrected += p.corrected ? 1 : 0;

  Date start = trades.rows.front().timestamp.date(), end = start;
  for (const Trade& t : trades.rows) {
    start = std::min(start, t.timestamp.date());
    end = std::max(end, t.timestamp.date());
  }
  RegulatoryOptions reg_options;
  reg_options.delta = config.delta;
  auto regulatory = build_regulatory_daily(areaer.rows, remittance.rows, freedom.rows,
                                           start, end, reg_options);

  PanelOptions panel_options;
  panel_options.aggregation = config.weekly_aggregation;
  PanelBuildReport report;
  auto panel = build_weekly_panel(daily, oer.rows, blockchain.rows, bars.rows,
                                  regulatory, panel_options, &report);

  FilledOer filled(oer.rows, panel_options.oer_fill_limit_days);
  auto series = build_series(daily, filled);

  BuildArtifacts artifacts;
  artifacts.daily_prices = config.out_dir / "daily_prices.csv";
  artifacts.series = config.out_dir / "series.csv";
  artifacts.regulatory = config.out_dir / "regulatory.csv";
  artifacts.panel = config.out_dir / "panel.csv";
  artifacts.manifest = config.out_dir / "manifest.json";
  artifacts.n_trades = trades.rows.size();
  artifacts.n_rejected = rejections.entries.size();
  artifacts.n_corrected_buckets = corrected;
  artifacts.n_panel_rows = panel.size();

  {
    std::ostringstream ss;
    write_daily_prices(ss, daily);
    write_file(artifacts.daily_prices, ss.str());
  }
  {
    std::ostringstream ss;
    write_series(ss, series);
    write_file(artifacts.series, ss.str());
  }
  {
    std::ostringstream ss;
    write_regulatory(ss, regulatory);
    write_file(artifacts.regulatory, ss.str());
  }
  {
    std::ostringstream ss;
    write_panel(ss, panel);
    write_file(artifacts.panel, ss.str());
  }
  write_file(config.out_dir / "rejections.csv", rejections.to_csv());

  json manifest;
  manifest["config_digest"] = digest_hex(config.canonical_text());
  json inputs = json::object();
  auto add_input = [&](const char* name, const fs::path& p) {
    if (!p.empty()) inputs[name] = {{"path", p.string()}, {"digest", digest_file(p.string())}};
  };
  add_input("trades", config.trades);
  add_input("oer", config.oer);
  add_input("areaer_flags", config.areaer_flags);
  add_input("areaer_regime", config.areaer_regime);
  add_input("remittance", config.remittance);
  add_input("freedom", config.freedom);
  add_input("bars", config.bars);
  add_input("blockchain", config.blockchain);
  add_input("registry", config.registry);
  manifest["inputs"] = inputs;
  manifest["rows"] = {{"trades", trades.rows.size()},
                      {"oer", oer.rows.size()},
                      {"daily_prices", daily.size()},
                      {"series", series.size()},
                      {"regulatory", regulatory.size()},
                      {"panel", panel.size()}};
  manifest["corrected_buckets"] = corrected;
  manifest["rejections"] = rejections.entries.size();
  manifest["excluded_no_oer"] = report.excluded_no_oer;
  json outputs = json::object();
  for (const fs::path& p : {artifacts.daily_prices, artifacts.series,
                            artifacts.regulatory, artifacts.panel})
    outputs[p.filename().string()] = digest_file(p.string());
  manifest["outputs"] = outputs;
  write_file(artifacts.manifest, manifest.dump(2) + "\n");
  return artifacts;
}

SummaryResult cmd_summary(std::span<const WeeklyPanelRow> panel) {
  SummaryResult s;
  std::vector<double> pooled;
  std::map<Currency, std::vector<double>> by_currency;
  std::map<int, std::vector<double>> by_year;
  std::vector<double> con, uncon;
  for (const WeeklyPanelRow& r : panel) {
    pooled.push_back(r.premium_pct);
    by_currency[r.currency].push_back(r.premium_pct);
    by_year[iso_week(week_monday(r.week)).year].push_back(r.premium_pct);
    if (r.constrained) (*r.constrained ? con : uncon).push_back(r.premium_pct);
  }
  if (pooled.empty()) return s;
  s.n = pooled.size();
  s.min = *std::min_element(pooled.begin(), pooled.end());
  s.max = *std::max_element(pooled.begin(), pooled.end());
  double sum = 0, nonneg = 0;
  for (double p : pooled) {
    sum += p;
    if (p >= 0) nonneg += 1;
  }
  s.mean = sum / static_cast<double>(s.n);
  s.median = midpoint_median(pooled);
  s.share_nonnegative = 100.0 * nonneg / static_cast<double>(s.n);
  for (auto& [ccy, v] : by_currency) s.per_currency_median[ccy] = midpoint_median(v);
  for (auto& [year, v] : by_year) s.per_year_median[year] = midpoint_median(v);
  auto group = [](const std::vector<double>& v) {
    GroupSummary g;
    g.n = v.size();
    if (v.empty()) return g;
    double total = 0;
    for (double x : v) total += x;
    g.mean = total / static_cast<double>(v.size());
    g.median = midpoint_median(v);
    return g;
  };
  s.constrained = group(con);
  s.unconstrained = group(uncon);
  return s;
}

void write_summary(std::ostream& out, const SummaryResult& s) {
  json j;
  j["pooled"] = {{"n", s.n},
                 {"min", s.min},
                 {"max", s.max},
                 {"mean", s.mean},
                 {"median", s.median},
                 {"share_nonnegative_pct", s.share_nonnegative}};
  j["per_currency_median"] = s.per_currency_median;
  json years = json::object();
  for (const auto& [year, m] : s.per_year_median) years[std::to_string(year)] = m;
  j["per_year_median"] = years;
  j["constrained"] = {{"n", s.constrained.n},
                      {"mean", s.constrained.mean},
                      {"median", s.constrained.median}};
  j["unconstrained"] = {{"n", s.unconstrained.n},
                        {"mean", s.unconstrained.mean},
                        {"median", s.unconstrained.median}};
  out << j.dump(2) << '\n';
}

RegressionSpec model_spec(const std::string& model_id, TimeFe micro_fe, TimeFe cost_fe) {
  RegressionSpec spec;
  spec.dependent = "premium_pct";
  spec.dependent_lags = {1, 2};
  spec.unit_fe = true;
  if (model_id == "micro-1") spec.regressors = {"median_confirm_minutes"};
  else if (model_id == "micro-2") spec.regressors = {"avg_fee_usd"};
  else if (model_id == "micro-3") spec.regressors = {"n_transactions"};
  else if (model_id == "micro-4") spec.regressors = {"btc_volatility"};
  else if (model_id == "micro-5") spec.regressors = {"btc_return"};
  else if (model_id == "micro-6")
    spec.regressors = {"median_confirm_minutes", "avg_fee_usd", "n_transactions",
                       "btc_volatility", "btc_return"};
  else if (model_id == "cost-1") spec.regressors = {"remittance_cost_pct"};
  else if (model_id == "cost-2" || model_id == "cost-3" || model_id == "cost-4") {
    spec.regressors = {"remittance_cost_pct", "constrained"};
    spec.interactions = {{"remittance_cost_pct", "constrained"}};
    if (model_id == "cost-3" || model_id == "cost-4")
      spec.regressors.push_back("freedom_score");
    if (model_id == "cost-4") spec.regressors.push_back("depr_pct");
  } else {
    throw ConfigError("unknown model id: " + model_id + " (expected micro-1..6 or cost-1..4)");
  }
  spec.time_fe = model_id.starts_with("micro") ? micro_fe : cost_fe;
  return spec;
}

std::string model_catalog_help() {
  return "model ids:\n"
         "  micro-1  blockchain median confirmation time\n"
         "  micro-2  blockchain average fee (USD)\n"
         "  micro-3  blockchain transaction count\n"
         "  micro-4  BTC hourly-volatility (weekly sum)\n"
         "  micro-5  weekly BTC return\n"
         "  micro-6  all five factors jointly\n"
         "  cost-1   remittance cost\n"
         "  cost-2   cost + constrained dummy + interaction\n"
         "  cost-3   cost-2 + financial freedom score\n"
         "  cost-4   cost-3 + OER depreciation\n"
         "all models include premium lags 1 and 2 and currency fixed effects;\n"
         "micro models default to bi-week time effects, cost models to month";
}

namespace {

// Recompute the constrained dummy from peg and cc at the configured delta so
// threshold overrides change group assignment consistently.
std::vector<WeeklyPanelRow> apply_delta(std::span<const WeeklyPanelRow> panel,
                                        double delta) {
  std::vector<WeeklyPanelRow> rows(panel.begin(), panel.end());
  for (WeeklyPanelRow& r : rows)
    if (r.peg && r.cc) r.constrained = constrained_dummy(*r.peg, *r.cc, delta);
  return rows;
}

}  // namespace

FitResult cmd_regress(std::span<const WeeklyPanelRow> panel, const std::string& model_id,
                      const RunConfig& config) {
  auto rows = apply_delta(panel, config.delta);
  RegressionSpec spec = model_spec(model_id, config.micro_time_fe, config.cost_time_fe);
  PanelTable table = to_table(rows);
  for (const std::string& col : spec.regressors)
    if (!table.has_column(col) && col.find(':') == std::string::npos)
      throw ModelError("panel lacks required column: " + col);
  return fit_fe_ols(table, spec);
}

void write_fit_csv(std::ostream& out, const FitResult& fit) {
  out << "regressor,coefficient,se,t,p\n";
  for (const std::string& name : fit.regressor_order)
    out << name << ',' << format_decimal(fit.coefficients.at(name)) << ','
        << format_decimal(fit.standard_errors.at(name)) << ','
        << format_decimal(fit.t_stats.at(name)) << ','
        << format_decimal(fit.p_values.at(name)) << '\n';
}

void write_fit_json(std::ostream& out, const FitResult& fit,
                    const std::string& model_id) {
  json j;
  j["model"] = model_id;
  json rows = json::array();
  for (const std::string& name : fit.regressor_order)
    rows.push_back({{"regressor", name},
                    {"coefficient", fit.coefficients.at(name)},
                    {"se", fit.standard_errors.at(name)},
                    {"t", fit.t_stats.at(name)},
                    {"p", fit.p_values.at(name)}});
  j["coefficients"] = rows;
  j["r_squared"] = fit.r_squared;
  j["n_obs"] = fit.n_obs;
  j["n_dropped"] = fit.n_dropped;
  j["n_clusters"] = fit.n_clusters;
  j["condition_warning"] = fit.condition_warning;
  out << j.dump(2) << '\n';
}

PanelVarResult cmd_var(std::span<const WeeklyPanelRow> panel, const std::string& group,
                       int lags) {
  if (lags < 1 || lags > 2) throw ConfigError("lags must be 1 or 2");
  PanelTable table = to_table(panel);
  auto [unconstrained, constrained] = split_by_constraint(table);
  const PanelTable* chosen;
  if (group == "unconstrained") chosen = &unconstrained;
  else if (group == "constrained") chosen = &constrained;
  else throw ConfigError("group must be unconstrained or constrained");
  if (chosen->n_rows() == 0) throw ModelError("empty group: " + group);
  return panel_var(*chosen, {"depr_pct", "premium_pct"}, lags);
}

void write_var_csv(std::ostream& out, const PanelVarResult& r) {
  out << "equation,regressor,coefficient,se,t,p\n";
  for (std::size_t eq = 0; eq < r.equations.size(); ++eq) {
    const GmmResult& g = r.equations[eq];
    int col = 0;
    for (std::size_t v = 0; v < r.variables.size(); ++v)
      for (int lag = 1; lag <= r.lag_order; ++lag, ++col) {
        double b = g.coef[col];
        double se = g.se[col];
        double t = se > 0 ? b / se : 0;
        out << r.variables[eq] << ',' << r.variables[v] << "_lag" << lag << ','
            << format_decimal(b) << ',' << format_decimal(se) << ','
            << format_decimal(t) << ',' << format_decimal(normal_two_sided_p(t)) << '\n';
      }
  }
}

void write_var_json(std::ostream& out, const PanelVarResult& r,
                    const std::string& group) {
  json j;
  j["group"] = group;
  j["lag_order"] = r.lag_order;
  j["variables"] = r.variables;
  json eqs = json::array();
  for (std::size_t eq = 0; eq < r.equations.size(); ++eq) {
    const GmmResult& g = r.equations[eq];
    json je;
    je["dependent"] = r.variables[eq];
    json coefs = json::array();
    int col = 0;
    for (std::size_t v = 0; v < r.variables.size(); ++v)
      for (int lag = 1; lag <= r.lag_order; ++lag, ++col)
        coefs.push_back({{"regressor", r.variables[v] + "_lag" + std::to_string(lag)},
                         {"coefficient", g.coef[col]},
                         {"se", g.se[col]}});
    je["coefficients"] = coefs;
    je["hansen_j"] = g.hansen_j;
    je["hansen_df"] = g.hansen_df;
    je["hansen_p"] = g.hansen_p;
    je["exactly_identified"] = g.exactly_identified;
    je["n_obs"] = g.n_obs;
    je["n_instruments"] = g.n_instruments;
    eqs.push_back(std::move(je));
  }
  j["equations"] = eqs;
  out << j.dump(2) << '\n';
}

SynthArtifacts cmd_synth(const DgpSpec& spec, SynthKind kind, const fs::path& out_dir,
                         RatioBounds bounds) {
  fs::create_directories(out_dir);
  SynthArtifacts artifacts;
  auto emit = [&](const fs::path& name, const std::string& content) {
    fs::path p = out_dir / name;
    write_file(p, content);
    artifacts.files.push_back(p);
  };
  if (kind == SynthKind::Trades) {
    TradeDataset data = gen_trades(spec, bounds);
    {
      std::ostringstream ss;
      write_trades(ss, data.trades);
      emit("trades.csv", ss.str());
    }
    {
      std::ostringstream ss;
      write_bucket_truth(ss, data.truth);
      emit("trades_truth.csv", ss.str());
    }
    {
      std::ostringstream ss;
      for (const Currency& c : data.registry) ss << c << '\n';
      emit("registry.txt", ss.str());
    }
  } else {
    PanelDataset data =
        kind == SynthKind::Friction ? gen_friction_panel(spec) : gen_var_panel(spec);
    const char* base = kind == SynthKind::Friction ? "panel" : "var_panel";
    {
      std::ostringstream ss;
      write_panel(ss, data.rows);
      emit(std::string(base) + ".csv", ss.str());
    }
    {
      std::ostringstream ss;
      write_coefficient_truth(ss, data.truth);
      emit(std::string(base) + "_truth.csv", ss.str());
    }
  }
  json manifest;
  manifest["seed"] = spec.seed;
  json files = json::object();
  for (const fs::path& p : artifacts.files)
    files[p.filename().string()] = digest_file(p.string());
  manifest["files"] = files;
  artifacts.manifest = out_dir / "manifest.json";
  write_file(artifacts.manifest, manifest.dump(2) + "\n");
  return artifacts;
}

std::vector<WeeklyPanelRow> load_panel(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open panel: " + path.string());
  return read_panel(in);
}

}  // namespace btcpanel
