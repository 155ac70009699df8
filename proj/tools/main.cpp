// Batch front-end: build, summary, regress, var, synth, quantile-bounds.
// Exit codes: 0 success, 2 input/schema error, 3 model error, 4 threshold abort.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "btcpanel/csv.hpp"
#include "btcpanel/digest.hpp"
#include "btcpanel/errors.hpp"
#include "btcpanel/ingest.hpp"
#include "btcpanel/pipeline.hpp"

namespace fs = std::filesystem;
using namespace btcpanel;

namespace {

TimeFe time_fe_from_flag(const std::string& s) {
  if (s == "none") return TimeFe::None;
  if (s == "biweek") return TimeFe::Biweek;
  if (s == "month") return TimeFe::Month;
  throw ConfigError("--time-fe must be none, biweek or month");
}

void write_text(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << content;
}

// Digest manifest for the files a subcommand produced.
void write_command_manifest(const fs::path& out_dir, const std::string& command,
                            const std::vector<fs::path>& files) {
  nlohmann::json j;
  j["command"] = command;
  nlohmann::json entries = nlohmann::json::object();
  for (const fs::path& p : files) entries[p.filename().string()] = digest_file(p.string());
  j["files"] = entries;
  write_text(out_dir / (command + "_manifest.json"), j.dump(2) + "\n");
}

struct Overrides {
  std::string config_path;
  std::string out_dir;
  std::string panel_path;
  double delta = -1;
  std::string time_fe;
  long long seed = -1;
};

RunConfig resolve_config(const Overrides& o) {
  RunConfig cfg;
  if (!o.config_path.empty()) cfg = load_run_config(o.config_path);
  if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
  if (o.delta >= 0) cfg.delta = o.delta;
  if (!o.time_fe.empty()) {
    TimeFe fe = time_fe_from_flag(o.time_fe);
    cfg.micro_time_fe = fe;
    cfg.cost_time_fe = fe;
  }
  if (o.seed >= 0) cfg.seed = static_cast<std::uint64_t>(o.seed);
  cfg.validate();
  return cfg;
}

fs::path resolve_panel(const Overrides& o, const RunConfig& cfg) {
  if (!o.panel_path.empty()) return o.panel_path;
  return cfg.out_dir / "panel.csv";
}

int run(int argc, char** argv) {
  CLI::App app{"Shadow-rate and BTC-premium panel pipeline"};
  app.require_subcommand(1);
  Overrides o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "key = value run configuration file");
    sub->add_option("--out", o.out_dir, "output directory (overrides config)");
  };

  auto* build = app.add_subcommand(
      "build", "ingest inputs and emit daily prices, series, regulatory data and panel");
  add_common(build);

  auto* summary =
      app.add_subcommand("summary", "pooled / per-currency / per-year premium statistics");
  add_common(summary);
  summary->add_option("--panel", o.panel_path, "panel CSV (default <out>/panel.csv)");

  auto* regress = app.add_subcommand("regress", model_catalog_help());
  add_common(regress);
  regress->add_option("--panel", o.panel_path, "panel CSV (default <out>/panel.csv)");
  std::string model_id;
  regress->add_option("--model", model_id, "model id (micro-1..6, cost-1..4)")->required();
  regress->add_option("--delta", o.delta, "constrained-dummy threshold override");
  regress->add_option("--time-fe", o.time_fe, "none, biweek or month (overrides both families)");

  auto* var = app.add_subcommand(
      "var", "panel VAR of depreciation and premium on a constraint group");
  add_common(var);
  var->add_option("--panel", o.panel_path, "panel CSV (default <out>/panel.csv)");
  std::string group = "unconstrained";
  int lags = 1;
  var->add_option("--group", group, "unconstrained or constrained");
  var->add_option("--lags", lags, "lag order (1 or 2)");
  var->add_option("--delta", o.delta, "constrained-dummy threshold override");

  auto* synth = app.add_subcommand("synth", dgp_spec_keys_help());
  add_common(synth);
  std::string spec_path, kind_name = "trades";
  synth->add_option("--spec", spec_path, "DGP spec file (key = value)");
  synth->add_option("--kind", kind_name, "trades, friction or var");
  synth->add_option("--seed", o.seed, "seed override");

  auto* qb = app.add_subcommand(
      "quantile-bounds", "pooled 1%/99% quantiles of the vw/median price ratio");
  add_common(qb);
  std::string trades_path;
  qb->add_option("--trades", trades_path, "trades CSV (default from config)");

  CLI11_PARSE(app, argc, argv);

  RunConfig cfg = resolve_config(o);
  fs::create_directories(cfg.out_dir);

  if (build->parsed()) {
    BuildArtifacts a = cmd_build(cfg);
    std::cout << "built " << a.n_panel_rows << " panel rows from " << a.n_trades
              << " trades (" << a.n_rejected << " rejected, " << a.n_corrected_buckets
              << " corrected buckets)\n"
              << "manifest: " << a.manifest.string() << '\n';
  } else if (summary->parsed()) {
    auto panel = load_panel(resolve_panel(o, cfg));
    SummaryResult s = cmd_summary(panel);
    std::ostringstream ss;
    write_summary(ss, s);
    fs::path out = cfg.out_dir / "summary.json";
    write_text(out, ss.str());
    write_command_manifest(cfg.out_dir, "summary", {out});
    std::cout << ss.str();
  } else if (regress->parsed()) {
    auto panel = load_panel(resolve_panel(o, cfg));
    FitResult fit = cmd_regress(panel, model_id, cfg);
    std::ostringstream csv, js;
    write_fit_csv(csv, fit);
    write_fit_json(js, fit, model_id);
    fs::path csv_path = cfg.out_dir / ("fit_" + model_id + ".csv");
    fs::path js_path = cfg.out_dir / ("fit_" + model_id + ".json");
    write_text(csv_path, csv.str());
    write_text(js_path, js.str());
    write_command_manifest(cfg.out_dir, "regress_" + model_id, {csv_path, js_path});
    std::cout << csv.str();
  } else if (var->parsed()) {
    auto rows = load_panel(resolve_panel(o, cfg));
    if (o.delta >= 0)
      for (WeeklyPanelRow& r : rows)
        if (r.peg && r.cc) r.constrained = constrained_dummy(*r.peg, *r.cc, cfg.delta);
    PanelVarResult result = cmd_var(rows, group, lags);
    std::ostringstream csv, js;
    write_var_csv(csv, result);
    write_var_json(js, result, group);
    std::string stem = "var_" + group + "_l" + std::to_string(lags);
    fs::path csv_path = cfg.out_dir / (stem + ".csv");
    fs::path js_path = cfg.out_dir / (stem + ".json");
    write_text(csv_path, csv.str());
    write_text(js_path, js.str());
    write_command_manifest(cfg.out_dir, stem, {csv_path, js_path});
    std::cout << csv.str();
  } else if (synth->parsed()) {
    DgpSpec spec;
    if (!spec_path.empty()) {
      std::ifstream in(spec_path);
      if (!in) throw ConfigError("cannot open spec: " + spec_path);
      spec = parse_dgp_spec(in);
    }
    if (o.seed >= 0) spec.seed = static_cast<std::uint64_t>(o.seed);
    SynthKind kind;
    if (kind_name == "trades") kind = SynthKind::Trades;
    else if (kind_name == "friction") kind = SynthKind::Friction;
    else if (kind_name == "var") kind = SynthKind::Var;
    else throw ConfigError("--kind must be trades, friction or var");
    SynthArtifacts a = cmd_synth(spec, kind, cfg.out_dir, cfg.ratio_bounds);
    for (const fs::path& p : a.files) std::cout << p.string() << '\n';
    std::cout << a.manifest.string() << '\n';
  } else if (qb->parsed()) {
    fs::path source = trades_path.empty() ? cfg.trades : fs::path(trades_path);
    if (source.empty()) throw ConfigError("quantile-bounds needs --trades or a config");
    std::ifstream in(source, std::ios::binary);
    if (!in) throw ConfigError("cannot open trades: " + source.string());
    CurrencyRegistry registry;
    if (!cfg.registry.empty()) {
      std::ifstream reg(cfg.registry);
      if (!reg) throw ConfigError("cannot open registry: " + cfg.registry.string());
      registry = parse_registry(reg);
    }
    ParseResult<Trade> trades = parse_trades(in, registry);
    RatioBounds b = ratio_quantile_bounds(trades.rows);
    std::cout << "lower=" << format_decimal(b.lower) << '\n'
              << "upper=" << format_decimal(b.upper) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ThresholdAbort& e) {
    std::cerr << "abort: " << e.what() << '\n';
    return 4;
  } catch (const ModelError& e) {
    std::cerr << "model error: " << e.what() << '\n';
    return 3;
  } catch (const SchemaError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
