// Python bindings over the pipeline entry points. Structured results cross
// the boundary as JSON strings; the package wrapper decodes them.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <sstream>

#include "btcpanel/dates.hpp"
#include "btcpanel/ingest.hpp"
#include "btcpanel/pipeline.hpp"
#include "btcpanel/stats.hpp"

namespace py = pybind11;
using namespace btcpanel;

namespace {

RunConfig config_from(const std::string& config_path, const std::string& out_dir,
                      double delta, const std::string& time_fe) {
  RunConfig cfg;
  if (!config_path.empty()) cfg = load_run_config(config_path);
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  if (delta >= 0) cfg.delta = delta;
  if (!time_fe.empty()) {
    TimeFe fe;
    if (time_fe == "none") fe = TimeFe::None;
    else if (time_fe == "biweek") fe = TimeFe::Biweek;
    else if (time_fe == "month") fe = TimeFe::Month;
    else throw ConfigError("time_fe must be none, biweek or month");
    cfg.micro_time_fe = fe;
    cfg.cost_time_fe = fe;
  }
  cfg.validate();
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_btcpanel, m) {
  m.doc() = "shadow-rate and BTC-premium panel pipeline";

  py::register_exception<ThresholdAbort>(m, "ThresholdAbort");
  py::register_exception<SchemaError>(m, "SchemaError");
  py::register_exception<ModelError>(m, "ModelError");
  py::register_exception<ConfigError>(m, "ConfigurationError");
  py::register_exception<DomainError>(m, "DomainValueError");

  m.def(
      "build",
      [](const std::string& config_path, const std::string& out_dir) {
        BuildArtifacts a = cmd_build(config_from(config_path, out_dir, -1, ""));
        py::dict d;
        d["panel"] = a.panel.string();
        d["manifest"] = a.manifest.string();
        d["n_trades"] = a.n_trades;
        d["n_rejected"] = a.n_rejected;
        d["n_corrected_buckets"] = a.n_corrected_buckets;
        d["n_panel_rows"] = a.n_panel_rows;
        return d;
      },
      py::arg("config_path"), py::arg("out_dir") = "");

  m.def(
      "summary_json",
      [](const std::string& panel_path) {
        auto panel = load_panel(panel_path);
        std::ostringstream ss;
        write_summary(ss, cmd_summary(panel));
        return ss.str();
      },
      py::arg("panel_path"));

  m.def(
      "regress_json",
      [](const std::string& panel_path, const std::string& model_id, double delta,
         const std::string& time_fe) {
        RunConfig cfg = config_from("", "", delta, time_fe);
        auto panel = load_panel(panel_path);
        FitResult fit = cmd_regress(panel, model_id, cfg);
        std::ostringstream ss;
        write_fit_json(ss, fit, model_id);
        return ss.str();
      },
      py::arg("panel_path"), py::arg("model_id"), py::arg("delta") = -1.0,
      py::arg("time_fe") = "");

  m.def(
      "var_json",
      [](const std::string& panel_path, const std::string& group, int lags) {
        auto panel = load_panel(panel_path);
        PanelVarResult r = cmd_var(panel, group, lags);
        std::ostringstream ss;
        write_var_json(ss, r, group);
        return ss.str();
      },
      py::arg("panel_path"), py::arg("group") = "unconstrained", py::arg("lags") = 1);

  m.def(
      "synth",
      [](const std::string& kind, const std::string& out_dir,
         const std::string& spec_text) {
        DgpSpec spec;
        if (!spec_text.empty()) {
          std::istringstream in(spec_text);
          spec = parse_dgp_spec(in);
        }
        SynthKind k;
        if (kind == "trades") k = SynthKind::Trades;
        else if (kind == "friction") k = SynthKind::Friction;
        else if (kind == "var") k = SynthKind::Var;
        else throw ConfigError("kind must be trades, friction or var");
        SynthArtifacts a = cmd_synth(spec, k, out_dir);
        std::vector<std::string> files;
        for (const auto& p : a.files) files.push_back(p.string());
        return files;
      },
      py::arg("kind"), py::arg("out_dir"), py::arg("spec_text") = "");

  m.def("premium", &premium, py::arg("shadow_rate"), py::arg("official_rate"));
  m.def("depreciation", &depreciation, py::arg("open_rate"), py::arg("close_rate"));
  m.def(
      "fod",
      [](const std::vector<double>& series) { return fod_transform(series); },
      py::arg("series"));
  m.def("chi2_upper_tail", &chi2_upper_tail, py::arg("x"), py::arg("df"));
  m.def("week_id", &week_id, py::arg("week_serial"));
  m.def(
      "quantile_bounds",
      [](const std::string& trades_path) {
        std::ifstream in(trades_path, std::ios::binary);
        if (!in) throw ConfigError("cannot open trades: " + trades_path);
        auto trades = parse_trades(in, CurrencyRegistry{});
        RatioBounds b = ratio_quantile_bounds(trades.rows);
        return py::make_tuple(b.lower, b.upper);
      },
      py::arg("trades_path"));
}
