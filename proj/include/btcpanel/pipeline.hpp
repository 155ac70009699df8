#pragma once

#include <filesystem>
#include <istream>
#include <map>

#include "btcpanel/econometrics.hpp"
#include "btcpanel/pricing.hpp"
#include "btcpanel/regulation.hpp"
#include "btcpanel/synth.hpp"
#include "btcpanel/types.hpp"

namespace btcpanel {

// Rejection share above the configured threshold, or an unusable input.
struct ThresholdAbort : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Run configuration, plain-text key = value; CLI flags override.
struct RunConfig {
  std::filesystem::path trades;
  std::filesystem::path oer;
  std::filesystem::path areaer_flags;
  std::filesystem::path areaer_regime;
  std::filesystem::path remittance;
  std::filesystem::path freedom;
  std::filesystem::path bars;
  std::filesystem::path blockchain;
  std::filesystem::path registry;
  std::filesystem::path out_dir = "out";

  RatioBounds ratio_bounds;
  double delta = 0.7;
  TimeFe micro_time_fe = TimeFe::Biweek;
  TimeFe cost_time_fe = TimeFe::Month;
  WeeklyAggregation weekly_aggregation = WeeklyAggregation::Mean;
  double rejection_threshold = 0.01;  // abort above this share of rejected rows
  std::uint64_t seed = 1;

  void validate() const;
  std::string canonical_text() const;  // normalized form hashed into manifests
};

RunConfig parse_run_config(std::istream& source);
RunConfig load_run_config(const std::filesystem::path& path);

struct BuildArtifacts {
  std::filesystem::path daily_prices;
  std::filesystem::path series;
  std::filesystem::path regulatory;
  std::filesystem::path panel;
  std::filesystem::path manifest;
  std::size_t n_trades = 0;
  std::size_t n_rejected = 0;
  std::size_t n_corrected_buckets = 0;
  std::size_t n_panel_rows = 0;
};

// ingest -> daily prices -> series -> regulatory -> weekly panel, with a run
// manifest (config hash, input digests, row counts, correction/rejection
// statistics, output digests).
BuildArtifacts cmd_build(const RunConfig& config);

struct GroupSummary {
  std::size_t n = 0;
  double mean = 0;
  double median = 0;
};

struct SummaryResult {
  std::size_t n = 0;
  double min = 0, max = 0, mean = 0, median = 0;
  double share_nonnegative = 0;
  std::map<Currency, double> per_currency_median;
  std::map<int, double> per_year_median;
  GroupSummary constrained;
  GroupSummary unconstrained;
};

SummaryResult cmd_summary(std::span<const WeeklyPanelRow> panel);
void write_summary(std::ostream& out, const SummaryResult& s);

// Model ids: micro-1..6 (blockchain / market factors, bi-week
// time effects) and cost-1..4 (remittance cost and frictions, month time
// effects).
RegressionSpec model_spec(const std::string& model_id, TimeFe micro_fe, TimeFe cost_fe);
std::string model_catalog_help();

FitResult cmd_regress(std::span<const WeeklyPanelRow> panel, const std::string& model_id,
                      const RunConfig& config);

void write_fit_csv(std::ostream& out, const FitResult& fit);
void write_fit_json(std::ostream& out, const FitResult& fit, const std::string& model_id);

PanelVarResult cmd_var(std::span<const WeeklyPanelRow> panel, const std::string& group,
                       int lags);
void write_var_csv(std::ostream& out, const PanelVarResult& result);
void write_var_json(std::ostream& out, const PanelVarResult& result,
                    const std::string& group);

enum class SynthKind { Trades, Friction, Var };

struct SynthArtifacts {
  std::vector<std::filesystem::path> files;
  std::filesystem::path manifest;
};

SynthArtifacts cmd_synth(const DgpSpec& spec, SynthKind kind,
                         const std::filesystem::path& out_dir,
                         RatioBounds bounds = {});

std::vector<WeeklyPanelRow> load_panel(const std::filesystem::path& path);

}  // namespace btcpanel
