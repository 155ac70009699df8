#pragma once

#include <Eigen/Dense>
#include <istream>
#include <map>
#include <span>

#include "btcpanel/pricing.hpp"
#include "btcpanel/types.hpp"

namespace btcpanel {

// Generator configuration, read from plain-text key = value files. Every key
// has a default; unknown keys are rejected.
struct DgpSpec {
  std::uint64_t seed = 1;

  // trade generation
  int n_currencies = 80;
  int n_days = 250;
  int trades_per_day = 50;
  double outlier_rate = 0.0;
  double trade_price_sigma = 0.01;

  // friction panel (premium equation as generative model)
  int n_weeks = 300;
  double beta0 = 0.05;   // remittance cost
  double beta1 = 0.0;    // constrained dummy
  double beta2 = 0.942;  // cost x constrained interaction
  double gamma0 = 0.3;   // premium lag 1
  double gamma1 = 0.1;   // premium lag 2
  double lambda0 = -0.01;  // freedom score
  double lambda1 = -0.05;  // depreciation
  double beta_vol = 0.0;   // BTC volatility
  double noise = 1.0;
  double constrained_share = 0.3;

  // two-variable VAR (depr, premium)
  double a11 = 0.3, a12 = 0.0, a21 = 0.0, a22 = 0.3;  // lag-1 matrix
  double b11 = 0.0, b12 = 0.0, b21 = 0.0, b22 = 0.0;  // lag-2 matrix
  double var_noise = 1.0;
  double truncation_share = 0.0;  // share of units with a shortened tail
};

DgpSpec parse_dgp_spec(std::istream& source);
std::string dgp_spec_keys_help();

// Per-bucket ground truth written next to generated trade files.
struct BucketTruth {
  Currency currency;
  Date date;
  double vw_price = 0;
  double median_price = 0;
  bool corrected = false;
  double injected_ratio = 0;  // vw/median after any outlier injection
};

struct TradeDataset {
  std::vector<Trade> trades;  // canonical order: currency, then time
  std::vector<BucketTruth> truth;
  CurrencyRegistry registry;
};

// Log-normal trades around per-currency price paths; with probability
// outlier_rate a bucket gets one price scaled by a factor in [3, 10]. Truth
// is computed by an independent direct pass over the generated trades.
TradeDataset gen_trades(const DgpSpec& spec, RatioBounds bounds = {});

struct PanelDataset {
  std::vector<WeeklyPanelRow> rows;
  std::map<std::string, double> truth;  // generating coefficients
};

// Weekly panel with premiums generated from the cost regression as the DGP:
// currency FE, month effects, AR(2) premium dynamics, AR(1) remittance
// costs; constrained units are reclassified a third of the way in so the
// dummy varies within unit. Explosive dynamics are rejected.
PanelDataset gen_friction_panel(const DgpSpec& spec);

// Two-variable (depr, premium) panel VAR with per-unit fixed effects and
// optional unbalancedness by random tail truncation. The companion matrix
// must have spectral radius < 1.
PanelDataset gen_var_panel(const DgpSpec& spec);

// Spectral radius of the VAR companion matrix for a spec.
double var_spectral_radius(const DgpSpec& spec);

struct OracleOlsResult {
  Eigen::VectorXd coefficients;
  bool condition_warning = false;
  double pivot_ratio = 0;
};

// Independent least-squares oracle: explicit Gaussian elimination with
// partial pivoting on the normal equations. Shares no code with fit_fe_ols.
OracleOlsResult oracle_ols(const Eigen::MatrixXd& design,
                           const Eigen::VectorXd& response);

void write_bucket_truth(std::ostream& out, std::span<const BucketTruth> rows);
void write_coefficient_truth(std::ostream& out,
                             const std::map<std::string, double>& truth);

}  // namespace btcpanel
