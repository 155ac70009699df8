#pragma once

#include <Eigen/Dense>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "btcpanel/types.hpp"

namespace btcpanel {

// Columnar weekly panel keyed by (currency, week). Column cells are absent
// where the source data had no value.
class PanelTable {
 public:
  using Column = std::vector<std::optional<double>>;

  std::size_t n_rows() const { return units_.size(); }
  const std::vector<Currency>& units() const { return units_; }
  const std::vector<std::int64_t>& weeks() const { return weeks_; }

  bool has_column(const std::string& name) const { return columns_.contains(name); }
  const Column& column(const std::string& name) const;
  void set_column(const std::string& name, Column values);

  void append_row(Currency unit, std::int64_t week);
  std::optional<std::size_t> row_index(const Currency& unit, std::int64_t week) const;

  PanelTable select_rows(const std::vector<std::size_t>& rows) const;

 private:
  std::vector<Currency> units_;
  std::vector<std::int64_t> weeks_;
  std::map<std::string, Column> columns_;
  std::map<std::pair<Currency, std::int64_t>, std::size_t> index_;
};

// Panel columns: premium_pct, depr_pct, btc_return, btc_volatility,
// median_confirm_minutes, avg_fee_usd, n_transactions, remittance_cost_pct,
// peg, cc, constrained, freedom_score.
PanelTable to_table(std::span<const WeeklyPanelRow> rows);

// Adds "<column>_lag1".."<column>_lagN", computed within each unit along
// consecutive weeks; a lag across a gap in weeks is absent.
void build_lags(PanelTable& panel, const std::string& column, int max_lag);

enum class TimeFe { None, Biweek, Month };

struct RegressionSpec {
  std::string dependent;
  std::vector<std::string> regressors;
  std::vector<int> dependent_lags;  // lags of the dependent added as regressors
  std::vector<std::pair<std::string, std::string>> interactions;
  bool unit_fe = true;
  TimeFe time_fe = TimeFe::None;
};

enum class FeMethod { Within, Dummy };

struct FitResult {
  std::map<std::string, double> coefficients;
  std::map<std::string, double> standard_errors;  // clustered by unit
  std::map<std::string, double> t_stats;
  std::map<std::string, double> p_values;
  double r_squared = 0;  // within-R^2 on the transformed data
  std::size_t n_obs = 0;
  std::size_t n_dropped = 0;  // listwise-deleted rows
  std::size_t n_clusters = 0;
  double condition_number = 0;
  bool condition_warning = false;
  std::vector<std::string> regressor_order;
};

// Least squares with unit and time effects absorbed and currency-clustered
// sandwich standard errors. The Within and Dummy methods must agree on all
// slopes to 1e-8; Within is the default.
FitResult fit_fe_ols(const PanelTable& panel, const RegressionSpec& spec,
                     FeMethod method = FeMethod::Within);

// Forward orthogonal deviations: for t = 1..T-1,
//   x~_t = sqrt((T-t)/(T-t+1)) * (x_t - mean(x_{t+1..T})),
// dropping the last observation. Removes any unit-constant component exactly.
std::vector<double> fod_transform(std::span<const double> series);

// Per-unit aligned GMM blocks for one transformed equation.
struct GmmBlocks {
  std::vector<Eigen::MatrixXd> X;  // regressors, FOD-transformed
  std::vector<Eigen::VectorXd> y;  // dependent, FOD-transformed
  std::vector<Eigen::MatrixXd> Z;  // instruments, lag-2/lag-3 levels
  std::vector<std::string> regressor_names;
  std::vector<std::string> instrument_names;

  std::size_t n_obs() const;
};

struct GmmResult {
  Eigen::VectorXd step1;
  Eigen::VectorXd coef;  // two-step estimate
  Eigen::VectorXd se;
  double hansen_j = 0;
  int hansen_df = 0;
  double hansen_p = 1;
  bool exactly_identified = false;
  bool degenerate_step2 = false;  // step-1 residuals numerically zero
  std::size_t n_obs = 0;
  std::size_t n_instruments = 0;
};

// Two-step GMM: W1 = (sum Z_i'Z_i)^-1, W2 = (sum Z_i'e_i e_i'Z_i)^-1 from
// step-1 residuals; Hansen J from step-2 residuals against W2.
GmmResult gmm_two_step(const GmmBlocks& blocks);

// Hansen overidentification statistic for given residual blocks.
struct HansenTest {
  double j = 0;
  int df = 0;
  double p = 1;
  bool exactly_identified = false;
};
HansenTest hansen_j(const std::vector<Eigen::VectorXd>& residuals,
                    const std::vector<Eigen::MatrixXd>& instruments,
                    const Eigen::MatrixXd& w2, int n_parameters);

struct PanelVarResult {
  int lag_order = 1;
  std::vector<std::string> variables;
  // One GMM result per equation, ordered as `variables`; equation k has
  // dependent variables[k] and regressors lag-1..lag-l of every variable.
  std::vector<GmmResult> equations;
  std::size_t n_units = 0;
};

// Two(-or-one)-variable panel VAR estimated equation by equation via
// FOD + two-step GMM with lag-2/lag-3 level instruments.
PanelVarResult panel_var(const PanelTable& panel,
                         const std::vector<std::string>& variables, int lag_order);

// Builds the aligned blocks for one equation (exposed for testing).
GmmBlocks panel_var_blocks(const PanelTable& panel,
                           const std::vector<std::string>& variables,
                           int dependent_index, int lag_order);

// Row-level partition by the constrained dummy: (unconstrained, constrained).
// Rows with an absent constrained flag go to neither part.
std::pair<PanelTable, PanelTable> split_by_constraint(const PanelTable& panel);

}  // namespace btcpanel
