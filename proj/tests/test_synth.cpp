#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <set>
#include <sstream>

#include "btcpanel/errors.hpp"
#include "btcpanel/pricing.hpp"
#include "btcpanel/synth.hpp"

using namespace btcpanel;

TEST_CASE("dgp spec parsing") {
  std::istringstream in(
      "seed = 42\n"
      "n_currencies = 7\n"
      "outlier_rate = 0.05  # five percent\n"
      "\n"
      "gamma0 = 0.25\n");
  DgpSpec spec = parse_dgp_spec(in);
  CHECK(spec.seed == 42);
  CHECK(spec.n_currencies == 7);
  CHECK(spec.outlier_rate == doctest::Approx(0.05));
  CHECK(spec.gamma0 == doctest::Approx(0.25));
  CHECK(spec.beta2 == doctest::Approx(0.942));  // untouched default

  std::istringstream bad("unknown_knob = 3\n");
  CHECK_THROWS_AS(parse_dgp_spec(bad), ConfigError);
  std::istringstream bad2("outlier_rate = 1.5\n");
  CHECK_THROWS_AS(parse_dgp_spec(bad2), ConfigError);
}

TEST_CASE("same seed reproduces trades exactly") {
  DgpSpec spec;
  spec.n_currencies = 5;
  spec.n_days = 20;
  spec.trades_per_day = 10;
  spec.seed = 9;
  TradeDataset a = gen_trades(spec);
  TradeDataset b = gen_trades(spec);
  REQUIRE(a.trades.size() == b.trades.size());
  for (std::size_t i = 0; i < a.trades.size(); ++i) {
    CHECK(a.trades[i].timestamp == b.trades[i].timestamp);
    CHECK(a.trades[i].price == b.trades[i].price);
    CHECK(a.trades[i].volume_btc == b.trades[i].volume_btc);
  }
  spec.seed = 10;
  TradeDataset c = gen_trades(spec);
  bool any_diff = false;
  for (std::size_t i = 0; i < a.trades.size() && !any_diff; ++i)
    any_diff = a.trades[i].price != c.trades[i].price;
  CHECK(any_diff);
}

TEST_CASE("aggregation reproduces generator truth per bucket") {
  DgpSpec spec;
  spec.n_currencies = 8;
  spec.n_days = 30;
  spec.trades_per_day = 21;
  spec.outlier_rate = 0.3;
  spec.seed = 4;
  TradeDataset data = gen_trades(spec);
  auto daily = aggregate_daily(data.trades);
  REQUIRE(daily.size() == data.truth.size());
  std::map<std::pair<Currency, std::int64_t>, const BucketTruth*> truth;
  for (const BucketTruth& t : data.truth) truth[{t.currency, t.date.days}] = &t;
  int corrected = 0;
  for (const DailyPrice& p : daily) {
    const BucketTruth* t = truth.at({p.currency, p.date.days});
    CHECK(p.vw_price == doctest::Approx(t->vw_price).epsilon(1e-12));
    CHECK(p.median_price == t->median_price);
    CHECK(p.corrected == t->corrected);
    corrected += p.corrected ? 1 : 0;
  }
  CHECK(corrected > 0);  // outlier injection flips some buckets
}

TEST_CASE("usd is always generated first") {
  DgpSpec spec;
  spec.n_currencies = 3;
  spec.n_days = 2;
  spec.trades_per_day = 2;
  TradeDataset data = gen_trades(spec);
  CHECK(data.registry.contains("USD"));
  CHECK(data.trades.front().currency == "USD");
}

TEST_CASE("friction panel carries its generating coefficients") {
  DgpSpec spec;
  spec.n_currencies = 10;
  spec.n_weeks = 30;
  PanelDataset data = gen_friction_panel(spec);
  CHECK(data.rows.size() == 300);
  CHECK(data.truth.at("beta0") == doctest::Approx(0.05));
  CHECK(data.truth.at("pass_through") == doctest::Approx(0.992));
  int constrained = 0;
  std::set<Currency> ccys;
  for (const WeeklyPanelRow& r : data.rows) {
    ccys.insert(r.currency);
    REQUIRE(r.constrained.has_value());
    constrained += *r.constrained;
    REQUIRE(r.remittance_cost_pct.has_value());
    CHECK(*r.remittance_cost_pct >= 0);
  }
  CHECK(ccys.size() == 10);
  // constrained_share 0.3 of 10 currencies, reclassified at week 10 of 30.
  CHECK(constrained == 3 * 20);
}

TEST_CASE("explosive friction dynamics rejected") {
  DgpSpec spec;
  spec.gamma0 = 0.7;
  spec.gamma1 = 0.4;
  CHECK_THROWS_AS(gen_friction_panel(spec), ConfigError);
}

TEST_CASE("var spectral radius and stability gate") {
  DgpSpec spec;
  CHECK(var_spectral_radius(spec) == doctest::Approx(0.3));
  spec.a11 = 1.02;
  CHECK_THROWS_AS(gen_var_panel(spec), ConfigError);
}

TEST_CASE("var truncation produces unbalanced units") {
  DgpSpec spec;
  spec.n_currencies = 30;
  spec.n_weeks = 50;
  spec.truncation_share = 0.5;
  spec.seed = 6;
  PanelDataset data = gen_var_panel(spec);
  std::map<Currency, int> lengths;
  for (const WeeklyPanelRow& r : data.rows) lengths[r.currency]++;
  int full = 0, shortened = 0;
  for (const auto& [ccy, len] : lengths) {
    CHECK(len >= 8);
    CHECK(len <= 50);
    (len == 50 ? full : shortened)++;
  }
  CHECK(full > 0);
  CHECK(shortened > 0);
}

TEST_CASE("oracle solves a known system exactly") {
  Eigen::MatrixXd X(4, 2);
  X << 1, 0, 0, 1, 1, 1, 1, -1;
  Eigen::VectorXd beta(2);
  beta << 2.0, -3.0;
  Eigen::VectorXd y = X * beta;
  OracleOlsResult r = oracle_ols(X, y);
  CHECK(r.coefficients[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r.coefficients[1] == doctest::Approx(-3.0).epsilon(1e-12));
  CHECK(!r.condition_warning);
}

TEST_CASE("truth files serialize deterministically") {
  DgpSpec spec;
  spec.n_currencies = 4;
  spec.n_days = 5;
  spec.trades_per_day = 5;
  TradeDataset data = gen_trades(spec);
  std::ostringstream a, b;
  write_bucket_truth(a, data.truth);
  write_bucket_truth(b, data.truth);
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("currency,date,", 0) == 0);
}
