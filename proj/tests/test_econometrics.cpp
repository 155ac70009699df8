#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "btcpanel/econometrics.hpp"
#include "btcpanel/errors.hpp"
#include "btcpanel/rng.hpp"
#include "btcpanel/synth.hpp"

using namespace btcpanel;

namespace {

// Balanced panel filled from a callback; week serials start at 2400 so time
// buckets land in real calendar weeks.
template <typename F>
PanelTable make_panel(int n_units, int n_weeks, F fill) {
  PanelTable t;
  PanelTable::Column y, x1, x2;
  for (int u = 0; u < n_units; ++u)
    for (int w = 0; w < n_weeks; ++w) {
      t.append_row("C" + std::to_string(u), 2400 + w);
      auto [yy, a, b] = fill(u, w);
      y.push_back(yy);
      x1.push_back(a);
      x2.push_back(b);
    }
  t.set_column("y", std::move(y));
  t.set_column("x1", std::move(x1));
  t.set_column("x2", std::move(x2));
  return t;
}

}  // namespace

TEST_CASE("build_lags skips week gaps") {
  PanelTable t;
  PanelTable::Column y;
  for (std::int64_t w : {100, 101, 103, 104}) {
    t.append_row("NGN", w);
    y.push_back(static_cast<double>(w));
  }
  t.set_column("y", std::move(y));
  build_lags(t, "y", 2);
  const auto& l1 = t.column("y_lag1");
  const auto& l2 = t.column("y_lag2");
  CHECK(!l1[0].has_value());
  CHECK(l1[1] == 100.0);
  CHECK(!l1[2].has_value());  // week 102 missing
  CHECK(l1[3] == 103.0);
  CHECK(!l2[0].has_value());
  CHECK(!l2[1].has_value());
  CHECK(l2[2] == 101.0);
  CHECK(!l2[3].has_value());
}

TEST_CASE("noiseless recovery with unit fixed effects") {
  Rng rng(11);
  std::vector<double> fe;
  for (int u = 0; u < 6; ++u) fe.push_back(rng.normal(0, 2));
  auto t = make_panel(6, 40, [&](int u, int w) {
    double a = rng.normal(), b = rng.normal();
    double y = fe[u] + 1.5 * a - 0.7 * b;
    (void)w;
    return std::tuple{y, a, b};
  });
  RegressionSpec spec;
  spec.dependent = "y";
  spec.regressors = {"x1", "x2"};
  spec.unit_fe = true;
  FitResult fit = fit_fe_ols(t, spec);
  CHECK(fit.coefficients.at("x1") == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(fit.coefficients.at("x2") == doctest::Approx(-0.7).epsilon(1e-9));
  CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(fit.n_obs == 240);
  CHECK(fit.n_clusters == 6);
}

TEST_CASE("within and dummy methods agree to 1e-8") {
  Rng rng(12);
  std::vector<double> fe;
  for (int u = 0; u < 8; ++u) fe.push_back(rng.normal(0, 3));
  auto t = make_panel(8, 30, [&](int u, int w) {
    double a = rng.normal(), b = rng.normal();
    double y = fe[u] + 0.8 * a + 0.2 * b + 0.03 * w + rng.normal(0, 0.5);
    return std::tuple{y, a, b};
  });
  RegressionSpec spec;
  spec.dependent = "y";
  spec.regressors = {"x1", "x2"};
  spec.unit_fe = true;
  spec.time_fe = TimeFe::Month;
  FitResult within = fit_fe_ols(t, spec, FeMethod::Within);
  FitResult dummy = fit_fe_ols(t, spec, FeMethod::Dummy);
  for (const char* name : {"x1", "x2"}) {
    CHECK(within.coefficients.at(name) ==
          doctest::Approx(dummy.coefficients.at(name)).epsilon(1e-8));
  }
  CHECK(within.n_obs == dummy.n_obs);
}

TEST_CASE("dependent lags and interactions are materialized") {
  Rng rng(13);
  auto t = make_panel(4, 60, [&](int u, int w) {
    (void)u;
    (void)w;
    return std::tuple{rng.normal(), rng.normal(), rng.normal()};
  });
  RegressionSpec spec;
  spec.dependent = "y";
  spec.regressors = {"x1", "x2"};
  spec.dependent_lags = {1, 2};
  spec.interactions = {{"x1", "x2"}};
  spec.unit_fe = true;
  FitResult fit = fit_fe_ols(t, spec);
  std::vector<std::string> expect = {"x1", "x2", "y_lag1", "y_lag2", "x1:x2"};
  CHECK(fit.regressor_order == expect);
  // First two weeks of each unit drop for missing lags.
  CHECK(fit.n_obs == 4 * 58);
  CHECK(fit.n_dropped == 8);
}

TEST_CASE("collinear columns are named in the error") {
  auto t = make_panel(3, 20, [&](int u, int w) {
    double a = u + 0.1 * w;
    return std::tuple{a + 1.0, a, 2.0 * a};  // x2 = 2 x1 exactly
  });
  RegressionSpec spec;
  spec.dependent = "y";
  spec.regressors = {"x1", "x2"};
  spec.unit_fe = true;
  try {
    fit_fe_ols(t, spec);
    FAIL("expected ModelError");
  } catch (const ModelError& e) {
    std::string msg = e.what();
    CHECK(msg.find("collinear") != std::string::npos);
    bool names_one = msg.find("x1") != std::string::npos ||
                     msg.find("x2") != std::string::npos;
    CHECK(names_one);
  }
}

TEST_CASE("duplicate regressor rejected") {
  auto t = make_panel(2, 10, [&](int, int) {
    return std::tuple{1.0, 2.0, 3.0};
  });
  RegressionSpec spec;
  spec.dependent = "y";
  spec.regressors = {"x1", "x1"};
  CHECK_THROWS_AS(fit_fe_ols(t, spec), ModelError);
}

TEST_CASE("no-FE fit matches the elimination oracle") {
  Rng rng(14);
  const int n = 300;
  Eigen::MatrixXd X(n, 3);
  Eigen::VectorXd y(n);
  auto t = make_panel(1, n, [&](int, int w) {
    double a = rng.normal(), b = rng.normal();
    double yy = 2.0 * a - 1.0 * b + rng.normal(0, 0.3);
    X(w, 0) = a;
    X(w, 1) = b;
    X(w, 2) = a * b;
    y(w) = yy;
    return std::tuple{yy, a, b};
  });
  for (int w = 0; w < n; ++w) X(w, 2) = 0;  // third column unused below
  RegressionSpec spec;
  spec.dependent = "y";
  spec.regressors = {"x1", "x2"};
  spec.unit_fe = false;
  FitResult fit = fit_fe_ols(t, spec);
  OracleOlsResult oracle = oracle_ols(X.leftCols(2), y);
  CHECK(fit.coefficients.at("x1") ==
        doctest::Approx(oracle.coefficients[0]).epsilon(1e-10));
  CHECK(fit.coefficients.at("x2") ==
        doctest::Approx(oracle.coefficients[1]).epsilon(1e-10));
}

TEST_CASE("oracle flags ill-conditioned systems") {
  // 6x6 Hilbert segment is numerically near-singular.
  const int k = 6, n = 40;
  Eigen::MatrixXd X(n, k);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < k; ++j)
      X(i, j) = 1.0 / (1.0 + 0.001 * i + j);
  Eigen::VectorXd y = X * Eigen::VectorXd::Ones(k);
  OracleOlsResult r = oracle_ols(X, y);
  CHECK(r.condition_warning);
}

TEST_CASE("clustered errors grow under within-cluster correlation") {
  Rng rng(15);
  const int units = 30, weeks = 25;
  std::vector<double> shock(units);
  auto t = make_panel(units, weeks, [&](int u, int w) {
    if (w == 0) shock[u] = rng.normal();
    double a = rng.normal();
    // Error strongly correlated within unit.
    double y = 0.5 * a + 3.0 * shock[u] + rng.normal(0, 0.2);
    return std::tuple{y, a, rng.normal()};
  });
  RegressionSpec spec;
  spec.dependent = "y";
  spec.regressors = {"x1"};
  spec.unit_fe = false;
  FitResult fit = fit_fe_ols(t, spec);
  CHECK(fit.n_clusters == units);
  CHECK(fit.standard_errors.at("x1") > 0);
  CHECK(std::isfinite(fit.t_stats.at("x1")));
  CHECK(fit.p_values.at("x1") >= 0);
  CHECK(fit.p_values.at("x1") <= 1);
}

TEST_CASE("split by constraint partitions rows") {
  PanelTable t;
  PanelTable::Column c, y;
  for (int i = 0; i < 6; ++i) {
    t.append_row("C" + std::to_string(i % 3), 100 + i / 3);
    y.push_back(1.0 * i);
    if (i == 5)
      c.push_back(std::nullopt);
    else
      c.push_back(i % 2 ? 1.0 : 0.0);
  }
  t.set_column("constrained", std::move(c));
  t.set_column("y", std::move(y));
  auto [un, con] = split_by_constraint(t);
  CHECK(un.n_rows() == 3);
  CHECK(con.n_rows() == 2);
}
