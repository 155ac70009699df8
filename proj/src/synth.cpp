#include "btcpanel/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "btcpanel/csv.hpp"
#include "btcpanel/errors.hpp"
#include "btcpanel/rng.hpp"

namespace btcpanel {

namespace {

const std::pair<const char*, double DgpSpec::*> kDoubleKeys[] = {
    {"outlier_rate", &DgpSpec::outlier_rate},
    {"trade_price_sigma", &DgpSpec::trade_price_sigma},
    {"beta0", &DgpSpec::beta0},
    {"beta1", &DgpSpec::beta1},
    {"beta2", &DgpSpec::beta2},
    {"gamma0", &DgpSpec::gamma0},
    {"gamma1", &DgpSpec::gamma1},
    {"lambda0", &DgpSpec::lambda0},
    {"lambda1", &DgpSpec::lambda1},
    {"beta_vol", &DgpSpec::beta_vol},
    {"noise", &DgpSpec::noise},
    {"constrained_share", &DgpSpec::constrained_share},
    {"a11", &DgpSpec::a11},
    {"a12", &DgpSpec::a12},
    {"a21", &DgpSpec::a21},
    {"a22", &DgpSpec::a22},
    {"b11", &DgpSpec::b11},
    {"b12", &DgpSpec::b12},
    {"b21", &DgpSpec::b21},
    {"b22", &DgpSpec::b22},
    {"var_noise", &DgpSpec::var_noise},
    {"truncation_share", &DgpSpec::truncation_share},
};

const std::pair<const char*, int DgpSpec::*> kIntKeys[] = {
    {"n_currencies", &DgpSpec::n_currencies},
    {"n_days", &DgpSpec::n_days},
    {"trades_per_day", &DgpSpec::trades_per_day},
    {"n_weeks", &DgpSpec::n_weeks},
};

}  // namespace

DgpSpec parse_dgp_spec(std::istream& source) {
  DgpSpec spec;
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
        throw ConfigError("dgp spec line " + std::to_string(lineno) +
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
    if (key == "seed") {
      auto v = parse_integer(value);
      if (!v || *v < 0) throw ConfigError("bad seed: " + value);
      spec.seed = static_cast<std::uint64_t>(*v);
      continue;
    }
    bool found = false;
    for (const auto& [name, member] : kIntKeys)
      if (key == name) {
        auto v = parse_integer(value);
        if (!v) throw ConfigError("bad integer for " + key + ": " + value);
        spec.*member = static_cast<int>(*v);
        found = true;
        break;
      }
    if (found) continue;
    for (const auto& [name, member] : kDoubleKeys)
      if (key == name) {
        auto v = parse_decimal(value);
        if (!v) throw ConfigError("bad number for " + key + ": " + value);
        spec.*member = *v;
        found = true;
        break;
      }
    if (!found) throw ConfigError("unknown dgp key: " + key);
  }
  if (spec.n_currencies < 1 || spec.n_weeks < 10 || spec.n_days < 1 ||
      spec.trades_per_day < 1)
    throw ConfigError("dgp sizes out of range");
  if (spec.outlier_rate < 0 || spec.outlier_rate > 1 || spec.constrained_share < 0 ||
      spec.constrained_share > 1 || spec.truncation_share < 0 ||
      spec.truncation_share > 1)
    throw ConfigError("dgp shares must lie in [0,1]");
  if (spec.noise < 0 || spec.var_noise < 0) throw ConfigError("noise scale must be >= 0");
  return spec;
}

std::string dgp_spec_keys_help() {
  std::string out = "seed";
  for (const auto& [name, _] : kIntKeys) out += std::string(", ") + name;
  for (const auto& [name, _] : kDoubleKeys) out += std::string(", ") + name;
  return out;
}

namespace {

// Synthetic three-letter codes: CAA, CAB, ...; stable and registry-friendly.
Currency synth_currency(int index) {
  char buf[4] = {'C', static_cast<char>('A' + index / 26),
                 static_cast<char>('A' + index % 26), 0};
  return buf;
}

}  // namespace

TradeDataset gen_trades(const DgpSpec& spec, RatioBounds bounds) {
  TradeDataset out;
  Rng root(spec.seed);
  const Date start = make_date(2017, 1, 2);
  out.registry.insert("USD");
  for (int c = 0; c < spec.n_currencies; ++c) {
    Currency ccy = c == 0 ? "USD" : synth_currency(c - 1);
    out.registry.insert(ccy);
    Rng rng = root.substream(static_cast<std::uint64_t>(c));
    double level = std::exp(rng.uniform(std::log(1000.0), std::log(1e6)));
    for (int d = 0; d < spec.n_days; ++d) {
      level *= std::exp(rng.normal(0.0, 0.02));
      const Date date{start.days + d};
      const int n = spec.trades_per_day;
      std::size_t first = out.trades.size();
      for (int i = 0; i < n; ++i) {
        Trade t;
        t.timestamp = Timestamp{date.days * 86400 + (i + 1) * 86400 / (n + 1)};
        t.currency = ccy;
        t.volume_btc = std::exp(rng.normal(-2.0, 1.0));
        t.price = level * std::exp(rng.normal(0.0, spec.trade_price_sigma));
        out.trades.push_back(std::move(t));
      }
      if (spec.outlier_rate > 0 && rng.bernoulli(spec.outlier_rate)) {
        std::size_t victim =
            first + static_cast<std::size_t>(rng.uniform_int(0, n - 1));
        out.trades[victim].price *= rng.uniform(3.0, 10.0);
      }
    }
  }

  // Truth: independent direct pass over the generated trades.
  std::map<std::pair<Currency, std::int64_t>, std::vector<const Trade*>> buckets;
  for (const Trade& t : out.trades)
    buckets[{t.currency, t.timestamp.date().days}].push_back(&t);
  for (const auto& [key, bucket] : buckets) {
    BucketTruth truth;
    truth.currency = key.first;
    truth.date = Date{key.second};
    double sx = 0, sxp = 0;
    std::vector<double> prices;
    for (const Trade* t : bucket) {
      sx += t->volume_btc;
      sxp += t->volume_btc * t->price;
      prices.push_back(t->price);
    }
    truth.vw_price = sxp / sx;
    std::sort(prices.begin(), prices.end());
    truth.median_price = prices[(prices.size() - 1) / 2];
    truth.injected_ratio = truth.vw_price / truth.median_price;
    truth.corrected =
        truth.injected_ratio < bounds.lower || truth.injected_ratio > bounds.upper;
    out.truth.push_back(std::move(truth));
  }
  return out;
}

namespace {

// First week of the generated panels; the Monday of 2017-W01.
std::int64_t panel_start_week() { return week_serial(make_date(2017, 1, 2)); }

}  // namespace

PanelDataset gen_friction_panel(const DgpSpec& spec) {
  if (std::fabs(spec.gamma0) + std::fabs(spec.gamma1) >= 1.0)
    throw ConfigError("explosive premium dynamics: |gamma0| + |gamma1| >= 1");
  PanelDataset out;
  Rng root(spec.seed);
  const std::int64_t w0 = panel_start_week();
  const int burn = 50;

  // Common weekly exogenous series (market + blockchain).
  std::vector<double> vol(spec.n_weeks), ret(spec.n_weeks), confirm(spec.n_weeks),
      fee(spec.n_weeks), ntx(spec.n_weeks);
  {
    Rng rng = root.substream(1000000);
    double v = 1.0, cf = 10.0, f = 2.0, n = 3e5;
    for (int w = 0; w < spec.n_weeks; ++w) {
      v = std::max(0.05, 1.0 + 0.8 * (v - 1.0) + rng.normal(0.0, 0.3));
      cf = std::max(1.0, 10.0 + 0.7 * (cf - 10.0) + rng.normal(0.0, 2.0));
      f = std::max(0.1, 2.0 + 0.7 * (f - 2.0) + rng.normal(0.0, 0.5));
      n = std::max(1e4, 3e5 + 0.7 * (n - 3e5) + rng.normal(0.0, 3e4));
      vol[w] = v;
      ret[w] = rng.normal(0.0, 0.1);
      confirm[w] = cf;
      fee[w] = f;
      ntx[w] = n;
    }
  }

  // Month effects shared across currencies.
  std::map<std::int64_t, double> month_effect;
  {
    Rng rng = root.substream(2000000);
    for (int w = -burn; w < spec.n_weeks; ++w) {
      std::int64_t mb = month_bucket(w0 + w);
      if (!month_effect.contains(mb)) month_effect[mb] = rng.normal(0.0, 0.5);
    }
  }

  const int n_constrained =
      static_cast<int>(std::lround(spec.constrained_share * spec.n_currencies));
  // Constrained units are reclassified a third of the way into the sample so
  // the dummy varies within unit and is not absorbed by the fixed effects.
  const int switch_week = spec.n_weeks / 3;
  for (int c = 0; c < spec.n_currencies; ++c) {
    Rng rng = root.substream(static_cast<std::uint64_t>(c));
    const Currency ccy = synth_currency(c);
    const bool ever_constrained = c < n_constrained;
    const double fe = rng.normal(0.0, 2.0);
    const double ff = rng.uniform(20.0, 90.0);
    double cost = rng.uniform(2.0, 8.0);
    double p1 = 0, p2 = 0;
    for (int w = -burn; w < spec.n_weeks; ++w) {
      const int constrained = ever_constrained && w >= switch_week ? 1 : 0;
      const double cc = constrained ? 0.9 : 0.2;
      cost = std::max(0.0, 5.0 + 0.8 * (cost - 5.0) + rng.normal(0.0, 0.8));
      double depr = rng.normal(0.0, 2.0);
      int widx = std::max(w, 0);  // burn-in reuses the first week's exogenous values
      double p = spec.beta0 * cost + spec.beta1 * constrained +
                 spec.beta2 * cost * constrained + spec.gamma0 * p1 +
                 spec.gamma1 * p2 + spec.lambda0 * ff + spec.lambda1 * depr +
                 spec.beta_vol * vol[widx] + fe + month_effect.at(month_bucket(w0 + w)) +
                 spec.noise * rng.normal(0.0, 1.0);
      p2 = p1;
      p1 = p;
      if (w < 0) continue;
      WeeklyPanelRow row;
      row.week = w0 + w;
      row.currency = ccy;
      row.premium_pct = p;
      row.depr_pct = depr;
      row.btc_return = ret[w];
      row.btc_volatility = vol[w];
      row.median_confirm_minutes = confirm[w];
      row.avg_fee_usd = fee[w];
      row.n_transactions = ntx[w];
      row.remittance_cost_pct = cost;
      row.peg = constrained;
      row.cc = cc;
      row.constrained = constrained;
      row.freedom_score = ff;
      out.rows.push_back(std::move(row));
    }
  }
  out.truth = {{"beta0", spec.beta0},     {"beta1", spec.beta1},
               {"beta2", spec.beta2},     {"gamma0", spec.gamma0},
               {"gamma1", spec.gamma1},   {"lambda0", spec.lambda0},
               {"lambda1", spec.lambda1}, {"beta_vol", spec.beta_vol},
               {"pass_through", spec.beta0 + spec.beta2}};
  return out;
}

double var_spectral_radius(const DgpSpec& spec) {
  Eigen::Matrix4d companion;
  companion << spec.a11, spec.a12, spec.b11, spec.b12,  //
      spec.a21, spec.a22, spec.b21, spec.b22,           //
      1, 0, 0, 0,                                       //
      0, 1, 0, 0;
  return companion.eigenvalues().cwiseAbs().maxCoeff();
}

PanelDataset gen_var_panel(const DgpSpec& spec) {
  if (var_spectral_radius(spec) >= 1.0)
    throw ConfigError("unstable VAR: companion spectral radius >= 1");
  PanelDataset out;
  Rng root(spec.seed);
  const std::int64_t w0 = panel_start_week();
  const int burn = 50;
  for (int c = 0; c < spec.n_currencies; ++c) {
    Rng rng = root.substream(static_cast<std::uint64_t>(c));
    const Currency ccy = synth_currency(c);
    const double fe1 = rng.normal(0.0, 1.0);
    const double fe2 = rng.normal(0.0, 1.0);
    int t_len = spec.n_weeks;
    if (spec.truncation_share > 0 && rng.bernoulli(spec.truncation_share))
      t_len = static_cast<int>(
          rng.uniform_int(std::max(8, spec.n_weeks / 5), spec.n_weeks));
    double d1 = 0, d2 = 0, p1 = 0, p2 = 0;
    for (int w = -burn; w < t_len; ++w) {
      double d = spec.a11 * d1 + spec.a12 * p1 + spec.b11 * d2 + spec.b12 * p2 + fe1 +
                 spec.var_noise * rng.normal(0.0, 1.0);
      double p = spec.a21 * d1 + spec.a22 * p1 + spec.b21 * d2 + spec.b22 * p2 + fe2 +
                 spec.var_noise * rng.normal(0.0, 1.0);
      d2 = d1;
      d1 = d;
      p2 = p1;
      p1 = p;
      if (w < 0) continue;
      WeeklyPanelRow row;
      row.week = w0 + w;
      row.currency = ccy;
      row.premium_pct = p;
      row.depr_pct = d;
      row.constrained = 0;
      out.rows.push_back(std::move(row));
    }
  }
  out.truth = {{"a11", spec.a11}, {"a12", spec.a12}, {"a21", spec.a21},
               {"a22", spec.a22}, {"b11", spec.b11}, {"b12", spec.b12},
               {"b21", spec.b21}, {"b22", spec.b22}};
  return out;
}

OracleOlsResult oracle_ols(const Eigen::MatrixXd& design,
                           const Eigen::VectorXd& response) {
  const Eigen::Index k = design.cols();
  // Normal equations assembled by hand.
  Eigen::MatrixXd a = design.transpose() * design;
  Eigen::VectorXd b = design.transpose() * response;

  // Gaussian elimination with partial pivoting.
  double max_pivot = 0, min_pivot = std::numeric_limits<double>::infinity();
  for (Eigen::Index col = 0; col < k; ++col) {
    Eigen::Index pivot_row = col;
    for (Eigen::Index r = col + 1; r < k; ++r)
      if (std::fabs(a(r, col)) > std::fabs(a(pivot_row, col))) pivot_row = r;
    if (pivot_row != col) {
      a.row(pivot_row).swap(a.row(col));
      std::swap(b[pivot_row], b[col]);
    }
    double pivot = a(col, col);
    if (std::fabs(pivot) < 1e-300) throw ModelError("oracle_ols: singular system");
    max_pivot = std::max(max_pivot, std::fabs(pivot));
    min_pivot = std::min(min_pivot, std::fabs(pivot));
    for (Eigen::Index r = col + 1; r < k; ++r) {
      double factor = a(r, col) / pivot;
      a.row(r) -= factor * a.row(col);
      b[r] -= factor * b[col];
    }
  }
  OracleOlsResult out;
  out.coefficients.resize(k);
  for (Eigen::Index r = k; r-- > 0;) {
    double s = b[r];
    for (Eigen::Index c = r + 1; c < k; ++c) s -= a(r, c) * out.coefficients[c];
    out.coefficients[r] = s / a(r, r);
  }
  out.pivot_ratio = min_pivot > 0 ? max_pivot / min_pivot
                                  : std::numeric_limits<double>::infinity();
  // Pivot ratio tracks cond(X'X) ~ cond(X)^2; warn on the same cond(X)
  // threshold fit_fe_ols uses.
  out.condition_warning = out.pivot_ratio > 1e12;
  return out;
}

void write_bucket_truth(std::ostream& out, std::span<const BucketTruth> rows) {
  out << "currency,date,vw_price,median_price,corrected,ratio\n";
  for (const BucketTruth& t : rows)
    out << t.currency << ',' << format_date(t.date) << ',' << format_decimal(t.vw_price)
        << ',' << format_decimal(t.median_price) << ',' << (t.corrected ? 1 : 0) << ','
        << format_decimal(t.injected_ratio) << '\n';
}

void write_coefficient_truth(std::ostream& out,
                             const std::map<std::string, double>& truth) {
  out << "name,value\n";
  for (const auto& [name, value] : truth)
    out << name << ',' << format_decimal(value) << '\n';
}

}  // namespace btcpanel
