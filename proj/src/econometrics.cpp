#include "btcpanel/econometrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "btcpanel/errors.hpp"
#include "btcpanel/stats.hpp"

namespace btcpanel {

const PanelTable::Column& PanelTable::column(const std::string& name) const {
  auto it = columns_.find(name);
  if (it == columns_.end()) throw ModelError("missing column: " + name);
  return it->second;
}

void PanelTable::set_column(const std::string& name, Column values) {
  if (values.size() != n_rows())
    throw ModelError("column " + name + " length mismatch");
  columns_[name] = std::move(values);
}

void PanelTable::append_row(Currency unit, std::int64_t week) {
  auto key = std::make_pair(unit, week);
  if (!index_.emplace(key, units_.size()).second)
    throw ModelError("duplicate panel row (" + unit + ", " + week_id(week) + ")");
  units_.push_back(std::move(unit));
  weeks_.push_back(week);
  for (auto& [name, col] : columns_) col.emplace_back();
}

std::optional<std::size_t> PanelTable::row_index(const Currency& unit,
                                                std::int64_t week) const {
  auto it = index_.find({unit, week});
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

PanelTable PanelTable::select_rows(const std::vector<std::size_t>& rows) const {
  PanelTable out;
  for (std::size_t r : rows) out.append_row(units_[r], weeks_[r]);
  for (const auto& [name, col] : columns_) {
    Column sub;
    sub.reserve(rows.size());
    for (std::size_t r : rows) sub.push_back(col[r]);
    out.columns_[name] = std::move(sub);
  }
  return out;
}

PanelTable to_table(std::span<const WeeklyPanelRow> rows) {
  PanelTable t;
  PanelTable::Column premium, depr, ret, vol, confirm, fee, ntx, cost, peg, cc,
      constrained, ff;
  auto opt = [](const std::optional<int>& v) -> std::optional<double> {
    if (!v) return std::nullopt;
    return static_cast<double>(*v);
  };
  for (const WeeklyPanelRow& r : rows) {
    t.append_row(r.currency, r.week);
    premium.push_back(r.premium_pct);
    depr.push_back(r.depr_pct);
    ret.push_back(r.btc_return);
    vol.push_back(r.btc_volatility);
    confirm.push_back(r.median_confirm_minutes);
    fee.push_back(r.avg_fee_usd);
    ntx.push_back(r.n_transactions);
    cost.push_back(r.remittance_cost_pct);
    peg.push_back(opt(r.peg));
    cc.push_back(r.cc);
    constrained.push_back(opt(r.constrained));
    ff.push_back(r.freedom_score);
  }
  t.set_column("premium_pct", std::move(premium));
  t.set_column("depr_pct", std::move(depr));
  t.set_column("btc_return", std::move(ret));
  t.set_column("btc_volatility", std::move(vol));
  t.set_column("median_confirm_minutes", std::move(confirm));
  t.set_column("avg_fee_usd", std::move(fee));
  t.set_column("n_transactions", std::move(ntx));
  t.set_column("remittance_cost_pct", std::move(cost));
  t.set_column("peg", std::move(peg));
  t.set_column("cc", std::move(cc));
  t.set_column("constrained", std::move(constrained));
  t.set_column("freedom_score", std::move(ff));
  return t;
}

void build_lags(PanelTable& panel, const std::string& column, int max_lag) {
  if (max_lag < 1) throw ModelError("build_lags: max_lag must be >= 1");
  const auto& base = panel.column(column);
  for (int lag = 1; lag <= max_lag; ++lag) {
    PanelTable::Column lagged(panel.n_rows());
    for (std::size_t r = 0; r < panel.n_rows(); ++r) {
      auto prev = panel.row_index(panel.units()[r], panel.weeks()[r] - lag);
      if (prev) lagged[r] = base[*prev];
    }
    panel.set_column(column + "_lag" + std::to_string(lag), std::move(lagged));
  }
}

namespace {

std::int64_t time_bucket(TimeFe fe, std::int64_t week) {
  switch (fe) {
    case TimeFe::Biweek: return biweek_bucket(week);
    case TimeFe::Month: return month_bucket(week);
    case TimeFe::None: return 0;
  }
  return 0;
}

struct QrSolve {
  Eigen::VectorXd beta;
  double condition = 0;
  std::vector<std::size_t> dependent_columns;  // empty if full rank
};

// Column-pivoted QR with rank detection at pivot tolerance
// 1e-10 * (largest |R| diagonal).
QrSolve solve_ls(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Z);
  Eigen::VectorXd rdiag = qr.matrixR()
                              .topLeftCorner(std::min(Z.rows(), Z.cols()), Z.cols())
                              .diagonal()
                              .cwiseAbs();
  double rmax = rdiag.size() ? rdiag.maxCoeff() : 0.0;
  double tol = 1e-10 * rmax;
  Eigen::Index rank = 0;
  while (rank < rdiag.size() && rdiag[rank] > tol) ++rank;
  QrSolve out;
  out.condition = rank > 0 ? rmax / rdiag[rank - 1] : 0.0;
  if (rank < Z.cols()) {
    for (Eigen::Index j = rank; j < Z.cols(); ++j)
      out.dependent_columns.push_back(
          static_cast<std::size_t>(qr.colsPermutation().indices()[j]));
    return out;
  }
  out.beta = qr.solve(y);
  return out;
}

Eigen::MatrixXd symmetric_inverse(const Eigen::MatrixXd& a, const char* what) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  lu.setThreshold(1e-13);
  if (!lu.isInvertible()) {
    double cond = 0;
    Eigen::VectorXd piv = lu.matrixLU().diagonal().cwiseAbs();
    if (piv.size() && piv.minCoeff() > 0) cond = piv.maxCoeff() / piv.minCoeff();
    throw ModelError(std::string(what) + " is singular (pivot condition " +
                     std::to_string(cond) + "); no regularization applied");
  }
  return lu.inverse();
}

}  // namespace

FitResult fit_fe_ols(const PanelTable& panel, const RegressionSpec& spec,
                     FeMethod method) {
  // Working copy so lag and interaction columns never leak into the input.
  std::vector<std::size_t> all(panel.n_rows());
  std::iota(all.begin(), all.end(), 0);
  PanelTable work = panel.select_rows(all);

  std::vector<std::string> names = spec.regressors;
  {
    std::set<std::string> seen(names.begin(), names.end());
    if (seen.size() != names.size()) throw ModelError("duplicate regressor in spec");
  }
  int max_lag = 0;
  for (int lag : spec.dependent_lags) {
    if (lag < 1) throw ModelError("dependent lag indices must be >= 1");
    max_lag = std::max(max_lag, lag);
  }
  if (max_lag > 0) build_lags(work, spec.dependent, max_lag);
  for (int lag : spec.dependent_lags)
    names.push_back(spec.dependent + "_lag" + std::to_string(lag));
  for (const auto& [a, b] : spec.interactions) {
    const auto& ca = work.column(a);
    const auto& cb = work.column(b);
    PanelTable::Column prod(work.n_rows());
    for (std::size_t r = 0; r < work.n_rows(); ++r)
      if (ca[r] && cb[r]) prod[r] = *ca[r] * *cb[r];
    std::string name = a + ":" + b;
    work.set_column(name, std::move(prod));
    names.push_back(name);
  }

  // Listwise deletion.
  const auto& dep = work.column(spec.dependent);
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < work.n_rows(); ++r) {
    if (!dep[r]) continue;
    bool complete = true;
    for (const std::string& n : names)
      if (!work.column(n)[r]) {
        complete = false;
        break;
      }
    if (complete) rows.push_back(r);
  }

  const std::size_t n = rows.size();
  const std::size_t k = names.size();
  if (n == 0) throw ModelError("empty sample after listwise deletion");

  // Unit and time-bucket codes over the kept rows.
  std::map<Currency, int> unit_code;
  std::map<std::int64_t, int> time_code;
  std::vector<int> unit(n), tbucket(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = rows[i];
    unit[i] = static_cast<int>(
        unit_code.emplace(work.units()[r], static_cast<int>(unit_code.size()))
            .first->second);
    std::int64_t tb = time_bucket(spec.time_fe, work.weeks()[r]);
    tbucket[i] = static_cast<int>(
        time_code.emplace(tb, static_cast<int>(time_code.size())).first->second);
  }
  const std::size_t n_units = unit_code.size();
  const std::size_t n_times = spec.time_fe == TimeFe::None ? 0 : time_code.size();

  Eigen::VectorXd y(n);
  Eigen::MatrixXd X(n, k);
  {
    const auto& dcol = work.column(spec.dependent);
    for (std::size_t i = 0; i < n; ++i) y[static_cast<Eigen::Index>(i)] = *dcol[rows[i]];
    for (std::size_t j = 0; j < k; ++j) {
      const auto& col = work.column(names[j]);
      for (std::size_t i = 0; i < n; ++i)
        X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = *col[rows[i]];
    }
  }

  // Time dummies, first bucket dropped to avoid collinearity with unit FE.
  std::size_t n_td = n_times > 1 ? n_times - 1 : 0;
  Eigen::MatrixXd TD = Eigen::MatrixXd::Zero(n, n_td);
  for (std::size_t i = 0; i < n; ++i)
    if (tbucket[i] > 0 && n_td > 0) TD(static_cast<Eigen::Index>(i), tbucket[i] - 1) = 1.0;

  auto demean_by_unit = [&](Eigen::MatrixXd& m) {
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_units),
                                                 m.cols());
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_units));
    for (std::size_t i = 0; i < n; ++i) {
      sums.row(unit[i]) += m.row(static_cast<Eigen::Index>(i));
      counts[unit[i]] += 1.0;
    }
    for (std::size_t i = 0; i < n; ++i)
      m.row(static_cast<Eigen::Index>(i)) -= sums.row(unit[i]) / counts[unit[i]];
  };

  Eigen::MatrixXd Z;      // full design handed to the solver
  Eigen::VectorXd ywork;  // matching response
  std::size_t absorbed = 0;
  if (method == FeMethod::Within && spec.unit_fe) {
    Eigen::MatrixXd Xw = X, TDw = TD;
    Eigen::MatrixXd ym = y;
    demean_by_unit(Xw);
    demean_by_unit(TDw);
    demean_by_unit(ym);
    Z.resize(n, k + n_td);
    Z << Xw, TDw;
    ywork = ym.col(0);
    absorbed = n_units;
  } else if (spec.unit_fe) {
    // Dummy encoding: full unit dummy set, no intercept.
    Eigen::MatrixXd UD = Eigen::MatrixXd::Zero(n, n_units);
    for (std::size_t i = 0; i < n; ++i) UD(static_cast<Eigen::Index>(i), unit[i]) = 1.0;
    Z.resize(n, k + n_td + n_units);
    Z << X, TD, UD;
    ywork = y;
  } else {
    Z.resize(n, k + n_td);
    Z << X, TD;
    ywork = y;
  }

  const std::size_t k_total = static_cast<std::size_t>(Z.cols()) + absorbed;
  if (n <= k_total)
    throw ModelError("sample too small: " + std::to_string(n) + " rows for " +
                     std::to_string(k_total) + " parameters");

  QrSolve sol = solve_ls(Z, ywork);
  if (!sol.dependent_columns.empty()) {
    std::string cols;
    for (std::size_t j : sol.dependent_columns) {
      if (!cols.empty()) cols += ", ";
      if (j < k)
        cols += names[j];
      else if (j < k + n_td)
        cols += "time_dummy_" + std::to_string(j - k + 1);
      else
        cols += "unit_dummy_" + std::to_string(j - k - n_td);
    }
    throw ModelError("rank-deficient design; collinear columns: " + cols);
  }

  Eigen::VectorXd resid = ywork - Z * sol.beta;

  // Currency-clustered sandwich covariance with the usual finite-sample
  // scaling G/(G-1) * (n-1)/(n-k).
  Eigen::MatrixXd bread = symmetric_inverse(Z.transpose() * Z, "X'X");
  Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(Z.cols(), Z.cols());
  {
    Eigen::MatrixXd scores = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_units),
                                                   Z.cols());
    for (std::size_t i = 0; i < n; ++i)
      scores.row(unit[i]) +=
          resid[static_cast<Eigen::Index>(i)] * Z.row(static_cast<Eigen::Index>(i));
    meat = scores.transpose() * scores;
  }
  double g = static_cast<double>(n_units);
  double adj = (g > 1 ? g / (g - 1) : 1.0) * (static_cast<double>(n) - 1) /
               (static_cast<double>(n) - static_cast<double>(k_total));
  Eigen::MatrixXd vcov = adj * bread * meat * bread;

  // Within-R^2: computed on unit-demeaned data in both methods.
  double ssr = resid.squaredNorm();
  double tss;
  {
    Eigen::MatrixXd ym = y;
    if (spec.unit_fe)
      demean_by_unit(ym);
    else
      ym.array() -= ym.mean();
    tss = ym.squaredNorm();
  }

  FitResult out;
  out.regressor_order = names;
  for (std::size_t j = 0; j < k; ++j) {
    double b = sol.beta[static_cast<Eigen::Index>(j)];
    double se = std::sqrt(vcov(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)));
    out.coefficients[names[j]] = b;
    out.standard_errors[names[j]] = se;
    double t = se > 0 ? b / se : 0.0;
    out.t_stats[names[j]] = t;
    out.p_values[names[j]] = normal_two_sided_p(t);
  }
  out.r_squared = tss > 0 ? 1.0 - ssr / tss : 0.0;
  out.n_obs = n;
  out.n_dropped = panel.n_rows() - n;
  out.n_clusters = n_units;
  out.condition_number = sol.condition;
  out.condition_warning = sol.condition > 1e6;
  return out;
}

std::vector<double> fod_transform(std::span<const double> series) {
  const std::size_t T = series.size();
  if (T < 2) throw ModelError("fod_transform: need at least 2 observations");
  std::vector<double> out(T - 1);
  // Suffix sums give each forward mean in one pass.
  double suffix = 0;
  std::vector<double> suffix_sums(T);
  for (std::size_t t = T; t-- > 0;) {
    suffix += series[t];
    suffix_sums[t] = suffix;
  }
  for (std::size_t t = 0; t + 1 < T; ++t) {
    double future_n = static_cast<double>(T - 1 - t);
    double future_mean = (suffix_sums[t + 1]) / future_n;
    double scale = std::sqrt(future_n / (future_n + 1.0));
    out[t] = scale * (series[t] - future_mean);
  }
  return out;
}

std::size_t GmmBlocks::n_obs() const {
  std::size_t n = 0;
  for (const auto& v : y) n += static_cast<std::size_t>(v.size());
  return n;
}

namespace {

// Maximal runs of consecutive weeks with all variables present, per unit.
struct Run {
  std::vector<std::vector<double>> values;  // per variable, per time
};

std::vector<Run> consecutive_runs(const PanelTable& panel,
                                  const std::vector<std::string>& variables) {
  std::map<Currency, std::vector<std::pair<std::int64_t, std::size_t>>> by_unit;
  for (std::size_t r = 0; r < panel.n_rows(); ++r)
    by_unit[panel.units()[r]].emplace_back(panel.weeks()[r], r);
  std::vector<const PanelTable::Column*> cols;
  for (const auto& v : variables) cols.push_back(&panel.column(v));

  std::vector<Run> runs;
  for (auto& [unit, rows] : by_unit) {
    std::sort(rows.begin(), rows.end());
    Run current;
    current.values.resize(variables.size());
    std::optional<std::int64_t> prev_week;
    auto flush = [&]() {
      if (!current.values[0].empty()) runs.push_back(std::move(current));
      current = Run{};
      current.values.resize(variables.size());
    };
    for (const auto& [week, r] : rows) {
      bool complete = true;
      for (const auto* c : cols)
        if (!(*c)[r]) {
          complete = false;
          break;
        }
      bool contiguous = prev_week && week == *prev_week + 1;
      if (!complete) {
        flush();
        prev_week.reset();
        continue;
      }
      if (!contiguous && prev_week) flush();
      for (std::size_t v = 0; v < cols.size(); ++v)
        current.values[v].push_back(*(*cols[v])[r]);
      prev_week = week;
    }
    flush();
  }
  return runs;
}

}  // namespace

GmmBlocks panel_var_blocks(const PanelTable& panel,
                           const std::vector<std::string>& variables,
                           int dependent_index, int lag_order) {
  if (lag_order < 1) throw ModelError("panel_var: lag order must be >= 1");
  const int l = lag_order;
  const std::size_t nv = variables.size();
  GmmBlocks blocks;
  for (std::size_t v = 0; v < nv; ++v)
    for (int j = 1; j <= l; ++j)
      blocks.regressor_names.push_back(variables[v] + "_lag" + std::to_string(j));
  for (std::size_t v = 0; v < nv; ++v)
    for (int j = 2; j <= 3; ++j)
      blocks.instrument_names.push_back(variables[v] + "_lag" + std::to_string(j));

  for (const Run& run : consecutive_runs(panel, variables)) {
    const int T = static_cast<int>(run.values[0].size());
    const int R = T - l;  // level-equation rows
    if (R < 2) continue;  // FOD needs at least two rows per unit

    // Stack the equation columns over rows t = l+1..T, then FOD each column.
    std::vector<double> dep(static_cast<std::size_t>(R));
    std::vector<std::vector<double>> regs(nv * static_cast<std::size_t>(l),
                                          std::vector<double>(static_cast<std::size_t>(R)));
    for (int s = 0; s < R; ++s) {
      int t = l + s;  // 0-based time of this row
      dep[static_cast<std::size_t>(s)] =
          run.values[static_cast<std::size_t>(dependent_index)][static_cast<std::size_t>(t)];
      std::size_t col = 0;
      for (std::size_t v = 0; v < nv; ++v)
        for (int j = 1; j <= l; ++j)
          regs[col++][static_cast<std::size_t>(s)] =
              run.values[v][static_cast<std::size_t>(t - j)];
    }
    std::vector<double> dep_fod = fod_transform(dep);
    std::vector<std::vector<double>> regs_fod;
    for (const auto& rcol : regs) regs_fod.push_back(fod_transform(rcol));

    // Usable rows: FOD value exists (s <= R-2) and the lag-3 level exists
    // (t - 3 >= 0).
    std::vector<int> usable;
    for (int s = 0; s + 1 < R; ++s) {
      int t = l + s;
      if (t - 3 >= 0) usable.push_back(s);
    }
    if (usable.empty()) continue;

    Eigen::VectorXd yb(static_cast<Eigen::Index>(usable.size()));
    Eigen::MatrixXd Xb(static_cast<Eigen::Index>(usable.size()),
                       static_cast<Eigen::Index>(nv * static_cast<std::size_t>(l)));
    Eigen::MatrixXd Zb(static_cast<Eigen::Index>(usable.size()),
                       static_cast<Eigen::Index>(2 * nv));
    for (std::size_t i = 0; i < usable.size(); ++i) {
      int s = usable[i];
      int t = l + s;
      yb[static_cast<Eigen::Index>(i)] = dep_fod[static_cast<std::size_t>(s)];
      for (std::size_t c = 0; c < regs_fod.size(); ++c)
        Xb(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
            regs_fod[c][static_cast<std::size_t>(s)];
      Eigen::Index zc = 0;
      for (std::size_t v = 0; v < nv; ++v)
        for (int j = 2; j <= 3; ++j)
          Zb(static_cast<Eigen::Index>(i), zc++) =
              run.values[v][static_cast<std::size_t>(t - j)];
    }
    blocks.y.push_back(std::move(yb));
    blocks.X.push_back(std::move(Xb));
    blocks.Z.push_back(std::move(Zb));
  }
  return blocks;
}

HansenTest hansen_j(const std::vector<Eigen::VectorXd>& residuals,
                    const std::vector<Eigen::MatrixXd>& instruments,
                    const Eigen::MatrixXd& w2, int n_parameters) {
  HansenTest out;
  int m = static_cast<int>(w2.rows());
  out.df = m - n_parameters;
  if (out.df < 0) throw ModelError("hansen_j: negative degrees of freedom");
  if (out.df == 0) {
    out.exactly_identified = true;
    out.j = 0;
    out.p = 1;
    return out;
  }
  Eigen::VectorXd g = Eigen::VectorXd::Zero(m);
  for (std::size_t i = 0; i < residuals.size(); ++i)
    g += instruments[i].transpose() * residuals[i];
  out.j = g.dot(w2 * g);
  out.p = chi2_upper_tail(out.j, out.df);
  return out;
}

GmmResult gmm_two_step(const GmmBlocks& blocks) {
  if (blocks.X.empty()) throw ModelError("gmm_two_step: no usable observations");
  const Eigen::Index q = blocks.X[0].cols();
  const Eigen::Index m = blocks.Z[0].cols();
  if (m < q)
    throw ModelError("under-identified: " + std::to_string(m) + " instruments for " +
                     std::to_string(q) + " parameters");

  Eigen::MatrixXd szz = Eigen::MatrixXd::Zero(m, m);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, q);  // sum Z_i'X_i
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m);     // sum Z_i'y_i
  for (std::size_t i = 0; i < blocks.X.size(); ++i) {
    szz += blocks.Z[i].transpose() * blocks.Z[i];
    A += blocks.Z[i].transpose() * blocks.X[i];
    b += blocks.Z[i].transpose() * blocks.y[i];
  }
  Eigen::MatrixXd w1 = symmetric_inverse(szz, "step-1 weighting matrix");

  auto gmm_solve = [&](const Eigen::MatrixXd& w) {
    Eigen::MatrixXd awa = A.transpose() * w * A;
    Eigen::MatrixXd awa_inv = symmetric_inverse(awa, "GMM normal-equation matrix");
    return std::make_pair(Eigen::VectorXd(awa_inv * (A.transpose() * w * b)), awa_inv);
  };

  GmmResult out;
  out.n_obs = blocks.n_obs();
  out.n_instruments = static_cast<std::size_t>(m);
  out.step1 = gmm_solve(w1).first;

  // Step-1 residual moments.
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(m, m);
  double resid_scale = 0;
  std::vector<Eigen::VectorXd> e1(blocks.X.size());
  for (std::size_t i = 0; i < blocks.X.size(); ++i) {
    e1[i] = blocks.y[i] - blocks.X[i] * out.step1;
    resid_scale = std::max(resid_scale, e1[i].lpNorm<Eigen::Infinity>());
    Eigen::MatrixXd ze = blocks.Z[i].transpose() * e1[i];
    S += ze * ze.transpose();
  }

  double y_scale = 0;
  for (const auto& yi : blocks.y)
    y_scale = std::max(y_scale, yi.lpNorm<Eigen::Infinity>());

  Eigen::FullPivLU<Eigen::MatrixXd> lu(S);
  lu.setThreshold(1e-13);
  if (!lu.isInvertible()) {
    if (resid_scale <= 1e-9 * std::max(1.0, y_scale)) {
      // Exact fit: the step-1 solution already zeroes the moments.
      out.coef = out.step1;
      out.se = Eigen::VectorXd::Zero(q);
      out.degenerate_step2 = true;
      out.exactly_identified = (m == q);
      out.hansen_df = static_cast<int>(m - q);
      return out;
    }
    Eigen::VectorXd piv = lu.matrixLU().diagonal().cwiseAbs();
    double cond = piv.minCoeff() > 0 ? piv.maxCoeff() / piv.minCoeff()
                                     : std::numeric_limits<double>::infinity();
    throw ModelError("step-2 weighting matrix is singular (pivot condition " +
                     std::to_string(cond) + "); no regularization applied");
  }
  Eigen::MatrixXd w2 = lu.inverse();

  auto [beta2, awa_inv] = gmm_solve(w2);
  out.coef = beta2;
  out.se = awa_inv.diagonal().cwiseSqrt();

  std::vector<Eigen::VectorXd> e2(blocks.X.size());
  for (std::size_t i = 0; i < blocks.X.size(); ++i)
    e2[i] = blocks.y[i] - blocks.X[i] * out.coef;
  HansenTest h = hansen_j(e2, blocks.Z, w2, static_cast<int>(q));
  out.hansen_j = h.j;
  out.hansen_df = h.df;
  out.hansen_p = h.p;
  out.exactly_identified = h.exactly_identified;
  return out;
}

PanelVarResult panel_var(const PanelTable& panel,
                         const std::vector<std::string>& variables, int lag_order) {
  PanelVarResult out;
  out.lag_order = lag_order;
  out.variables = variables;
  for (std::size_t v = 0; v < variables.size(); ++v) {
    GmmBlocks blocks = panel_var_blocks(panel, variables, static_cast<int>(v), lag_order);
    if (blocks.X.empty())
      throw ModelError("panel_var: no usable rows for equation " + variables[v]);
    out.equations.push_back(gmm_two_step(blocks));
    out.n_units = std::max(out.n_units, blocks.X.size());
  }
  return out;
}

std::pair<PanelTable, PanelTable> split_by_constraint(const PanelTable& panel) {
  const auto& flag = panel.column("constrained");
  std::vector<std::size_t> unconstrained, constrained;
  for (std::size_t r = 0; r < panel.n_rows(); ++r) {
    if (!flag[r]) continue;
    (*flag[r] != 0 ? constrained : unconstrained).push_back(r);
  }
  return {panel.select_rows(unconstrained), panel.select_rows(constrained)};
}

}  // namespace btcpanel
