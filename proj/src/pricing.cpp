#include "btcpanel/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "btcpanel/csv.hpp"
#include "btcpanel/errors.hpp"
#include "btcpanel/ingest.hpp"

namespace btcpanel {

namespace {

double lower_middle_median(std::vector<double>& prices) {
  std::size_t k = (prices.size() - 1) / 2;
  std::nth_element(prices.begin(), prices.begin() + static_cast<std::ptrdiff_t>(k),
                   prices.end());
  return prices[k];
}

struct Bucket {
  Currency currency;
  Date date;
  double sum_xp = 0;
  double sum_x = 0;
  std::vector<double> prices;
};

// Buckets in (currency, date) order; trade order preserved within a bucket.
std::vector<Bucket> bucketize(std::span<const Trade> trades) {
  std::map<std::pair<Currency, std::int64_t>, std::size_t> index;
  std::vector<Bucket> buckets;
  for (const Trade& t : trades) {
    auto key = std::make_pair(t.currency, t.timestamp.date().days);
    auto it = index.find(key);
    std::size_t i;
    if (it == index.end()) {
      buckets.push_back(Bucket{t.currency, t.timestamp.date(), 0, 0, {}});
      i = buckets.size() - 1;
      index.emplace(std::move(key), i);
    } else {
      i = it->second;
    }
    buckets[i].sum_xp += t.volume_btc * t.price;
    buckets[i].sum_x += t.volume_btc;
    buckets[i].prices.push_back(t.price);
  }
  std::sort(buckets.begin(), buckets.end(), [](const Bucket& a, const Bucket& b) {
    return std::tie(a.currency, a.date.days) < std::tie(b.currency, b.date.days);
  });
  return buckets;
}

}  // namespace

std::vector<DailyPrice> aggregate_daily(std::span<const Trade> trades,
                                        RatioBounds bounds) {
  std::vector<DailyPrice> out;
  for (Bucket& b : bucketize(trades)) {
    DailyPrice p;
    p.currency = b.currency;
    p.date = b.date;
    p.n_trades = static_cast<std::int64_t>(b.prices.size());
    p.volume_btc = b.sum_x;
    p.vw_price = b.sum_xp / b.sum_x;
    p.median_price = lower_middle_median(b.prices);
    double ratio = p.vw_price / p.median_price;
    p.corrected = ratio < bounds.lower || ratio > bounds.upper;
    out.push_back(std::move(p));
  }
  return out;
}

RatioBounds ratio_quantile_bounds(std::span<const Trade> trades) {
  std::vector<double> ratios;
  for (Bucket& b : bucketize(trades)) {
    double vw = b.sum_xp / b.sum_x;
    ratios.push_back(vw / lower_middle_median(b.prices));
  }
  if (ratios.empty()) throw DomainError("no trades: cannot compute ratio quantiles");
  std::sort(ratios.begin(), ratios.end());
  auto quantile = [&](double q) {
    // Linear interpolation between order statistics (type-7 quantile).
    double pos = q * static_cast<double>(ratios.size() - 1);
    std::size_t lo = static_cast<std::size_t>(pos);
    std::size_t hi = std::min(lo + 1, ratios.size() - 1);
    double frac = pos - static_cast<double>(lo);
    return ratios[lo] * (1 - frac) + ratios[hi] * frac;
  };
  return RatioBounds{quantile(0.01), quantile(0.99)};
}

double shadow_rate(const DailyPrice& local, const DailyPrice& usd) {
  if (local.date != usd.date)
    throw DomainError("shadow_rate: date mismatch (" + format_date(local.date) +
                      " vs " + format_date(usd.date) + ")");
  if (usd.currency != "USD")
    throw DomainError("shadow_rate: denominator must be the USD price");
  return local.final_price() / usd.final_price();
}

double premium(double ser, double oer) {
  if (oer <= 0) throw DomainError("premium: official rate must be positive");
  return 100.0 * (ser - oer) / oer;
}

double depreciation(double open_rate, double close_rate) {
  if (open_rate <= 0) throw DomainError("depreciation: open rate must be positive");
  return 100.0 * (close_rate - open_rate) / open_rate;
}

std::map<std::int64_t, double> market_return(std::span<const MarketBar> bars,
                                             Horizon horizon) {
  // first/last bar per bucket; bars are required to be time-ordered.
  std::map<std::int64_t, std::pair<double, double>> open_close;
  for (const MarketBar& b : bars) {
    std::int64_t key = horizon == Horizon::Hour ? b.timestamp.hour_bucket()
                                                : week_serial(b.timestamp.date());
    auto [it, inserted] = open_close.emplace(key, std::make_pair(b.price_usd, b.price_usd));
    if (!inserted) it->second.second = b.price_usd;
  }
  std::map<std::int64_t, double> out;
  for (const auto& [key, oc] : open_close) out[key] = std::log(oc.second / oc.first);
  return out;
}

std::map<std::int64_t, WeeklyVolatility> realized_volatility(
    const std::map<std::int64_t, double>& hourly_returns) {
  std::map<std::int64_t, WeeklyVolatility> out;
  for (const auto& [hour, r] : hourly_returns) {
    std::int64_t ws = week_serial(Timestamp{hour * 3600}.date());
    out[ws].value += r * r;
  }
  return out;
}

FilledOer::FilledOer(std::span<const OerQuote> quotes, int limit_days)
    : limit_(limit_days) {
  for (const OerQuote& q : quotes) by_currency_[q.currency][q.date.days] = q.rate;
}

bool FilledOer::has_currency(const Currency& ccy) const {
  return by_currency_.contains(ccy);
}

std::optional<double> FilledOer::at(const Currency& ccy, Date d) const {
  auto it = by_currency_.find(ccy);
  if (it == by_currency_.end()) return std::nullopt;
  auto q = it->second.upper_bound(d.days);
  if (q == it->second.begin()) return std::nullopt;
  --q;
  if (d.days - q->first > limit_) return std::nullopt;
  return q->second;
}

std::vector<SeriesPoint> build_series(std::span<const DailyPrice> daily,
                                      const FilledOer& oer) {
  std::map<std::int64_t, const DailyPrice*> usd;
  for (const DailyPrice& p : daily)
    if (p.currency == "USD") usd[p.date.days] = &p;
  std::vector<SeriesPoint> out;
  for (const DailyPrice& p : daily) {
    auto u = usd.find(p.date.days);
    if (u == usd.end()) continue;
    auto rate = oer.at(p.currency, p.date);
    if (!rate) continue;
    double ser = shadow_rate(p, *u->second);
    out.push_back(SeriesPoint{p.date, p.currency, ser, premium(ser, *rate)});
  }
  return out;
}

std::vector<WeeklyPanelRow> build_weekly_panel(
    std::span<const DailyPrice> daily, std::span<const OerQuote> oer,
    std::span<const BlockchainMetrics> blockchain, std::span<const MarketBar> bars,
    std::span<const RegulatorySeries> regulatory, PanelOptions options,
    PanelBuildReport* report) {
  FilledOer filled(oer, options.oer_fill_limit_days);

  std::map<std::int64_t, const DailyPrice*> usd;
  std::set<Currency> currencies;
  for (const DailyPrice& p : daily) {
    if (p.currency == "USD") usd[p.date.days] = &p;
    currencies.insert(p.currency);
  }
  for (const Currency& c : currencies) {
    if (c == "USD") continue;  // numeraire, never carries an official rate
    if (!filled.has_currency(c) && report) report->excluded_no_oer.push_back(c);
  }

  // Weekly premium accumulators per (currency, week).
  struct PremiumAcc {
    double sum = 0;
    double wsum = 0;
    double weight = 0;
    int n = 0;
  };
  std::map<std::pair<Currency, std::int64_t>, PremiumAcc> premiums;
  for (const DailyPrice& p : daily) {
    if (!filled.has_currency(p.currency)) continue;
    auto u = usd.find(p.date.days);
    if (u == usd.end()) continue;
    auto rate = filled.at(p.currency, p.date);
    if (!rate) continue;
    double prem = premium(shadow_rate(p, *u->second), *rate);
    auto& acc = premiums[{p.currency, week_serial(p.date)}];
    acc.sum += prem;
    acc.wsum += prem * p.volume_btc;
    acc.weight += p.volume_btc;
    acc.n += 1;
  }

  // Weekly blockchain means.
  struct BlockAcc {
    double confirm = 0, fee = 0, ntx = 0;
    int n = 0;
  };
  std::map<std::int64_t, BlockAcc> blocks;
  for (const BlockchainMetrics& m : blockchain) {
    auto& acc = blocks[week_serial(m.date)];
    acc.confirm += m.median_confirm_minutes;
    acc.fee += m.avg_fee_usd;
    acc.ntx += static_cast<double>(m.n_transactions);
    acc.n += 1;
  }

  auto weekly_returns = market_return(bars, Horizon::Week);
  auto vol = realized_volatility(market_return(bars, Horizon::Hour));

  // Latest regulatory state per (currency, day), sampled at the week's end.
  std::map<Currency, std::map<std::int64_t, const RegulatorySeries*>> reg;
  for (const RegulatorySeries& r : regulatory) reg[r.currency][r.date.days] = &r;
  auto reg_at_week_end = [&](const Currency& c,
                             std::int64_t ws) -> const RegulatorySeries* {
    auto it = reg.find(c);
    if (it == reg.end()) return nullptr;
    auto q = it->second.upper_bound(week_sunday(ws).days);
    if (q == it->second.begin()) return nullptr;
    return std::prev(q)->second;
  };

  std::vector<WeeklyPanelRow> out;
  for (const auto& [key, acc] : premiums) {
    const auto& [ccy, ws] = key;
    WeeklyPanelRow row;
    row.currency = ccy;
    row.week = ws;
    row.premium_pct = options.aggregation == WeeklyAggregation::VolumeWeighted
                          ? acc.wsum / acc.weight
                          : acc.sum / acc.n;
    auto open = filled.at(ccy, week_monday(ws));
    auto close = filled.at(ccy, week_sunday(ws));
    if (open && close) row.depr_pct = depreciation(*open, *close);
    if (auto it = weekly_returns.find(ws); it != weekly_returns.end())
      row.btc_return = it->second;
    if (auto it = vol.find(ws); it != vol.end()) row.btc_volatility = it->second.value;
    if (auto it = blocks.find(ws); it != blocks.end()) {
      row.median_confirm_minutes = it->second.confirm / it->second.n;
      row.avg_fee_usd = it->second.fee / it->second.n;
      row.n_transactions = it->second.ntx / it->second.n;
    }
    if (const RegulatorySeries* r = reg_at_week_end(ccy, ws)) {
      row.peg = r->peg;
      row.cc = r->cc;
      row.constrained = r->constrained;
      row.remittance_cost_pct = r->remittance_cost_pct;
      row.freedom_score = r->freedom_score;
    }
    out.push_back(std::move(row));
  }
  return out;
}

namespace {

std::string opt_str(const std::optional<double>& v) {
  return v ? format_decimal(*v) : std::string();
}
std::string opt_str(const std::optional<int>& v) {
  return v ? std::to_string(*v) : std::string();
}

}  // namespace

void write_daily_prices(std::ostream& out, std::span<const DailyPrice> rows) {
  out << "date,currency,vw_price,median_price,n_trades,volume_btc,corrected\n";
  for (const DailyPrice& p : rows)
    out << format_date(p.date) << ',' << p.currency << ',' << format_decimal(p.vw_price)
        << ',' << format_decimal(p.median_price) << ',' << p.n_trades << ','
        << format_decimal(p.volume_btc) << ',' << (p.corrected ? 1 : 0) << '\n';
}

void write_series(std::ostream& out, std::span<const SeriesPoint> rows) {
  out << "date,currency,ser,premium_pct\n";
  for (const SeriesPoint& s : rows)
    out << format_date(s.date) << ',' << s.currency << ',' << format_decimal(s.ser)
        << ',' << format_decimal(s.premium_pct) << '\n';
}

inline constexpr std::string_view kPanelHeader =
    "week,currency,premium_pct,depr_pct,btc_return,btc_volatility,"
    "median_confirm_minutes,avg_fee_usd,n_transactions,remittance_cost_pct,peg,cc,"
    "constrained,freedom_score";

void write_panel(std::ostream& out, std::span<const WeeklyPanelRow> rows) {
  out << kPanelHeader << '\n';
  for (const WeeklyPanelRow& r : rows)
    out << week_id(r.week) << ',' << r.currency << ',' << format_decimal(r.premium_pct)
        << ',' << opt_str(r.depr_pct) << ',' << opt_str(r.btc_return) << ','
        << opt_str(r.btc_volatility) << ',' << opt_str(r.median_confirm_minutes) << ','
        << opt_str(r.avg_fee_usd) << ',' << opt_str(r.n_transactions) << ','
        << opt_str(r.remittance_cost_pct) << ',' << opt_str(r.peg) << ','
        << opt_str(r.cc) << ',' << opt_str(r.constrained) << ','
        << opt_str(r.freedom_score) << '\n';
}

std::vector<WeeklyPanelRow> read_panel(std::istream& in) {
  CsvReader r(in);
  r.expect_header(kPanelHeader);
  std::vector<WeeklyPanelRow> out;
  auto opt_dec = [](std::string_view s) -> std::optional<double> {
    if (s.empty()) return std::nullopt;
    return parse_decimal(s);
  };
  auto opt_int = [](std::string_view s) -> std::optional<int> {
    if (s.empty()) return std::nullopt;
    auto v = parse_integer(s);
    if (!v) return std::nullopt;
    return static_cast<int>(*v);
  };
  while (r.next_row()) {
    if (r.fields().size() != 14)
      throw SchemaError("panel row with wrong field count at line " +
                        std::to_string(r.line_number()));
    auto ws = parse_week_id(r.fields()[0]);
    auto prem = parse_decimal(r.fields()[2]);
    if (!ws || !prem)
      throw SchemaError("bad panel row at line " + std::to_string(r.line_number()));
    WeeklyPanelRow row;
    row.week = *ws;
    row.currency = Currency(r.fields()[1]);
    row.premium_pct = *prem;
    row.depr_pct = opt_dec(r.fields()[3]);
    row.btc_return = opt_dec(r.fields()[4]);
    row.btc_volatility = opt_dec(r.fields()[5]);
    row.median_confirm_minutes = opt_dec(r.fields()[6]);
    row.avg_fee_usd = opt_dec(r.fields()[7]);
    row.n_transactions = opt_dec(r.fields()[8]);
    row.remittance_cost_pct = opt_dec(r.fields()[9]);
    row.peg = opt_int(r.fields()[10]);
    row.cc = opt_dec(r.fields()[11]);
    row.constrained = opt_int(r.fields()[12]);
    row.freedom_score = opt_dec(r.fields()[13]);
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace btcpanel
