#pragma once

#include <map>
#include <span>

#include "btcpanel/types.hpp"

namespace btcpanel {

// Bounds on the volume-weighted / median price ratio; a daily price whose
// ratio falls outside [lower, upper] is replaced by the bucket median.
struct RatioBounds {
  double lower = 0.85;
  double upper = 1.08;
};

// Aggregates trades into one DailyPrice per (currency, date) bucket.
// Summation follows input order within a bucket, so output is independent of
// any parallel scheduling of buckets. The median of an even-sized bucket is
// the lower-middle sorted price (an actually traded price).
std::vector<DailyPrice> aggregate_daily(std::span<const Trade> trades,
                                        RatioBounds bounds = {});

// Pooled 0.01/0.99 quantiles of the vw/median ratio over all buckets,
// recomputing the correction band from a dataset.
RatioBounds ratio_quantile_bounds(std::span<const Trade> trades);

// Shadow rate: price of one USD in the local currency, from same-day BTC
// prices. Throws DomainError on date mismatch or non-USD denominator.
double shadow_rate(const DailyPrice& local, const DailyPrice& usd);

// 100 * (ser - oer) / oer.
double premium(double ser, double oer);

// 100 * (close - open) / open.
double depreciation(double open_rate, double close_rate);

enum class Horizon { Hour, Week };

// Log return per horizon bucket using the first and last bar in the bucket.
// Key is the hour index (seconds/3600) or week serial.
std::map<std::int64_t, double> market_return(std::span<const MarketBar> bars,
                                             Horizon horizon);

struct WeeklyVolatility {
  double value = 0;
  bool empty = false;  // no hourly returns fell in the week
};

// Sum of squared hourly log-returns within each week.
std::map<std::int64_t, WeeklyVolatility> realized_volatility(
    const std::map<std::int64_t, double>& hourly_returns);

enum class WeeklyAggregation { Mean, VolumeWeighted };

struct PanelOptions {
  WeeklyAggregation aggregation = WeeklyAggregation::Mean;
  int oer_fill_limit_days = 5;
};

struct PanelBuildReport {
  std::vector<Currency> excluded_no_oer;
};

// Joins daily prices, official rates, market series, blockchain metrics and
// regulatory series into the weekly currency panel. Weeks without trades for
// a currency produce no row.
std::vector<WeeklyPanelRow> build_weekly_panel(
    std::span<const DailyPrice> daily, std::span<const OerQuote> oer,
    std::span<const BlockchainMetrics> blockchain, std::span<const MarketBar> bars,
    std::span<const RegulatorySeries> regulatory, PanelOptions options = {},
    PanelBuildReport* report = nullptr);

// Forward-filled official rate lookup (gap capped at `limit` days).
class FilledOer {
 public:
  FilledOer(std::span<const OerQuote> quotes, int limit_days);
  std::optional<double> at(const Currency& ccy, Date d) const;
  bool has_currency(const Currency& ccy) const;

 private:
  std::map<Currency, std::map<std::int64_t, double>> by_currency_;
  int limit_;
};

void write_daily_prices(std::ostream& out, std::span<const DailyPrice> rows);
void write_series(std::ostream& out, std::span<const SeriesPoint> rows);
void write_panel(std::ostream& out, std::span<const WeeklyPanelRow> rows);
std::vector<WeeklyPanelRow> read_panel(std::istream& in);

// Daily SER/premium series for every currency/date where both the USD daily
// price and a filled official rate exist.
std::vector<SeriesPoint> build_series(std::span<const DailyPrice> daily,
                                      const FilledOer& oer);

}  // namespace btcpanel
