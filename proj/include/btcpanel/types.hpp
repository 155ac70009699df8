#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "btcpanel/dates.hpp"

namespace btcpanel {

using Currency = std::string;  // ISO-4217 code

// One bilateral P2P transaction.
struct Trade {
  Timestamp timestamp;
  Currency currency;
  double volume_btc = 0;  // BTC, > 0
  double price = 0;       // currency units per BTC, > 0
};

// Official exchange rate quote, currency per USD at the daily close.
struct OerQuote {
  Date date;
  Currency currency;
  double rate = 0;  // > 0
};

// Daily blockchain network state.
struct BlockchainMetrics {
  Date date;
  double median_confirm_minutes = 0;
  double avg_fee_usd = 0;
  std::int64_t n_transactions = 0;
};

// 5-minute BTC/USD price from a centralized exchange.
struct MarketBar {
  Timestamp timestamp;
  double price_usd = 0;
};

enum class RegimeCategory { HardPeg, SoftPeg, Floating, Residual };

std::optional<RegimeCategory> parse_regime(std::string_view s);
std::string regime_name(RegimeCategory r);

inline constexpr int kAssetClasses = 10;

// Per-country regime and capital-control flags, effective from a given date.
// Flags are grouped by (direction, asset class); each group holds that asset
// class's subcategory dummies, nullopt marking a missing observation.
struct AreaerRecord {
  std::string country;
  Currency currency;
  Date effective_date;
  RegimeCategory regime = RegimeCategory::Floating;
  // controls[direction][asset_class-1], direction 0 = inflow, 1 = outflow.
  std::vector<std::optional<int>> controls[2][kAssetClasses];
};

// Cost of sending $500 abroad, percent.
struct RemittanceQuote {
  Date date;
  Currency sending_currency;
  double cost_pct_500 = 0;  // >= 0
};

// Annual financial-openness score, 0..100.
struct FreedomScore {
  int year = 0;
  std::string country;
  Currency currency;
  double score = 0;
};

using CurrencyRegistry = std::set<Currency>;

// Robust daily price aggregate for one (currency, date) bucket.
struct DailyPrice {
  Date date;
  Currency currency;
  double vw_price = 0;
  double median_price = 0;
  std::int64_t n_trades = 0;
  double volume_btc = 0;
  bool corrected = false;  // median substituted for the volume-weighted price

  double final_price() const { return corrected ? median_price : vw_price; }
};

// Daily shadow rate and premium for one currency.
struct SeriesPoint {
  Date date;
  Currency currency;
  double ser = 0;          // currency per USD
  double premium_pct = 0;  // percent, > -100
};

// One weekly currency-panel observation. Absent fields are values the source
// data could not supply for that week.
struct WeeklyPanelRow {
  std::int64_t week = 0;  // week serial (Monday start)
  Currency currency;
  double premium_pct = 0;
  std::optional<double> depr_pct;
  std::optional<double> btc_return;
  std::optional<double> btc_volatility;
  std::optional<double> median_confirm_minutes;
  std::optional<double> avg_fee_usd;
  std::optional<double> n_transactions;
  std::optional<double> remittance_cost_pct;
  std::optional<int> peg;
  std::optional<double> cc;
  std::optional<int> constrained;
  std::optional<double> freedom_score;
};

// Daily regulatory state for one currency.
struct RegulatorySeries {
  Currency currency;
  Date date;
  std::optional<int> peg;
  std::optional<double> cc;
  std::optional<int> constrained;
  std::optional<double> remittance_cost_pct;
  std::optional<double> freedom_score;
};

}  // namespace btcpanel
