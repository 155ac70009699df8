#pragma once

#include <map>
#include <span>

#include "btcpanel/types.hpp"

namespace btcpanel {

// 0 for floating arrangements, 1 for hard peg, soft peg and residual.
int peg_dummy(const AreaerRecord& record);

struct CcReport {
  // (direction, asset class) groups whose flags were all missing; each
  // contributes 0 to the index.
  std::vector<std::pair<int, int>> all_missing_groups;
};

// Equal-weighted capital-control index in [0,1]. Missing flags shrink the
// subcategory denominator; an all-missing group contributes 0.
double capital_control_index(const AreaerRecord& record, CcReport* report = nullptr);

// 1 iff peg = 1 and cc >= delta.
int constrained_dummy(int peg, double cc, double delta);

// Unweighted mean over countries sharing a currency; empty input -> absent.
std::optional<double> currency_average(std::span<const double> country_values);

// Piecewise-constant daily expansion of per-currency dated values. Values
// change exactly on effective dates; the series is absent before the first
// record. Duplicate effective dates for one currency throw ConfigError.
template <typename V>
class StepSeries {
 public:
  void add(Date effective, V value);
  std::optional<V> at(Date d) const;
  bool empty() const { return points_.empty(); }

 private:
  std::map<std::int64_t, V> points_;
};

// Weekly remittance cost index: mean cost over quotes dated within the week,
// carrying the most recent prior index forward at most `carry_limit_weeks`.
class RemittanceIndex {
 public:
  RemittanceIndex(std::span<const RemittanceQuote> quotes, int carry_limit_weeks = 8);
  std::optional<double> at(const Currency& ccy, std::int64_t week) const;

 private:
  std::map<Currency, std::map<std::int64_t, double>> weekly_;
  int carry_limit_;
};

struct RegulatoryOptions {
  double delta = 0.7;               // constrained-dummy threshold
  double peg_binarize_cutoff = 0.5; // currency-averaged peg >= cutoff -> 1
  int remittance_carry_weeks = 8;
};

// Full per-currency daily regulatory series over [start, end]:
// country-level peg/cc stepped daily, averaged across countries sharing the
// currency, peg re-binarized, constrained derived, remittance cost attached
// by week, freedom score stepped annually.
std::vector<RegulatorySeries> build_regulatory_daily(
    std::span<const AreaerRecord> areaer, std::span<const RemittanceQuote> remittance,
    std::span<const FreedomScore> freedom, Date start, Date end,
    const RegulatoryOptions& options = {});

void write_regulatory(std::ostream& out, std::span<const RegulatorySeries> rows);

}  // namespace btcpanel
