#include "btcpanel/regulation.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>

#include "btcpanel/csv.hpp"
#include "btcpanel/errors.hpp"

namespace btcpanel {

int peg_dummy(const AreaerRecord& record) {
  return record.regime == RegimeCategory::Floating ? 0 : 1;
}

double capital_control_index(const AreaerRecord& record, CcReport* report) {
  double total = 0;
  for (int k = 0; k < 2; ++k) {
    double direction_sum = 0;
    for (int i = 0; i < kAssetClasses; ++i) {
      const auto& group = record.controls[k][i];
      int present = 0, set = 0;
      for (const auto& flag : group) {
        if (flag) {
          ++present;
          set += *flag;
        }
      }
      if (present == 0) {
        if (report) report->all_missing_groups.emplace_back(k, i + 1);
        continue;
      }
      direction_sum += static_cast<double>(set) / present;
    }
    total += direction_sum / kAssetClasses;
  }
  return total / 2.0;
}

int constrained_dummy(int peg, double cc, double delta) {
  return (peg == 1 && cc >= delta) ? 1 : 0;
}

std::optional<double> currency_average(std::span<const double> country_values) {
  if (country_values.empty()) return std::nullopt;
  double sum = std::accumulate(country_values.begin(), country_values.end(), 0.0);
  return sum / static_cast<double>(country_values.size());
}

template <typename V>
void StepSeries<V>::add(Date effective, V value) {
  auto [it, inserted] = points_.emplace(effective.days, std::move(value));
  (void)it;
  if (!inserted)
    throw ConfigError("overlapping effective dates at " + format_date(effective));
}

template <typename V>
std::optional<V> StepSeries<V>::at(Date d) const {
  auto it = points_.upper_bound(d.days);
  if (it == points_.begin()) return std::nullopt;
  return std::prev(it)->second;
}

template class StepSeries<double>;
template class StepSeries<int>;
template class StepSeries<std::pair<int, double>>;

RemittanceIndex::RemittanceIndex(std::span<const RemittanceQuote> quotes,
                                 int carry_limit_weeks)
    : carry_limit_(carry_limit_weeks) {
  std::map<Currency, std::map<std::int64_t, std::pair<double, int>>> acc;
  for (const RemittanceQuote& q : quotes) {
    auto& cell = acc[q.sending_currency][week_serial(q.date)];
    cell.first += q.cost_pct_500;
    cell.second += 1;
  }
  for (auto& [ccy, weeks] : acc)
    for (auto& [w, cell] : weeks) weekly_[ccy][w] = cell.first / cell.second;
}

std::optional<double> RemittanceIndex::at(const Currency& ccy, std::int64_t week) const {
  auto it = weekly_.find(ccy);
  if (it == weekly_.end()) return std::nullopt;
  auto q = it->second.upper_bound(week);
  if (q == it->second.begin()) return std::nullopt;
  --q;
  if (week - q->first > carry_limit_) return std::nullopt;
  return q->second;
}

std::vector<RegulatorySeries> build_regulatory_daily(
    std::span<const AreaerRecord> areaer, std::span<const RemittanceQuote> remittance,
    std::span<const FreedomScore> freedom, Date start, Date end,
    const RegulatoryOptions& options) {
  // Country-level daily step series of (peg, cc).
  std::map<std::string, StepSeries<std::pair<int, double>>> by_country;
  std::map<Currency, std::set<std::string>> currency_countries;
  for (const AreaerRecord& rec : areaer) {
    by_country[rec.country].add(rec.effective_date,
                                {peg_dummy(rec), capital_control_index(rec)});
    currency_countries[rec.currency].insert(rec.country);
  }

  // Annual freedom scores stepped on January 1, averaged per currency.
  std::map<Currency, std::map<int, std::vector<double>>> ff_by_year;
  for (const FreedomScore& s : freedom) ff_by_year[s.currency][s.year].push_back(s.score);
  std::map<Currency, StepSeries<double>> ff;
  for (const auto& [ccy, years] : ff_by_year)
    for (const auto& [year, scores] : years)
      ff[ccy].add(make_date(year, 1, 1), *currency_average(scores));

  RemittanceIndex rem(remittance, options.remittance_carry_weeks);

  std::set<Currency> currencies;
  for (const auto& [ccy, _] : currency_countries) currencies.insert(ccy);
  for (const auto& [ccy, _] : ff) currencies.insert(ccy);
  for (const RemittanceQuote& q : remittance) currencies.insert(q.sending_currency);

  std::vector<RegulatorySeries> out;
  for (const Currency& ccy : currencies) {
    for (Date d = start; d <= end; d = d.next()) {
      RegulatorySeries row;
      row.currency = ccy;
      row.date = d;
      if (auto cc_it = currency_countries.find(ccy); cc_it != currency_countries.end()) {
        std::vector<double> pegs, ccs;
        for (const std::string& country : cc_it->second) {
          auto v = by_country.at(country).at(d);
          if (!v) continue;
          pegs.push_back(v->first);
          ccs.push_back(v->second);
        }
        if (auto peg_avg = currency_average(pegs))
          row.peg = *peg_avg >= options.peg_binarize_cutoff ? 1 : 0;
        row.cc = currency_average(ccs);
        if (row.peg && row.cc)
          row.constrained = constrained_dummy(*row.peg, *row.cc, options.delta);
      }
      row.remittance_cost_pct = rem.at(ccy, week_serial(d));
      if (auto f = ff.find(ccy); f != ff.end()) row.freedom_score = f->second.at(d);
      out.push_back(std::move(row));
    }
  }
  return out;
}

void write_regulatory(std::ostream& out, std::span<const RegulatorySeries> rows) {
  out << "currency,date,peg,cc,constrained,remittance_cost_pct,freedom_score\n";
  auto opt_d = [](const std::optional<double>& v) {
    return v ? format_decimal(*v) : std::string();
  };
  auto opt_i = [](const std::optional<int>& v) {
    return v ? std::to_string(*v) : std::string();
  };
  for (const RegulatorySeries& r : rows)
    out << r.currency << ',' << format_date(r.date) << ',' << opt_i(r.peg) << ','
        << opt_d(r.cc) << ',' << opt_i(r.constrained) << ','
        << opt_d(r.remittance_cost_pct) << ',' << opt_d(r.freedom_score) << '\n';
}

}  // namespace btcpanel
