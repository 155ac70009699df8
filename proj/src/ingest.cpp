#include "btcpanel/ingest.hpp"

#include <algorithm>
#include <map>
#include <ostream>

namespace btcpanel {

namespace {

Rejection reject(const CsvReader& r, std::string reason) {
  return Rejection{r.line_number(), std::move(reason), std::string(r.raw_line())};
}

bool check_field_count(const CsvReader& r, std::size_t n,
                       std::vector<Rejection>& rejections) {
  if (r.fields().size() == n) return true;
  rejections.push_back(reject(r, "expected " + std::to_string(n) + " fields, got " +
                                     std::to_string(r.fields().size())));
  return false;
}

}  // namespace

std::optional<RegimeCategory> parse_regime(std::string_view s) {
  if (s == "hard_peg") return RegimeCategory::HardPeg;
  if (s == "soft_peg") return RegimeCategory::SoftPeg;
  if (s == "floating") return RegimeCategory::Floating;
  if (s == "residual") return RegimeCategory::Residual;
  return std::nullopt;
}

std::string regime_name(RegimeCategory r) {
  switch (r) {
    case RegimeCategory::HardPeg: return "hard_peg";
    case RegimeCategory::SoftPeg: return "soft_peg";
    case RegimeCategory::Floating: return "floating";
    case RegimeCategory::Residual: return "residual";
  }
  return "?";
}

ParseResult<Trade> parse_trades(std::istream& source, const CurrencyRegistry& registry) {
  CsvReader r(source);
  r.expect_header(kTradesHeader);
  ParseResult<Trade> out;
  while (r.next_row()) {
    if (!check_field_count(r, 4, out.rejections)) continue;
    auto ts = parse_timestamp(r.fields()[0]);
    if (!ts) {
      out.rejections.push_back(reject(r, "bad timestamp"));
      continue;
    }
    Currency ccy(r.fields()[1]);
    if (!registry.empty() && !registry.contains(ccy)) {
      out.rejections.push_back(reject(r, "unknown currency"));
      continue;
    }
    auto vol = parse_decimal(r.fields()[2]);
    if (!vol || *vol <= 0) {
      out.rejections.push_back(reject(r, "nonpositive volume"));
      continue;
    }
    auto price = parse_decimal(r.fields()[3]);
    if (!price || *price <= 0) {
      out.rejections.push_back(reject(r, "nonpositive price"));
      continue;
    }
    out.rows.push_back(Trade{*ts, std::move(ccy), *vol, *price});
  }
  return out;
}

ParseResult<OerQuote> parse_oer(std::istream& source) {
  CsvReader r(source);
  r.expect_header(kOerHeader);
  ParseResult<OerQuote> out;
  std::map<std::pair<Currency, std::int64_t>, std::size_t> seen;
  while (r.next_row()) {
    if (!check_field_count(r, 3, out.rejections)) continue;
    auto date = parse_date(r.fields()[0]);
    if (!date) {
      out.rejections.push_back(reject(r, "bad date"));
      continue;
    }
    Currency ccy(r.fields()[1]);
    auto rate = parse_decimal(r.fields()[2]);
    if (!rate || *rate <= 0) {
      out.rejections.push_back(reject(r, "nonpositive rate"));
      continue;
    }
    auto [it, inserted] = seen.emplace(std::make_pair(ccy, date->days), r.line_number());
    if (!inserted)
      throw SchemaError("duplicate quote for (" + ccy + ", " + format_date(*date) +
                        ") at lines " + std::to_string(it->second) + " and " +
                        std::to_string(r.line_number()));
    out.rows.push_back(OerQuote{*date, std::move(ccy), *rate});
  }
  return out;
}

ParseResult<RemittanceQuote> parse_remittance(std::istream& source) {
  CsvReader r(source);
  r.expect_header(kRemittanceHeader);
  ParseResult<RemittanceQuote> out;
  while (r.next_row()) {
    if (!check_field_count(r, 3, out.rejections)) continue;
    auto date = parse_date(r.fields()[0]);
    if (!date) {
      out.rejections.push_back(reject(r, "bad date"));
      continue;
    }
    auto cost = parse_decimal(r.fields()[2]);
    if (!cost || *cost < 0) {
      out.rejections.push_back(reject(r, "negative cost"));
      continue;
    }
    out.rows.push_back(RemittanceQuote{*date, Currency(r.fields()[1]), *cost});
  }
  return out;
}

ParseResult<FreedomScore> parse_freedom(std::istream& source) {
  CsvReader r(source);
  r.expect_header(kFreedomHeader);
  ParseResult<FreedomScore> out;
  while (r.next_row()) {
    if (!check_field_count(r, 4, out.rejections)) continue;
    auto year = parse_integer(r.fields()[0]);
    if (!year) {
      out.rejections.push_back(reject(r, "bad year"));
      continue;
    }
    auto score = parse_decimal(r.fields()[3]);
    if (!score || *score < 0 || *score > 100) {
      out.rejections.push_back(reject(r, "score out of [0,100]"));
      continue;
    }
    out.rows.push_back(FreedomScore{static_cast<int>(*year), std::string(r.fields()[1]),
                                    Currency(r.fields()[2]), *score});
  }
  return out;
}

ParseResult<MarketBar> parse_market_bars(std::istream& source) {
  CsvReader r(source);
  r.expect_header(kBarsHeader);
  ParseResult<MarketBar> out;
  std::optional<Timestamp> prev;
  while (r.next_row()) {
    if (!check_field_count(r, 2, out.rejections)) continue;
    auto ts = parse_timestamp(r.fields()[0]);
    if (!ts) {
      out.rejections.push_back(reject(r, "bad timestamp"));
      continue;
    }
    auto price = parse_decimal(r.fields()[1]);
    if (!price || *price <= 0) {
      out.rejections.push_back(reject(r, "nonpositive price"));
      continue;
    }
    if (prev && *ts <= *prev)
      throw SchemaError("non-monotone timestamp at line " +
                        std::to_string(r.line_number()));
    prev = *ts;
    out.rows.push_back(MarketBar{*ts, *price});
  }
  return out;
}

ParseResult<BlockchainMetrics> parse_blockchain(std::istream& source) {
  CsvReader r(source);
  r.expect_header(kBlockchainHeader);
  ParseResult<BlockchainMetrics> out;
  std::map<std::int64_t, std::size_t> seen;
  while (r.next_row()) {
    if (!check_field_count(r, 4, out.rejections)) continue;
    auto date = parse_date(r.fields()[0]);
    if (!date) {
      out.rejections.push_back(reject(r, "bad date"));
      continue;
    }
    auto confirm = parse_decimal(r.fields()[1]);
    auto fee = parse_decimal(r.fields()[2]);
    auto ntx = parse_integer(r.fields()[3]);
    if (!confirm || *confirm < 0 || !fee || *fee < 0 || !ntx || *ntx < 0) {
      out.rejections.push_back(reject(r, "negative metric"));
      continue;
    }
    auto [it, inserted] = seen.emplace(date->days, r.line_number());
    if (!inserted)
      throw SchemaError("duplicate blockchain record for " + format_date(*date) +
                        " at lines " + std::to_string(it->second) + " and " +
                        std::to_string(r.line_number()));
    out.rows.push_back(BlockchainMetrics{*date, *confirm, *fee, *ntx});
  }
  return out;
}

ParseResult<AreaerRecord> parse_areaer(std::istream& flags_source,
                                       std::istream& regime_source) {
  ParseResult<AreaerRecord> out;
  // key: (country, effective_date); assembled in first-seen file order.
  std::map<std::pair<std::string, std::int64_t>, std::size_t> index;
  std::vector<AreaerRecord> records;
  std::vector<bool> has_regime;

  auto record_for = [&](std::string country, Currency ccy, Date eff) -> std::size_t {
    auto key = std::make_pair(country, eff.days);
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    AreaerRecord rec;
    rec.country = std::move(country);
    rec.currency = std::move(ccy);
    rec.effective_date = eff;
    records.push_back(std::move(rec));
    has_regime.push_back(false);
    index.emplace(key, records.size() - 1);
    return records.size() - 1;
  };

  {
    CsvReader r(regime_source);
    r.expect_header(kAreaerRegimeHeader);
    while (r.next_row()) {
      if (!check_field_count(r, 4, out.rejections)) continue;
      auto eff = parse_date(r.fields()[2]);
      if (!eff) {
        out.rejections.push_back(reject(r, "bad effective_date"));
        continue;
      }
      auto regime = parse_regime(r.fields()[3]);
      if (!regime)
        throw SchemaError("unknown regime category \"" + std::string(r.fields()[3]) +
                          "\" at line " + std::to_string(r.line_number()));
      std::size_t idx =
          record_for(std::string(r.fields()[0]), Currency(r.fields()[1]), *eff);
      records[idx].regime = *regime;
      has_regime[idx] = true;
    }
  }
  {
    CsvReader r(flags_source);
    r.expect_header(kAreaerFlagsHeader);
    while (r.next_row()) {
      if (!check_field_count(r, 7, out.rejections)) continue;
      auto eff = parse_date(r.fields()[2]);
      if (!eff) {
        out.rejections.push_back(reject(r, "bad effective_date"));
        continue;
      }
      std::string_view dir = r.fields()[3];
      if (dir != "inflow" && dir != "outflow")
        throw SchemaError("unknown direction \"" + std::string(dir) + "\" at line " +
                          std::to_string(r.line_number()));
      auto asset = parse_integer(r.fields()[4]);
      if (!asset || *asset < 1 || *asset > kAssetClasses)
        throw SchemaError("asset class outside 1.." + std::to_string(kAssetClasses) +
                          " at line " + std::to_string(r.line_number()));
      auto sub = parse_integer(r.fields()[5]);
      if (!sub || *sub < 1) {
        out.rejections.push_back(reject(r, "bad subcategory index"));
        continue;
      }
      std::optional<int> flag;
      if (!r.fields()[6].empty()) {
        auto f = parse_integer(r.fields()[6]);
        if (!f || (*f != 0 && *f != 1)) {
          out.rejections.push_back(reject(r, "flag must be 0, 1, or empty"));
          continue;
        }
        flag = static_cast<int>(*f);
      }
      std::size_t idx =
          record_for(std::string(r.fields()[0]), Currency(r.fields()[1]), *eff);
      auto& group =
          records[idx].controls[dir == "outflow" ? 1 : 0][static_cast<int>(*asset) - 1];
      if (group.size() < static_cast<std::size_t>(*sub))
        group.resize(static_cast<std::size_t>(*sub));
      group[static_cast<std::size_t>(*sub) - 1] = flag;
    }
  }

  // Per-country effective dates must be monotone in record-assembly order.
  std::map<std::string, Date> last_eff;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!has_regime[i])
      throw SchemaError("missing regime row for (" + records[i].country + ", " +
                        format_date(records[i].effective_date) + ")");
    auto it = last_eff.find(records[i].country);
    if (it != last_eff.end() && records[i].effective_date <= it->second)
      throw SchemaError("non-monotone effective dates for country " + records[i].country);
    last_eff[records[i].country] = records[i].effective_date;
  }
  out.rows = std::move(records);
  return out;
}

CurrencyRegistry parse_registry(std::istream& source) {
  CurrencyRegistry out;
  std::string line;
  while (std::getline(source, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    while (!line.empty() && (line.back() == ' ' || line.back() == '\t')) line.pop_back();
    std::size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos) continue;
    out.insert(line.substr(start));
  }
  return out;
}

void write_trades(std::ostream& out, const std::vector<Trade>& rows) {
  out << kTradesHeader << '\n';
  for (const auto& t : rows)
    out << format_timestamp(t.timestamp) << ',' << t.currency << ','
        << format_decimal(t.volume_btc) << ',' << format_decimal(t.price) << '\n';
}

void write_oer(std::ostream& out, const std::vector<OerQuote>& rows) {
  out << kOerHeader << '\n';
  for (const auto& q : rows)
    out << format_date(q.date) << ',' << q.currency << ',' << format_decimal(q.rate)
        << '\n';
}

void write_remittance(std::ostream& out, const std::vector<RemittanceQuote>& rows) {
  out << kRemittanceHeader << '\n';
  for (const auto& q : rows)
    out << format_date(q.date) << ',' << q.sending_currency << ','
        << format_decimal(q.cost_pct_500) << '\n';
}

void write_freedom(std::ostream& out, const std::vector<FreedomScore>& rows) {
  out << kFreedomHeader << '\n';
  for (const auto& s : rows)
    out << s.year << ',' << s.country << ',' << s.currency << ','
        << format_decimal(s.score) << '\n';
}

void write_market_bars(std::ostream& out, const std::vector<MarketBar>& rows) {
  out << kBarsHeader << '\n';
  for (const auto& b : rows)
    out << format_timestamp(b.timestamp) << ',' << format_decimal(b.price_usd) << '\n';
}

void write_blockchain(std::ostream& out, const std::vector<BlockchainMetrics>& rows) {
  out << kBlockchainHeader << '\n';
  for (const auto& m : rows)
    out << format_date(m.date) << ',' << format_decimal(m.median_confirm_minutes) << ','
        << format_decimal(m.avg_fee_usd) << ',' << m.n_transactions << '\n';
}

}  // namespace btcpanel
