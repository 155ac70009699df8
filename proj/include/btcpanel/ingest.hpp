#pragma once

#include <istream>

#include "btcpanel/csv.hpp"
#include "btcpanel/types.hpp"

namespace btcpanel {

// CSV headers (exact). All numeric fields use '.' decimals, dates ISO-8601.
inline constexpr std::string_view kTradesHeader = "timestamp,currency,volume_btc,price";
inline constexpr std::string_view kOerHeader = "date,currency,rate";
inline constexpr std::string_view kAreaerFlagsHeader =
    "country,currency,effective_date,direction,asset_class,subcategory,flag";
inline constexpr std::string_view kAreaerRegimeHeader =
    "country,currency,effective_date,regime";
inline constexpr std::string_view kRemittanceHeader = "date,currency,cost_pct_500";
inline constexpr std::string_view kFreedomHeader = "year,country,currency,score";
inline constexpr std::string_view kBarsHeader = "timestamp,price_usd";
inline constexpr std::string_view kBlockchainHeader =
    "date,median_confirm_minutes,avg_fee_usd,n_transactions";

// Rows failing invariants become rejection records; structural problems
// (header, duplicates, ordering) throw SchemaError.
// An empty registry accepts every well-formed currency code.
ParseResult<Trade> parse_trades(std::istream& source, const CurrencyRegistry& registry);
ParseResult<OerQuote> parse_oer(std::istream& source);
ParseResult<RemittanceQuote> parse_remittance(std::istream& source);
ParseResult<FreedomScore> parse_freedom(std::istream& source);
ParseResult<MarketBar> parse_market_bars(std::istream& source);
ParseResult<BlockchainMetrics> parse_blockchain(std::istream& source);

// Assembles flag rows and regime rows into AreaerRecord values keyed by
// (country, effective_date). Missing flags (empty flag field) are preserved.
ParseResult<AreaerRecord> parse_areaer(std::istream& flags_source,
                                       std::istream& regime_source);

// One currency code per line; '#' starts a comment.
CurrencyRegistry parse_registry(std::istream& source);

// Serializers for the same schemas (round-trip partners of the parsers).
void write_trades(std::ostream& out, const std::vector<Trade>& rows);
void write_oer(std::ostream& out, const std::vector<OerQuote>& rows);
void write_remittance(std::ostream& out, const std::vector<RemittanceQuote>& rows);
void write_freedom(std::ostream& out, const std::vector<FreedomScore>& rows);
void write_market_bars(std::ostream& out, const std::vector<MarketBar>& rows);
void write_blockchain(std::ostream& out, const std::vector<BlockchainMetrics>& rows);

}  // namespace btcpanel
