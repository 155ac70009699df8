#pragma once

#include <stdexcept>
#include <string>

namespace btcpanel {

// Input file violates its schema (bad header, unknown enum, ordering, ...).
struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Model cannot be estimated (rank deficiency, under-identification, ...).
struct ModelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad argument outside a function's mathematical domain.
struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Invalid run configuration or DGP spec.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace btcpanel
