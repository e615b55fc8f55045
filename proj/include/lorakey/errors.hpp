#pragma once

#include <stdexcept>
#include <string>

namespace lorakey {

// Base class for all toolkit errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text; the message names the offending line.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Structurally valid input that violates a data invariant (duplicate
// sequence indices, out-of-range RSSI, inconsistent block sizes).
class IntegrityError : public Error {
 public:
  using Error::Error;
};

// Invalid simulator or pipeline configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// MAC-rule violation, e.g. an ACK on a different frequency than its uplink.
class ProtocolViolation : public Error {
 public:
  using Error::Error;
};

// Requested output length exceeds the available entropy budget.
class EntropyBudgetError : public Error {
 public:
  using Error::Error;
};

}  // namespace lorakey
