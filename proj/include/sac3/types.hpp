#pragma once

// Domain types shared across the detection pipeline.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sac3 {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

class BackendError : public Error {
public:
  using Error::Error;
};

class ScoringError : public Error {
public:
  using Error::Error;
};

class DatasetError : public Error {
public:
  using Error::Error;
};

// Raised when a model response cannot be interpreted; keeps the verbatim
// response so callers can log or surface it.
class ParseError : public Error {
public:
  ParseError(const std::string& message, std::string raw)
      : Error(message), raw_(std::move(raw)) {}
  const std::string& raw() const { return raw_; }

private:
  std::string raw_;
};

struct Question {
  std::string text;
  std::string id;
};

// Trims whitespace and validates non-emptiness.
Question make_question(std::string text, std::string id = "x0");

struct Answer {
  std::string text;
  std::string source_model;
  double temperature = 0.0;
  int sample_index = 0;
};

// The unit of semantic comparison: a question together with an answer.
struct QAPair {
  Question question;
  Answer answer;
};

// One application of the equivalence operator: the judge's binary decision
// plus its verbalized probability. raw_response keeps the verbatim judge
// output for audit.
struct EquivalenceVerdict {
  bool equivalent = false;
  double confidence = 1.0;
  std::string raw_response;
};

// A verdict slot that may have failed (transport error, missing sample,
// unreadable judge output). Failed cells are excluded from score
// denominators unless a caller policy converts them first.
struct VerdictCell {
  std::optional<EquivalenceVerdict> verdict;
  std::string error;
  bool parse_failed = false;  // judge answered but the output was unreadable
  std::string raw;            // judge output when one was received

  bool usable() const { return verdict.has_value(); }
};

enum class Verdict { factual, hallucinated };

std::string to_string(Verdict v);

// Lowercases and collapses runs of whitespace; used for candidate
// deduplication and self-equality checks.
std::string normalize_text(const std::string& text);

std::string trim(const std::string& text);

}  // namespace sac3
