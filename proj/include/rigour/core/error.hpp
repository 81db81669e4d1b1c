#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rigour {

/// Base of every error raised by the pipeline. Each subclass names one
/// failure from the module contracts so callers can catch precisely.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// corpus
class MalformedRecord : public Error {
 public:
  MalformedRecord(std::size_t line, const std::string& what)
      : Error("malformed record at line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class DuplicateId : public Error {
 public:
  explicit DuplicateId(std::string id) : Error("duplicate document id: " + id), id_(std::move(id)) {}
  const std::string& id() const noexcept { return id_; }

 private:
  std::string id_;
};

class MissingRequiredField : public Error {
 public:
  explicit MissingRequiredField(std::string name)
      : Error("missing required field: " + name), name_(std::move(name)) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

class SectionNotFound : public Error {
 public:
  explicit SectionNotFound(std::string which)
      : Error("section not found: " + which), which_(std::move(which)) {}
  const std::string& which() const noexcept { return which_; }

 private:
  std::string which_;
};

class EmptyCorpus : public Error {
 public:
  EmptyCorpus() : Error("corpus is empty") {}
};

class InvalidState : public Error {
 public:
  using Error::Error;
};

// mask / features
class NoCandidates : public Error {
 public:
  explicit NoCandidates(const std::string& doc_id)
      : Error("no keyword candidates left after stopword filtering in " + doc_id) {}
};

class EmptyVocabulary : public Error {
 public:
  EmptyVocabulary() : Error("vocabulary is empty after min_df filtering") {}
};

class SingleClassLabels : public Error {
 public:
  SingleClassLabels() : Error("labels contain a single class") {}
};

// providers
class ProviderError : public Error {
 public:
  ProviderError(const std::string& what, bool transient = false)
      : Error("provider error: " + what), transient_(transient) {}
  bool transient() const noexcept { return transient_; }

 private:
  bool transient_;
};

class ParseError : public Error {
 public:
  explicit ParseError(std::string raw)
      : Error("could not parse definition from response: " + raw), raw_(std::move(raw)) {}
  const std::string& raw() const noexcept { return raw_; }

 private:
  std::string raw_;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

// embed
class DimensionMismatch : public Error {
 public:
  DimensionMismatch(std::size_t expected, std::size_t got)
      : Error("dimension mismatch: expected " + std::to_string(expected) + ", got " +
              std::to_string(got)) {}
};

class ZeroVector : public Error {
 public:
  ZeroVector() : Error("zero vector has no direction") {}
};

// salience
class RegistryTooLarge : public Error {
 public:
  explicit RegistryTooLarge(std::size_t n)
      : Error("registry of " + std::to_string(n) + " criteria exceeds the enumeration limit") {}
};

class RegistryMismatch : public Error {
 public:
  RegistryMismatch() : Error("criteria sets bound to different registries") {}
};

// certainty
class MissingPrediction : public Error {
 public:
  explicit MissingPrediction(const std::string& key)
      : Error("no prediction for " + key) {}
};

// app
class ConfigError : public Error {
 public:
  using Error::Error;
};

class MissingStageOutput : public Error {
 public:
  explicit MissingStageOutput(const std::string& what) : Error("missing stage output: " + what) {}
};

class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error("stage '" + stage + "' failed: " + what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace rigour
