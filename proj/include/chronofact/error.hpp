#pragma once

#include <stdexcept>
#include <string>

namespace chronofact {

// Base for every error the library raises on purpose. The CLI maps
// ValidationError and ConfigError to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class NoTemporalAnchor : public Error {
 public:
  NoTemporalAnchor() : Error("no dated event in claim or evidence") {}
};

class OracleError : public Error {
 public:
  using Error::Error;
};

class MissingEmbedding : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class TrainingDivergence : public Error {
 public:
  using Error::Error;
};

class CategoryUnsatisfiable : public Error {
 public:
  using Error::Error;
};

class PerturbationImpossible : public Error {
 public:
  using Error::Error;
};

class CorruptionImpossible : public Error {
 public:
  using Error::Error;
};

}  // namespace chronofact
