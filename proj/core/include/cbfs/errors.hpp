#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cbfs {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed input file (CSV syntax, non-numeric cell, bad header).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Semantically invalid input (dimension mismatch, duplicate names,
/// unlabeled sample, parameter out of range).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A feature cluster ended up with no selected features; the fractional
/// centroid for that cluster is undefined.
class EmptyClusterError : public Error {
 public:
  EmptyClusterError(std::size_t cluster, const std::string& msg)
      : Error(msg), cluster_(cluster) {}
  std::size_t cluster() const noexcept { return cluster_; }

 private:
  std::size_t cluster_;
};

/// Every restart of the search failed; no usable result exists.
class NoSolutionError : public Error {
 public:
  using Error::Error;
};

}  // namespace cbfs
