#pragma once

#include <stdexcept>
#include <string>

namespace uavcov {

// Base for every error raised by the library. Callers that only care about
// "something in uavcov failed" catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidPolygon : public Error {
 public:
  using Error::Error;
};

class NoVisitableCells : public Error {
 public:
  using Error::Error;
};

class EpisodeFinished : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class NonFiniteGradient : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class EmptyMemory : public Error {
 public:
  using Error::Error;
};

class ExperimentDiverged : public Error {
 public:
  ExperimentDiverged(int episode, const std::string& what)
      : Error("experiment diverged in episode " + std::to_string(episode) + ": " + what),
        episode_(episode) {}
  int episode() const { return episode_; }

 private:
  int episode_;
};

class UndefinedForEmptyEpisode : public Error {
 public:
  using Error::Error;
};

class CorruptRecord : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, int column)
      : Error(what + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

// Input parsed but violates a domain rule (start on a blocked cell, ragged
// raster handled as ParseError, missing start, ...).
class ConstraintError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace uavcov
