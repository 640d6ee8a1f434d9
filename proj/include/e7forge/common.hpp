#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace e7forge {

/// Base class for all engine errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct DivisionByZero : Error {
  DivisionByZero() : Error("division by zero") {}
};

struct FieldMismatch : Error {
  explicit FieldMismatch(const std::string& what = "operands belong to different fields") : Error(what) {}
};

struct BadPrime : Error {
  explicit BadPrime(const std::string& what) : Error(what) {}
};

struct AlgebraMismatch : Error {
  explicit AlgebraMismatch(const std::string& what = "elements of different quaternion algebras") : Error(what) {}
};

struct SymbolMismatch : Error {
  explicit SymbolMismatch(const std::string& what = "quaternion symbols differ") : Error(what) {}
};

struct NotSplitHere : Error {
  explicit NotSplitHere(const std::string& what = "no square slot over the current field") : Error(what) {}
};

struct UnknownLine : Error {
  explicit UnknownLine(const std::string& what = "not a line of the canonical Fano plane") : Error(what) {}
};

struct EqualLines : Error {
  EqualLines() : Error("third_line requires two distinct lines") {}
};

struct PairingUnavailable : Error {
  explicit PairingUnavailable(const std::string& what) : Error(what) {}
};

struct NotSemisimpleOverField : Error {
  explicit NotSemisimpleOverField(const std::string& what) : Error(what) {}
};

struct NotCartan : Error {
  explicit NotCartan(const std::string& what) : Error(what) {}
};

struct NotSplit : Error {
  explicit NotSplit(const std::string& what) : Error(what) {}
};

struct Unrecognized : Error {
  explicit Unrecognized(const std::string& what) : Error(what) {}
};

struct DegenerateOnS : Error {
  explicit DegenerateOnS(const std::string& what) : Error(what) {}
};

struct CenterNotSplit : Error {
  explicit CenterNotSplit(const std::string& what) : Error(what) {}
};

struct DegeneratePairing : Error {
  explicit DegeneratePairing(const std::string& what) : Error(what) {}
};

struct NoSolution : Error {
  explicit NoSolution(const std::string& what) : Error(what) {}
};

struct NoConsistentGauge : Error {
  explicit NoConsistentGauge(const std::string& what) : Error(what) {}
};

struct GaugeInconsistent : Error {
  explicit GaugeInconsistent(const std::string& what) : Error(what) {}
};

struct ValidationFailed : Error {
  explicit ValidationFailed(const std::string& what) : Error(what) {}
};

struct IoError : Error {
  explicit IoError(const std::string& what) : Error(what) {}
};

/// Deterministic 64-bit PRNG (splitmix64). Used wherever a seed is recorded
/// in a report; std::rand and non-portable distributions are avoided.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform-ish integer in [lo, hi] (inclusive); fine for test data.
  long long range(long long lo, long long hi) {
    return lo + static_cast<long long>(next() % static_cast<std::uint64_t>(hi - lo + 1));
  }

 private:
  std::uint64_t state_;
};

}  // namespace e7forge
