#pragma once

#include <stdexcept>
#include <string>

namespace fichain {

/// Base class for all errors thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// chain construction
struct NotIrreducible : Error       { using Error::Error; };
struct SupportNotSymmetric : Error  { using Error::Error; };
struct DetailedBalanceViolated : Error { using Error::Error; };
struct NonpositiveRates : Error     { using Error::Error; };

// functional constants
struct DegenerateSpectrum : Error   { using Error::Error; };
struct AllStartsDegenerate : Error  { using Error::Error; };
struct TwoPointRegime : Error       { using Error::Error; };
struct DegeneratePiStar : Error     { using Error::Error; };
struct DualConstraintViolated : Error { using Error::Error; };

// regularization
struct NotRegular : Error           { using Error::Error; };
struct WitnessNotFound : Error      { using Error::Error; };

// model builders
struct Disconnected : Error         { using Error::Error; };
struct StateSpaceTooLarge : Error   { using Error::Error; };
struct GNotStochastic : Error       { using Error::Error; };
struct RatesViolateIncrements : Error { using Error::Error; };
struct NotSymmetric : Error         { using Error::Error; };
struct Reducible : Error            { using Error::Error; };

// serialization / CLI input
struct SpecParseError : Error       { using Error::Error; };

}  // namespace fichain
