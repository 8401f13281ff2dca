#pragma once

#include <stdexcept>
#include <string>

namespace shavlab {

// Base class for all library errors so callers can catch everything at once.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A map failed structural validation (non-monotone, discontinuous, bad slopes).
struct InvalidMap : Error {
    using Error::Error;
};

// Argument outside the mathematical domain of an evaluator.
struct DomainError : Error {
    using Error::Error;
};

// A derivative profile failed its admissibility conditions.
struct ProfileInvalid : Error {
    using Error::Error;
};

// The generator has no fixed point in the open unit interval, so no
// separation constant can be extracted from it.
struct NoInteriorFixedPoint : Error {
    using Error::Error;
};

// A root or extremum search did not converge.
struct SearchFailed : Error {
    using Error::Error;
};

// The word ball was too small to certify an interior minimizer.
struct BallTooSmall : Error {
    using Error::Error;
};

// A Markov chain's acceptance rate collapsed; results would be meaningless.
struct ChainDiverged : Error {
    using Error::Error;
};

// The requested partition constraints are mutually unsatisfiable.
struct ConstructionImpossible : Error {
    using Error::Error;
};

// A stated numeric inequality failed on its own domain.
struct BoundViolated : Error {
    using Error::Error;
};

// Malformed serialized input.
struct ParseError : Error {
    using Error::Error;
};

}  // namespace shavlab
