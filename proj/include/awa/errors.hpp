#pragma once

#include <stdexcept>
#include <string>

namespace awa {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A trace violates a structural invariant (empty, zero burst, broken alternation).
class InvalidTrace : public Error { using Error::Error; };

/// A trace with zero total magnitude where a positive base volume is required.
class DegenerateTrace : public Error { using Error::Error; };

/// An operation received an empty input set.
class EmptyInput : public Error { using Error::Error; };

/// A corpus split request cannot be satisfied.
class SplitError : public Error { using Error::Error; };

/// Tensor or architecture shape mismatch.
class ShapeError : public Error { using Error::Error; };

/// A loss or gradient became non-finite.
class NumericalError : public Error { using Error::Error; };

/// Training preconditions violated (single-class corpus, missing classes, ...).
class TrainError : public Error { using Error::Error; };

/// Website pairing requires an even class count.
class PairError : public Error { using Error::Error; };

/// A transformer was driven without the input its mode requires.
class ModeError : public Error { using Error::Error; };

/// A probability argument left its open-interval domain.
class DomainError : public Error { using Error::Error; };

/// Cross-set metrics need at least two transformer sets.
class InsufficientSets : public Error { using Error::Error; };

/// A transformer set does not cover every class of a corpus.
class CoverageError : public Error { using Error::Error; };

/// Two reports cannot be compared (mismatched configurations).
class CompareError : public Error { using Error::Error; };

/// Manifest or command-line configuration is invalid.
class ConfigError : public Error { using Error::Error; };

/// Filesystem or file-format failure.
class IoError : public Error { using Error::Error; };

} // namespace awa
