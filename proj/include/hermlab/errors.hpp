#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace hermlab {

/// Error with a stable machine-readable kind tag next to the human message.
///
/// Kinds used across the library:
///   NotPositiveDefinite, SingularSystem, InvalidTolerance, InvalidModel,
///   Balanced, NotDiagonalizable, NotCAS, Degenerate, BadRowSum,
///   JacobiViolation, Reducible, HypothesisUnmet, SingularT, NotParallel,
///   UnknownModel, ParseError
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(kind + ": " + message), kind_(std::move(kind)) {}

    [[nodiscard]] const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

} // namespace hermlab
