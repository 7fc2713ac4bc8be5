#pragma once

#include <stdexcept>
#include <string>

namespace epscan {

struct InvalidSpec : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DimensionMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DegenerateEpsilon : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct PreconditionViolated : std::logic_error {
    using std::logic_error::logic_error;
};

struct ConvergenceFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IllConditioned : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AmbiguousClustering : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TrackingAmbiguity : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ClassificationConflict : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StepUnderflow : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BracketInvalid : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

} // namespace epscan
