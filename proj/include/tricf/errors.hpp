#pragma once

#include <stdexcept>

namespace tricf {

struct PoleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SingularOrbit : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NoAdmissibleL : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnsupportedM : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UndefinedTheta : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CancellationFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NoRootInRange : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ValidationFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OrbitOrderViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EmptyRegion : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidRect : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonConvergent : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonHalting : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InadmissibleInput : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace tricf
