#pragma once

#include <stdexcept>
#include <string>

namespace capmimo {

// Base for every error raised by the library. Argument checks use
// std::invalid_argument directly; the types below mark numerical or
// model-level failures callers may want to tell apart.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class NotHermitianError : public Error {
public:
    using Error::Error;
};

// A sampled kernel has an eigenvalue below -clamp_rel * lambda_max.
class NotPsdError : public Error {
public:
    using Error::Error;
};

// SNR control needs a nonzero received-power integral (P = 0 leaves it undefined).
class SnrControlUndefinedError : public Error {
public:
    using Error::Error;
};

}  // namespace capmimo
