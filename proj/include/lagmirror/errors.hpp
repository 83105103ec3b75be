#pragma once

#include <stdexcept>
#include <string>

namespace lagmirror {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An object violates one of its structural invariants (gcd, det, ids...).
class ValidationError : public Error {
public:
    ValidationError(std::string object_id, std::string invariant)
        : Error("object '" + object_id + "': " + invariant),
          object_id_(std::move(object_id)), invariant_(std::move(invariant)) {}

    const std::string& object_id() const noexcept { return object_id_; }
    const std::string& invariant() const noexcept { return invariant_; }

private:
    std::string object_id_;
    std::string invariant_;
};

/// A lift touches the zero section tangentially.
class TransversalityError : public Error {
public:
    TransversalityError(std::string object_id, int shift, double t, double slope)
        : Error("object '" + object_id + "': tangential zero crossing on lift shift " +
                std::to_string(shift) + " at t=" + std::to_string(t) +
                " (slope " + std::to_string(slope) + ")"),
          object_id_(std::move(object_id)), t_(t) {}

    const std::string& object_id() const noexcept { return object_id_; }
    double t() const noexcept { return t_; }

private:
    std::string object_id_;
    double t_;
};

/// Truncation window too small for the Gaussian weight to be negligible.
class WindowError : public Error {
public:
    using Error::Error;
};

/// Theta coefficients that are not rapidly decreasing.
class RefusalError : public Error {
public:
    using Error::Error;
};

class UnsupportedError : public Error {
public:
    using Error::Error;
};

/// Malformed scene file.
class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace lagmirror
