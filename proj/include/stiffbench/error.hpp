#pragma once

#include <stdexcept>
#include <string>

namespace stiffbench {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Follower displacement at or below the configured epsilon; there is no
/// meaningful compression to divide by.
class NearZeroFollowerDisplacement : public Error {
public:
    explicit NearZeroFollowerDisplacement(double dz)
        : Error("follower displacement " + std::to_string(dz) + " mm is at or below epsilon"),
          displacement(dz) {}
    double displacement;
};

class MalformedFrame : public Error {
public:
    using Error::Error;
};

class ChannelClosed : public Error {
public:
    ChannelClosed() : Error("channel closed") {}
};

class Timeout : public Error {
public:
    Timeout() : Error("receive timed out") {}
};

/// Every tick of a presentation was gated, so there is nothing to perceive.
class NoContactPercept : public Error {
public:
    NoContactPercept() : Error("no non-gated ticks in trace") {}
};

class UnbalancedDesign : public Error {
public:
    using Error::Error;
};

class DegenerateSample : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// A session log or metadata file that cannot be interpreted.
class MalformedLog : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Raised by the session engine after the partial log has been flushed.
class SessionAborted : public Error {
public:
    using Error::Error;
};

}  // namespace stiffbench
