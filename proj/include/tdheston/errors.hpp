#pragma once

#include <stdexcept>
#include <string>

namespace tdh {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

// specfun
class PoleError : public Error {
public:
    using Error::Error;
};

class NoConvergence : public Error {
public:
    using Error::Error;
};

class DegenerateB : public Error {
public:
    using Error::Error;
};

class IrregularPoint : public Error {
public:
    using Error::Error;
};

// charfn
class InvalidParams : public Error {
public:
    using Error::Error;
};

class StepFailure : public Error {
public:
    StepFailure(const std::string& what, double tau_reached)
        : Error(what), tau_reached_(tau_reached) {}
    double tau_reached() const noexcept { return tau_reached_; }

private:
    double tau_reached_;
};

class DenominatorUnderflow : public Error {
public:
    using Error::Error;
};

class DegenerateG1 : public Error {
public:
    using Error::Error;
};

class QuadratureFailure : public Error {
public:
    using Error::Error;
};

class RouteMismatch : public Error {
public:
    using Error::Error;
};

// pricer
class NoImpliedVol : public Error {
public:
    using Error::Error;
};

// mcsim
class InvalidCorrelation : public Error {
public:
    using Error::Error;
};

// calib
class Infeasible : public Error {
public:
    using Error::Error;
};

class MaxIterations : public Error {
public:
    using Error::Error;
};

// io
class InputError : public Error {
public:
    using Error::Error;
};

}  // namespace tdh
