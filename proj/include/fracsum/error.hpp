#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fracsum {

/// Base class for every error raised by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error
{
public:
    using Error::Error;
};

/// Truncation window collapsed: l_max <= l_min.
class InvalidBounds : public Error
{
public:
    using Error::Error;
};

/// Inconsistent shapes or sizes (e.g. 2K-1 > L_p).
class ArityError : public Error
{
public:
    using Error::Error;
};

/// Step sizes of an EOC sweep do not halve row to row.
class ShapeError : public Error
{
public:
    using Error::Error;
};

// Prony fit rejections. The reduction search catches these and moves on to
// the next (K, L_p) candidate.
class PronyRejected : public Error
{
public:
    using Error::Error;
};

class SingularHankel : public PronyRejected
{
public:
    using PronyRejected::PronyRejected;
};

class ComplexRoots : public PronyRejected
{
public:
    using PronyRejected::PronyRejected;
};

class PositiveRoot : public PronyRejected
{
public:
    using PronyRejected::PronyRejected;
};

/// Reduction search ran out of (K, L_p) candidates.
class SearchExhausted : public Error
{
public:
    using Error::Error;
};

/// Iterative evaluator did not reach its tolerance within budget.
class NonConvergence : public Error
{
public:
    using Error::Error;
};

/// Newton or fixed-point loop failed at a given time step.
class ImplicitDivergence : public Error
{
public:
    ImplicitDivergence(std::size_t step, const std::string& what)
        : Error(what), step_(step)
    {
    }

    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

/// Reading or writing a file failed.
class IoError : public Error
{
public:
    using Error::Error;
};

/// Invalid run configuration (CLI flags or config file).
class ConfigError : public Error
{
public:
    using Error::Error;
};

} // namespace fracsum
