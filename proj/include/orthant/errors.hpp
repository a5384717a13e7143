#pragma once

#include <stdexcept>
#include <string>

namespace orthant {

//! Base class for all library errors.
class Error : public std::runtime_error
{
public:
  explicit Error(const std::string& what)
    : std::runtime_error(what)
  {}
};

//! Input violates a mathematical precondition (negative data, bad bandwidth, ...).
class DomainError : public Error
{
public:
  using Error::Error;
};

//! Malformed input file (ragged rows, unparsable fields).
class FormatError : public Error
{
public:
  using Error::Error;
};

//! Too few observations for the requested operation.
class InsufficientDataError : public Error
{
public:
  using Error::Error;
};

//! A correlation/variation structure that cannot be realized.
class InfeasibleStructureError : public Error
{
public:
  using Error::Error;
};

//! A constant sample where spread is required.
class DegenerateSampleError : public Error
{
public:
  using Error::Error;
};

//! Iteration or quadrature failed to reach the requested tolerance.
class NumericalError : public Error
{
public:
  NumericalError(const std::string& what, double achieved = 0.0)
    : Error(what)
    , achieved_tolerance(achieved)
  {}

  double achieved_tolerance;
};

//! Start density vanished at an observation; names the offending row.
class StartSupportError : public Error
{
public:
  StartSupportError(const std::string& what, std::size_t row_index)
    : Error(what)
    , row(row_index)
  {}

  std::size_t row;
};

//! Density or start value below representable range at an evaluation point.
class EvaluationUnderflowError : public Error
{
public:
  using Error::Error;
};

} // namespace orthant
