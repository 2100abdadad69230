#pragma once

#include <stdexcept>
#include <string>

namespace cmra {

class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a closed-form quantity (e.g. x outside [0, 1]).
class DomainError : public Error
{
public:
  using Error::Error;
};

/// A valuation or environment fails one of the model assumptions it is used under.
class AssumptionViolation : public Error
{
public:
  using Error::Error;
};

class ScenarioError : public Error
{
public:
  using Error::Error;
};

class AuditError : public Error
{
public:
  using Error::Error;
};

}  // namespace cmra
