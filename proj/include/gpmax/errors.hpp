#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace gpmax {

//! Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error
{
  public:
    using std::domain_error::domain_error;
};

//! The requested threshold-dependent regime does not match the supplied data.
class RegimeError : public DomainError
{
  public:
    using DomainError::DomainError;
};

//! A horizon family could not be mapped onto a scenario.
class ClassificationError : public DomainError
{
  public:
    using DomainError::DomainError;
};

//! Normalizer requested for a scenario it is not defined under.
class ScenarioMismatch : public DomainError
{
  public:
    using DomainError::DomainError;
};

//! Monte Carlo parameters that cannot be executed.
class BudgetError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

//! Malformed configuration document or command line.
class ConfigError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

//! Model parameter constraints that failed, one message per constraint.
class ValidationError : public DomainError
{
  public:
    explicit ValidationError(std::vector<std::string> violations)
        : DomainError(join(violations)), violations_(std::move(violations))
    {
    }

    const std::vector<std::string>& violations() const { return violations_; }

  private:
    static std::string join(const std::vector<std::string>& v)
    {
        std::string out;
        for (const auto& s : v)
        {
            if (!out.empty())
            {
                out += "; ";
            }
            out += s;
        }
        return out;
    }

    std::vector<std::string> violations_;
};

}  // namespace gpmax
