#pragma once

#include <stdexcept>
#include <string>

namespace qbm {

// Exit-code class of an error, used by the CLI.
enum class ErrorClass { Verification = 1, Config = 2, Numerical = 3 };

class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what, ErrorClass cls)
        : std::runtime_error(kind + ": " + what), kind_(std::move(kind)), cls_(cls) {}

    const std::string& kind() const noexcept { return kind_; }
    ErrorClass error_class() const noexcept { return cls_; }

private:
    std::string kind_;
    ErrorClass cls_;
};

#define QBM_DEFINE_ERROR(Name, Cls)                                               \
    class Name : public Error {                                                   \
    public:                                                                       \
        explicit Name(const std::string& what) : Error(#Name, what, Cls) {}       \
    };

QBM_DEFINE_ERROR(NonPhysicalState, ErrorClass::Numerical)
QBM_DEFINE_ERROR(InvalidRegime, ErrorClass::Numerical)
QBM_DEFINE_ERROR(RNotPositive, ErrorClass::Numerical)
QBM_DEFINE_ERROR(QuadratureFailure, ErrorClass::Numerical)
QBM_DEFINE_ERROR(DivisionByZero, ErrorClass::Numerical)
QBM_DEFINE_ERROR(NonRealCriterion, ErrorClass::Numerical)
QBM_DEFINE_ERROR(DegenerateDrift, ErrorClass::Numerical)
QBM_DEFINE_ERROR(DimensionTooSmall, ErrorClass::Config)
QBM_DEFINE_ERROR(TruncationUnreliable, ErrorClass::Numerical)
QBM_DEFINE_ERROR(NoViolationFound, ErrorClass::Verification)
QBM_DEFINE_ERROR(RecurrenceHorizonExceeded, ErrorClass::Numerical)
QBM_DEFINE_ERROR(ConfigError, ErrorClass::Config)

#undef QBM_DEFINE_ERROR

}  // namespace qbm
