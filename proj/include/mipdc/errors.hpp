#pragma once

#include <stdexcept>
#include <string>

namespace mipdc {

/// Root of the library's exception hierarchy.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Precondition violated by the caller (exit code 1 in the CLI).
class ContractError : public Error {
public:
    using Error::Error;
};

/// Filesystem failures (exit code 2 in the CLI).
class IoError : public Error {
public:
    using Error::Error;
};

class FormatError : public IoError {
public:
    using IoError::IoError;
};

class ParseError : public IoError {
public:
    ParseError(const std::string& what, std::size_t row, std::size_t column)
        : IoError(what + " (row " + std::to_string(row) + ", column " + std::to_string(column) + ")"),
          row_(row), column_(column) {}
    std::size_t row() const { return row_; }
    std::size_t column() const { return column_; }

private:
    std::size_t row_;
    std::size_t column_;
};

#define MIPDC_CONTRACT_ERROR(Name)        \
    class Name : public ContractError {   \
    public:                               \
        using ContractError::ContractError; \
    }

MIPDC_CONTRACT_ERROR(EpochingError);
MIPDC_CONTRACT_ERROR(DesignError);
MIPDC_CONTRACT_ERROR(LengthError);
MIPDC_CONTRACT_ERROR(SingularityError);
MIPDC_CONTRACT_ERROR(DegenerateSignalError);
MIPDC_CONTRACT_ERROR(RangeError);
MIPDC_CONTRACT_ERROR(NumericalError);
MIPDC_CONTRACT_ERROR(StabilityError);

#undef MIPDC_CONTRACT_ERROR

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw ContractError(msg);
}

}  // namespace mipdc
