#pragma once

#include <stdexcept>
#include <string>

namespace cnmf {

/// A precondition of an operation was not met (dimension mismatch, bad count, ...).
class ContractError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Normal equations could not be solved even after ridge regularization.
class SingularError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Problems with input data: unreadable files, malformed cells, missing columns.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public DataError {
public:
    using DataError::DataError;
};

class SchemaError : public DataError {
public:
    using DataError::DataError;
};

}  // namespace cnmf
