#ifndef METASELECT_ERRORS_HPP
#define METASELECT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace metaselect {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad input data: unreadable files, ragged rows, invalid targets.
class DataError : public Error {
public:
    explicit DataError(const std::string& msg) : Error(msg) {}
};

// Bad configuration: unknown registry entries, malformed manifests.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// Structural mismatch between fitted models and the data they are applied to.
class SchemaError : public Error {
public:
    explicit SchemaError(const std::string& msg) : Error(msg) {}
};

}  // namespace metaselect

#endif
