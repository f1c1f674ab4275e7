#pragma once

#include <string>

#include "starsql/util/errors.hpp"

namespace starsql::sqleval {

class ParseError : public Error {
public:
    ParseError(std::size_t position, std::string reason)
        : Error("parse error at token " + std::to_string(position) + ": " + reason),
          position_(position),
          reason_(std::move(reason)) {}
    std::size_t position() const { return position_; }
    const std::string& reason() const { return reason_; }

private:
    std::size_t position_;
    std::string reason_;
};

// A construct outside the benchmark's SELECT grammar (LEFT JOIN, comma joins, ...).
class UnsupportedConstruct : public ParseError {
public:
    UnsupportedConstruct(std::size_t position, std::string name)
        : ParseError(position, "unsupported construct '" + name + "'"), name_(std::move(name)) {}
    const std::string& name() const { return name_; }

private:
    std::string name_;
};

class DatabaseUnavailable : public Error {
public:
    using Error::Error;
};

class GoldExecutionFailed : public Error {
public:
    using Error::Error;
};

}  // namespace starsql::sqleval
