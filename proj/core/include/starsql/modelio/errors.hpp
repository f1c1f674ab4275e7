#pragma once

#include <string>

#include "starsql/util/errors.hpp"

namespace starsql::modelio {

class EndpointError : public Error {
public:
    EndpointError(int status, std::string body)
        : Error("endpoint returned status " + std::to_string(status) + ": " + body.substr(0, 300)),
          status_(status),
          body_(std::move(body)) {}
    int status() const { return status_; }
    const std::string& body() const { return body_; }

private:
    int status_;
    std::string body_;
};

// Retries exhausted on connection failures, 5xx or 429. status 0 means no
// HTTP response was received.
class TransportExhausted : public EndpointError {
public:
    using EndpointError::EndpointError;
};

class CassetteMiss : public Error {
public:
    explicit CassetteMiss(std::string hash) : Error("no cassette entry for request " + hash), hash_(std::move(hash)) {}
    const std::string& hash() const { return hash_; }

private:
    std::string hash_;
};

// The endpoint answered but broke the wire contract (wrong choice count,
// score outside [0,1], malformed JSON).
class ContractViolation : public Error {
public:
    using Error::Error;
};

class InvalidRequest : public Error {
public:
    using Error::Error;
};

}  // namespace starsql::modelio
