#pragma once

#include <stdexcept>
#include <string>

namespace pidsx {

/// Base of every exception thrown by the library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class cap_exceeded : public error {
public:
    using error::error;
};

class incomplete_input : public error {
public:
    using error::error;
};

/// Malformed spec document or expression; `location` is a human-readable
/// position such as "line 3, column 14" or "$.law.table[2]".
class syntax_error : public error {
public:
    syntax_error(std::string location, const std::string& what)
        : error("syntax error at " + location + ": " + what), location_(std::move(location)) {}

    const std::string& location() const noexcept { return location_; }

private:
    std::string location_;
};

class validation_error : public error {
public:
    enum class kind { normalization, dimension_mismatch, non_psd_covariance, schema, unknown_coordinate };

    validation_error(kind k, const std::string& what) : error(what), kind_(k) {}

    kind which() const noexcept { return kind_; }

private:
    kind kind_;
};

class singularity_error : public error {
public:
    using error::error;
};

/// No collection of the antichain has positive weight at the realization.
class all_slice_weights_zero : public error {
public:
    using error::error;
};

class undefined_point : public error {
public:
    using error::error;
};

class config_error : public error {
public:
    using error::error;
};

class divergent_integral : public error {
public:
    using error::error;
};

class insufficient_acceptance : public error {
public:
    using error::error;
};

} // namespace pidsx
