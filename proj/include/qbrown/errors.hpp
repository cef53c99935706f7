#pragma once

#include <stdexcept>
#include <string>

namespace qbrown {

// Invalid physical input (negative temperature, omega <= 0 where a pole sits, ...).
class domain_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Tabulated-model lookup outside the sampled range.
class range_error : public std::range_error {
public:
    using std::range_error::range_error;
};

// A quadrature failed to reach its requested tolerance; carries the best estimate.
class quadrature_error : public std::runtime_error {
public:
    quadrature_error(const std::string& what, double achieved_rel_err)
        : std::runtime_error(what), achieved_rel_err_(achieved_rel_err) {}
    double achieved_rel_err() const noexcept { return achieved_rel_err_; }

private:
    double achieved_rel_err_;
};

// Bad run configuration detected before any stepping/integration starts.
class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace qbrown
