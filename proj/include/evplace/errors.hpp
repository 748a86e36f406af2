#pragma once

#include <stdexcept>
#include <string>

namespace evplace {

class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class io_error : public error {
public:
    using error::error;
};

// Malformed or schema-violating input text.
class parse_error : public error {
public:
    using error::error;
};

class topology_error : public error {
public:
    using error::error;
};

class numerical_error : public error {
public:
    using error::error;
};

class convergence_error : public numerical_error {
public:
    convergence_error(const std::string& what, double last_mismatch)
        : numerical_error(what), last_mismatch_(last_mismatch) {}
    double last_mismatch() const { return last_mismatch_; }

private:
    double last_mismatch_;
};

class catalog_coverage_error : public error {
public:
    catalog_coverage_error(const std::string& what, int branch_id = -1)
        : error(what), branch_id_(branch_id) {}
    int branch_id() const { return branch_id_; }

private:
    int branch_id_;
};

class domain_error : public error {
public:
    using error::error;
};

class infeasible_error : public error {
public:
    using error::error;
};

} // namespace evplace
