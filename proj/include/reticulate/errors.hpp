#pragma once

#include <stdexcept>
#include <string>

namespace reticulate {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidNetwork : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class ZeroMatrix : public Error {
public:
    ZeroMatrix() : Error("matrix is zero") {}
};

class NotPSD : public Error {
public:
    explicit NotPSD(double min_eigenvalue)
        : Error("matrix is not positive semi-definite (min eigenvalue " +
                std::to_string(min_eigenvalue) + ")"),
          min_eigenvalue(min_eigenvalue) {}
    double min_eigenvalue;
};

class BadTrace : public Error {
public:
    explicit BadTrace(double trace)
        : Error("trace must be 1 (got " + std::to_string(trace) + ")"), trace(trace) {}
    double trace;
};

/// Raised when the largest eigenvalue exceeds 1/k: no mixture of k-plane projections exists.
class NotRealizable : public Error {
public:
    NotRealizable(int k, double lambda_max)
        : Error("not realizable with k=" + std::to_string(k) + ": lambda_max=" +
                std::to_string(lambda_max) + " exceeds 1/k"),
          k(k), lambda_max(lambda_max) {}
    int k;
    double lambda_max;
};

class DimensionUnsupported : public Error {
public:
    explicit DimensionUnsupported(int n)
        : Error("operation supports n=2 only (got n=" + std::to_string(n) + ")"), dimension(n) {}
    int dimension;
};

class SolveFailure : public Error {
public:
    SolveFailure(double residual, int iterations)
        : Error("linear solve did not converge: residual " + std::to_string(residual) +
                " after " + std::to_string(iterations) + " iterations"),
          residual(residual), iterations(iterations) {}
    double residual;
    int iterations;
};

class BudgetExceeded : public Error {
public:
    BudgetExceeded(int R, long long node_count)
        : Error("window R=" + std::to_string(R) + " needs " + std::to_string(node_count) +
                " nodes, over budget"),
          R(R), node_count(node_count) {}
    int R;
    long long node_count;
};

class NotStationary : public Error {
public:
    explicit NotStationary(double max_residual)
        : Error("network is not stationary (max residual " + std::to_string(max_residual) + ")"),
          max_residual(max_residual) {}
    double max_residual;
};

class RadiusTooLarge : public Error {
public:
    explicit RadiusTooLarge(double r)
        : Error("radius " + std::to_string(r) + " must lie in (0, 1/2)"), radius(r) {}
    double radius;
};

class DegenerateProfile : public Error {
public:
    using Error::Error;
};

class UnbalancedInjection : public Error {
public:
    UnbalancedInjection(int component, double net_mass)
        : Error("injection does not balance on component " + std::to_string(component) +
                " (net " + std::to_string(net_mass) + ")"),
          component(component), net_mass(net_mass) {}
    int component;
    double net_mass;
};

/// Parse or schema error in a network file, located by line or field path.
class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace reticulate
