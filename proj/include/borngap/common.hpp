#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace borngap {

using complex = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846264338327950288;
inline constexpr complex iu{0.0, 1.0};

/// Error categories, mapped to CLI exit codes (validation -> 2,
/// nonconvergence -> 3, fit-out-of-tolerance -> 4).
enum class errc {
    validation,
    domain,
    branch,
    unsupported,
    nonconvergence,
    resolution,
};

class error : public std::runtime_error {
public:
    error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    errc code() const noexcept { return code_; }

private:
    errc code_;
};

struct validation_error : error {
    explicit validation_error(const std::string& what) : error(errc::validation, what) {}
};

struct domain_error : error {
    explicit domain_error(const std::string& what) : error(errc::domain, what) {}
};

struct branch_error : error {
    explicit branch_error(const std::string& what) : error(errc::branch, what) {}
};

struct unsupported_error : error {
    explicit unsupported_error(const std::string& what) : error(errc::unsupported, what) {}
};

struct resolution_error : error {
    explicit resolution_error(const std::string& what) : error(errc::resolution, what) {}
};

/// A complex evaluation together with an absolute error bound.
/// err_estimate == 0 marks a closed-form (exact) result.
struct KernelValue {
    complex value{0.0, 0.0};
    double err_estimate = 0.0;
};

/// Quadrature failed to meet its tolerance; `best` holds the last iterate.
struct nonconvergence_error : error {
    nonconvergence_error(const std::string& what, KernelValue best_so_far)
        : error(errc::nonconvergence, what), best(best_so_far) {}
    KernelValue best;
};

inline double sq(double x) { return x * x; }

}  // namespace borngap
