#ifndef CHEBPINT_COMMON_HPP
#define CHEBPINT_COMMON_HPP

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace chebpint
{

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;

inline constexpr Complex kImag{0.0, 1.0};

/// Failure categories shared by the C++ core and the C API status codes.
enum class ErrorCode
{
    ok = 0,
    invalid_argument,
    non_convergence,
    duplicate_roots,
    degenerate_root,
    zero_pivot,
    singular_matrix,
    singular_shift,
    dimension_mismatch,
    non_real_solution,
    max_iter_exceeded,
    overflow,
    unsupported_kind,
    invalid_grid,
    io,
    internal
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error
{
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code)
    {
    }

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what)
{
    throw Error(code, what);
}

inline void require(bool condition, ErrorCode code, const char* what)
{
    if (!condition)
        throw Error(code, what);
}

inline bool is_finite(Complex z) noexcept
{
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

} // namespace chebpint

#endif // CHEBPINT_COMMON_HPP
