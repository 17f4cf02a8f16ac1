#ifndef CHEBPINT_CHEB_CORE_HPP
#define CHEBPINT_CHEB_CORE_HPP

#include <vector>

#include "chebpint/common.hpp"

namespace chebpint
{

class WorkerPool;

enum class ChebKind
{
    first,  ///< T_k
    second  ///< U_k
};

/// T_k(x) or U_k(x) by the three-term recurrence; valid for any finite
/// complex x, including points off [-1, 1].
Complex cheb_eval(ChebKind kind, int k, Complex x);

struct RhoValue
{
    Complex rho;
    Complex rho_prime;
};

/// rho(theta) = sin(n theta) - i cos(n theta) sin(theta) and its derivative.
/// The zeros of rho are the angles theta_j with x_j = cos(theta_j) solving
/// U_{n-1}(x) - i T_n(x) = 0.
RhoValue rho_and_derivative(Complex theta, int n);

/// Starting angles theta_j = (j pi / n + j pi / (n + 1)) / 2 + i / n,
/// j = 1..n. Each lies in the Newton basin of a distinct root.
std::vector<Complex> initial_guesses(int n);

/// One root of U_{n-1}(x) - i T_n(x) with its Newton diagnostics.
struct Root
{
    int index = 0;       ///< 1-based position j
    Complex theta;       ///< alpha_j + i beta_j
    Complex x;           ///< cos(theta)
    Complex lambda_unit; ///< i x, eigenvalue of dt * B
    int newton_iters = 0;
    double residual = 0; ///< |rho(theta)| at exit
};

struct RootSet
{
    int n = 0;
    std::vector<Root> roots; ///< ordered by index, never by value

    int max_newton_iters() const;
    double max_residual() const;
};

/// Newton iteration on rho for roots j <= ceil(n/2); the rest are their
/// mirror images theta_{n+1-j} = pi - conj(theta_j). For odd n the middle
/// root starts from pi/2 + i/n on the symmetry axis. A root is accepted once
/// |rho(theta)| <= tol and the last update satisfies
/// |d theta| <= tol * max(1, |theta|). An iterate that lands on a spurious
/// zero sin(theta) = 0 is restarted on rho / sin(theta).
///
/// Throws Error(non_convergence) if some root needs more than max_iter
/// updates and Error(duplicate_roots) if two accepted roots coincide to
/// within 1e-12.
RootSet find_roots(int n, double tol = 1e-10, int max_iter = 50,
                   const WorkerPool* pool = nullptr);

/// p_n'(x_j) for p_n(x) = U_{n-1}(x) - i T_n(x), via -rho'(theta)/sin^2(theta).
Complex p_prime_at_root(const Root& root, int n);

} // namespace chebpint

#endif // CHEBPINT_CHEB_CORE_HPP
