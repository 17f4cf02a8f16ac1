#include "chebpint/cheb_core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "chebpint/worker_pool.hpp"

namespace chebpint
{

Complex cheb_eval(ChebKind kind, int k, Complex x)
{
    require(k >= 0, ErrorCode::invalid_argument, "cheb_eval: degree must be >= 0");
    require(is_finite(x), ErrorCode::invalid_argument, "cheb_eval: non-finite argument");
    if (k == 0)
        return 1.0;
    Complex prev = 1.0;
    Complex curr = (kind == ChebKind::first) ? x : 2.0 * x;
    for (int j = 1; j < k; ++j) {
        const Complex next = 2.0 * x * curr - prev;
        prev = curr;
        curr = next;
    }
    return curr;
}

RhoValue rho_and_derivative(Complex theta, int n)
{
    require(n >= 1, ErrorCode::invalid_argument, "rho_and_derivative: n must be >= 1");
    const double nd = static_cast<double>(n);
    const Complex s_n = std::sin(nd * theta);
    const Complex c_n = std::cos(nd * theta);
    const Complex s = std::sin(theta);
    const Complex c = std::cos(theta);
    RhoValue out;
    out.rho = s_n - kImag * c_n * s;
    out.rho_prime = nd * c_n + kImag * nd * s_n * s - kImag * c_n * c;
    return out;
}

std::vector<Complex> initial_guesses(int n)
{
    require(n >= 1, ErrorCode::invalid_argument, "initial_guesses: n must be >= 1");
    constexpr double pi = std::numbers::pi;
    const double nd = static_cast<double>(n);
    std::vector<Complex> guesses(n);
    for (int j = 1; j <= n; ++j) {
        const double re = 0.5 * (j * pi / nd + j * pi / (nd + 1.0));
        guesses[j - 1] = Complex(re, 1.0 / nd);
    }
    return guesses;
}

int RootSet::max_newton_iters() const
{
    int best = 0;
    for (const auto& r : roots)
        best = std::max(best, r.newton_iters);
    return best;
}

double RootSet::max_residual() const
{
    double best = 0.0;
    for (const auto& r : roots)
        best = std::max(best, r.residual);
    return best;
}

namespace
{

struct NewtonOutcome
{
    Complex theta;
    RhoValue value;
    int iters = 0;
    bool converged = false;
};

// Newton on rho, or on the deflated rho / sin(theta) when `deflate` is set.
// The deflated form has no roots at theta = k pi.
NewtonOutcome newton(Complex theta, int n, double tol, int max_iter, bool deflate)
{
    auto evaluate = [&](Complex t) {
        RhoValue v = rho_and_derivative(t, n);
        if (deflate) {
            const Complex s = std::sin(t), c = std::cos(t);
            v.rho_prime = (v.rho_prime * s - v.rho * c) / (s * s);
            v.rho /= s;
        }
        return v;
    };
    NewtonOutcome out;
    out.value = evaluate(theta);
    while (out.iters < max_iter) {
        const Complex step = out.value.rho / out.value.rho_prime;
        theta -= step;
        ++out.iters;
        out.value = evaluate(theta);
        if (!is_finite(theta) || !is_finite(out.value.rho))
            break;
        if (std::abs(out.value.rho) <= tol && std::abs(step) <= tol * std::max(1.0, std::abs(theta))) {
            out.converged = true;
            break;
        }
    }
    out.theta = theta;
    return out;
}

Root newton_root(int j, Complex guess, int n, double tol, int max_iter)
{
    NewtonOutcome outcome = newton(guess, n, tol, max_iter, false);
    int iters = outcome.iters;
    // sin(theta) = 0 solves rho but not the characteristic equation.
    if (outcome.converged && std::abs(std::sin(outcome.theta)) < 1e-8) {
        outcome = newton(guess, n, tol, max_iter, true);
        iters += outcome.iters;
    }
    if (!outcome.converged)
        fail(ErrorCode::non_convergence,
             "find_roots: root " + std::to_string(j) + " of n=" + std::to_string(n)
                 + " did not converge in " + std::to_string(max_iter)
                 + " iterations (|rho| = " + std::to_string(std::abs(outcome.value.rho)) + ")");
    Root root;
    root.index = j;
    root.theta = outcome.theta;
    root.x = std::cos(outcome.theta);
    root.lambda_unit = kImag * root.x;
    root.newton_iters = iters;
    root.residual = std::abs(rho_and_derivative(outcome.theta, n).rho);
    return root;
}

} // namespace

RootSet find_roots(int n, double tol, int max_iter, const WorkerPool* pool)
{
    require(n >= 1, ErrorCode::invalid_argument, "find_roots: n must be >= 1");
    require(tol > 0.0, ErrorCode::invalid_argument, "find_roots: tol must be > 0");
    require(max_iter >= 1, ErrorCode::invalid_argument, "find_roots: max_iter must be >= 1");

    // The guesses bracket theta_j only for j <= ceil(n/2); beyond that they
    // fall into the neighbouring basin. The upper half follows from the
    // symmetry x_{n+1-j} = -conj(x_j), i.e. theta_{n+1-j} = pi - conj(theta_j).
    const auto guesses = initial_guesses(n);
    const int half = (n + 1) / 2;
    RootSet set;
    set.n = n;
    set.roots.resize(n);
    // For odd n the middle root is its own mirror image and lies on
    // Re theta = pi/2; its guess starts on that axis.
    auto solve_one = [&](int i) {
        Complex guess = guesses[i];
        if (n % 2 == 1 && i == half - 1)
            guess = Complex(std::numbers::pi / 2, guess.imag());
        set.roots[i] = newton_root(i + 1, guess, n, tol, max_iter);
    };
    if (pool)
        pool->parallel_for(half, solve_one);
    else
        for (int i = 0; i < half; ++i)
            solve_one(i);
    for (int i = half; i < n; ++i) {
        const Root& partner = set.roots[n - 1 - i];
        Root& root = set.roots[i];
        root.index = i + 1;
        root.theta = std::numbers::pi - std::conj(partner.theta);
        root.x = -std::conj(partner.x);
        root.lambda_unit = kImag * root.x;
        root.newton_iters = partner.newton_iters;
        root.residual = std::abs(rho_and_derivative(root.theta, n).rho);
    }

    // Distinct basins give distinct roots; a collision means a guess escaped.
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            if (std::abs(set.roots[a].x - set.roots[b].x) <= 1e-12)
                fail(ErrorCode::duplicate_roots,
                     "find_roots: roots " + std::to_string(a + 1) + " and "
                         + std::to_string(b + 1) + " coincide");
    return set;
}

Complex p_prime_at_root(const Root& root, int n)
{
    require(n >= 1, ErrorCode::invalid_argument, "p_prime_at_root: n must be >= 1");
    const Complex s = std::sin(root.theta);
    if (std::abs(s) < 1e-14)
        fail(ErrorCode::degenerate_root,
             "p_prime_at_root: sin(theta) vanishes at root " + std::to_string(root.index));
    const auto value = rho_and_derivative(root.theta, n);
    return -value.rho_prime / (s * s);
}

} // namespace chebpint
