#include "chebpint/spectral.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "chebpint/timedisc.hpp"
#include "chebpint/worker_pool.hpp"

namespace chebpint
{

CMatrix build_V(const RootSet& roots)
{
    const int n = roots.n;
    require(n >= 1 && static_cast<int>(roots.roots.size()) == n, ErrorCode::invalid_argument,
            "build_V: malformed root set");
    CMatrix V(n, n);
    for (int j = 0; j < n; ++j) {
        const Complex x = roots.roots[j].x;
        Complex u_prev = 0.0; // U_{-1}
        Complex u = 1.0;      // U_0
        Complex phase = 1.0;  // i^k
        for (int k = 0; k < n; ++k) {
            V(k, j) = phase * u;
            const Complex u_next = 2.0 * x * u - u_prev;
            u_prev = u;
            u = u_next;
            phase *= kImag;
        }
    }
    return V;
}

namespace
{

constexpr double kPivotFloor = 1e-300;

// Forward sweep stores the modified upper diagonal in `scratch`.
template <typename LowerFn, typename DiagFn, typename UpperFn>
void thomas_solve(int n, LowerFn lower, DiagFn diag, UpperFn upper, const Complex* rhs,
                  Complex* out, Complex* scratch)
{
    Complex pivot = diag(0);
    if (std::abs(pivot) < kPivotFloor)
        fail(ErrorCode::zero_pivot, "thomas_tridiagonal: zero pivot at row 0");
    out[0] = rhs[0] / pivot;
    for (int k = 1; k < n; ++k) {
        scratch[k - 1] = upper(k - 1) / pivot;
        pivot = diag(k) - lower(k - 1) * scratch[k - 1];
        if (std::abs(pivot) < kPivotFloor)
            fail(ErrorCode::zero_pivot,
                 "thomas_tridiagonal: zero pivot at row " + std::to_string(k));
        out[k] = (rhs[k] - lower(k - 1) * out[k - 1]) / pivot;
    }
    for (int k = n - 2; k >= 0; --k)
        out[k] -= scratch[k] * out[k + 1];
}

} // namespace

CVector thomas_tridiagonal(std::span<const Complex> lower, std::span<const Complex> diag,
                           std::span<const Complex> upper, std::span<const Complex> rhs)
{
    const int n = static_cast<int>(diag.size());
    require(n >= 1, ErrorCode::invalid_argument, "thomas_tridiagonal: empty system");
    require(static_cast<int>(rhs.size()) == n
                && static_cast<int>(lower.size()) == n - 1
                && static_cast<int>(upper.size()) == n - 1,
            ErrorCode::dimension_mismatch, "thomas_tridiagonal: inconsistent sizes");
    CVector out(n);
    std::vector<Complex> scratch(std::max(1, n - 1));
    thomas_solve(
        n, [&](int k) { return lower[k]; }, [&](int k) { return diag[k]; },
        [&](int k) { return upper[k]; }, rhs.data(), out.data(), scratch.data());
    return out;
}

CVector apply_S(std::span<const Complex> x)
{
    const int n = static_cast<int>(x.size());
    CVector y(n);
    if (n == 1) {
        y(0) = 4.0 * x[0];
        return y;
    }
    for (int k = 0; k < n; ++k) {
        const double d = (k == 0 || k == n - 1) ? 3.0 : 2.0;
        Complex v = d * x[k];
        if (k >= 2)
            v -= x[k - 2];
        if (k + 2 < n)
            v -= x[k + 2];
        y(k) = v;
    }
    return y;
}

PentaSolution solve_pentadiagonal_S(int n)
{
    require(n >= 1, ErrorCode::invalid_argument, "solve_pentadiagonal_S: n must be >= 1");
    PentaSolution out;
    out.b = CVector::Zero(n);
    if (n == 1) {
        out.b(0) = 0.5;
        return out;
    }
    CVector rhs = CVector::Zero(n);
    rhs(n - 1) = 2.0;
    rhs(n - 2) = kImag;

    // Unknowns with the same index parity form a tridiagonal chain (-1, d, -1).
    for (int start = 0; start < 2; ++start) {
        std::vector<int> idx;
        for (int k = start; k < n; k += 2)
            idx.push_back(k);
        const int len = static_cast<int>(idx.size());
        std::vector<Complex> diag(len), off(std::max(0, len - 1), Complex(-1.0)), r(len);
        for (int i = 0; i < len; ++i) {
            const int k = idx[i];
            diag[i] = (k == 0 || k == n - 1) ? 3.0 : 2.0;
            r[i] = rhs(k);
        }
        const CVector sol = thomas_tridiagonal(off, diag, off, r);
        for (int i = 0; i < len; ++i)
            out.b(idx[i]) = sol(i);
    }
    return out;
}

CMatrix build_Vinv_fast(const RootSet& roots, const WorkerPool* pool)
{
    const int n = roots.n;
    require(n >= 1 && static_cast<int>(roots.roots.size()) == n, ErrorCode::invalid_argument,
            "build_Vinv_fast: malformed root set");
    const CVector b = solve_pentadiagonal_S(n).b;

    // (-i)^k column scaling undoes the i^k row scaling of V.
    std::vector<Complex> phase(n);
    Complex p = 1.0;
    for (int k = 0; k < n; ++k) {
        phase[k] = p;
        p *= -kImag;
    }

    // Row-major so that each task writes one contiguous row.
    Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> Vinv(n, n);
    auto invert_row = [&](int j) {
        const Root& root = roots.roots[j];
        const Complex scale = 2.0 / p_prime_at_root(root, n);
        const Complex d = -2.0 * root.x;
        std::vector<Complex> rhs(n), psi(n), scratch(std::max(1, n - 1));
        for (int k = 0; k < n; ++k)
            rhs[k] = scale * b(k);
        thomas_solve(
            n, [](int) { return Complex(1.0); }, [d](int) { return d; },
            [](int) { return Complex(1.0); }, rhs.data(), psi.data(), scratch.data());
        const CVector w = apply_S(psi);
        for (int k = 0; k < n; ++k)
            Vinv(j, k) = 0.5 * w(k) * phase[k];
    };
    if (pool)
        pool->parallel_for(n, invert_row);
    else
        for (int j = 0; j < n; ++j)
            invert_row(j);
    return Vinv;
}

CMatrix build_Vinv_reference(const CMatrix& V)
{
    require(V.rows() == V.cols() && V.rows() > 0, ErrorCode::invalid_argument,
            "build_Vinv_reference: matrix must be square and non-empty");
    Eigen::PartialPivLU<CMatrix> lu(V);
    const double rcond = lu.rcond();
    if (!(rcond > std::numeric_limits<double>::epsilon()))
        fail(ErrorCode::singular_matrix, "build_Vinv_reference: matrix is numerically singular");
    return lu.inverse();
}

namespace
{

double largest_singular_value(const CMatrix& A)
{
    CVector v = CVector::Ones(A.cols()).normalized();
    double sigma = 0.0;
    for (int it = 0; it < 1000; ++it) {
        CVector w = A.adjoint() * (A * v);
        const double norm = w.norm();
        if (norm == 0.0)
            return 0.0;
        v = w / norm;
        const double next = std::sqrt(norm);
        if (std::abs(next - sigma) <= 1e-10 * next)
            return next;
        sigma = next;
    }
    return sigma;
}

double smallest_singular_value(const CMatrix& A)
{
    Eigen::PartialPivLU<CMatrix> lu(A);
    if (!(lu.rcond() > 0.0))
        fail(ErrorCode::singular_matrix, "cond2_estimate: matrix is singular");
    CVector v = CVector::Ones(A.cols()).normalized();
    double inv_sigma = 0.0;
    for (int it = 0; it < 1000; ++it) {
        // (A^H A)^{-1} v = A^{-1} A^{-H} v
        CVector w = lu.solve(lu.adjoint().solve(v));
        const double norm = w.norm();
        v = w / norm;
        const double next = std::sqrt(norm);
        if (std::abs(next - inv_sigma) <= 1e-10 * next)
            return 1.0 / next;
        inv_sigma = next;
    }
    return 1.0 / inv_sigma;
}

} // namespace

double cond2_estimate(const CMatrix& V)
{
    require(V.rows() == V.cols() && V.rows() > 0, ErrorCode::invalid_argument,
            "cond2_estimate: matrix must be square and non-empty");
    double smax = 0.0, smin = 0.0;
    if (V.rows() <= 2048) {
        Eigen::BDCSVD<CMatrix> svd(V);
        const auto& s = svd.singularValues();
        smax = s(0);
        smin = s(s.size() - 1);
    } else {
        smax = largest_singular_value(V);
        smin = smallest_singular_value(V);
    }
    if (!(smin > std::numeric_limits<double>::min()))
        fail(ErrorCode::singular_matrix, "cond2_estimate: smallest singular value underflows");
    return smax / smin;
}

double decomposition_residual(const CMatrix& B, const SpectralDecomposition& decomp)
{
    require(B.rows() == decomp.n && B.cols() == decomp.n, ErrorCode::dimension_mismatch,
            "decomposition_residual: size mismatch");
    const CMatrix VD = decomp.V * decomp.eigenvalues.asDiagonal();
    CMatrix R = B;
    R.noalias() -= VD * decomp.Vinv;
    return R.norm() / B.norm();
}

SpectralDecomposition decompose(int n, double dt, const DecomposeOptions& options)
{
    require(n >= 1, ErrorCode::invalid_argument, "decompose: n must be >= 1");
    require(dt > 0.0 && std::isfinite(dt), ErrorCode::invalid_argument, "decompose: dt must be > 0");
    const RootSet roots = find_roots(n, options.tol, options.max_iter, options.pool);

    SpectralDecomposition out;
    out.n = n;
    out.dt = dt;
    out.max_newton_iters = roots.max_newton_iters();
    out.eigenvalues.resize(n);
    for (int j = 0; j < n; ++j)
        out.eigenvalues(j) = roots.roots[j].lambda_unit / dt;
    out.V = build_V(roots);
    out.Vinv = build_Vinv_fast(roots, options.pool);
    if (options.compute_cond2)
        out.cond2 = cond2_estimate(out.V);
    if (options.compute_residual)
        out.residual = decomposition_residual(assemble_B(n, dt).toDense().cast<Complex>(), out);
    return out;
}

SpectralDecomposition decompose(int n, double dt, double tol)
{
    DecomposeOptions options;
    options.tol = tol;
    return decompose(n, dt, options);
}

namespace
{

constexpr const char* kDumpMagic = "CHEBPINT-DECOMPOSITION";
constexpr int kDumpVersion = 1;

void write_le(std::ostream& os, double value)
{
    std::uint64_t bits = std::bit_cast<std::uint64_t>(value);
    unsigned char bytes[8];
    for (int i = 0; i < 8; ++i)
        bytes[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xffu);
    os.write(reinterpret_cast<const char*>(bytes), 8);
}

double read_le(std::istream& is)
{
    unsigned char bytes[8];
    is.read(reinterpret_cast<char*>(bytes), 8);
    if (!is)
        fail(ErrorCode::io, "load_decomposition: truncated payload");
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i)
        bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
    return std::bit_cast<double>(bits);
}

void write_matrix(std::ostream& os, const CMatrix& M)
{
    for (Eigen::Index r = 0; r < M.rows(); ++r)
        for (Eigen::Index c = 0; c < M.cols(); ++c) {
            write_le(os, M(r, c).real());
            write_le(os, M(r, c).imag());
        }
}

CMatrix read_matrix(std::istream& is, int n)
{
    CMatrix M(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            const double re = read_le(is);
            const double im = read_le(is);
            M(r, c) = Complex(re, im);
        }
    return M;
}

} // namespace

void save_decomposition(const SpectralDecomposition& decomp, const std::string& path)
{
    std::ofstream os(path, std::ios::binary);
    if (!os)
        fail(ErrorCode::io, "save_decomposition: cannot open " + path);
    char header[256];
    std::snprintf(header, sizeof header, "%s %d n=%d dt=%.17g cond2=%.17g residual=%.17g newton=%d\n",
                  kDumpMagic, kDumpVersion, decomp.n, decomp.dt, decomp.cond2, decomp.residual,
                  decomp.max_newton_iters);
    os << header;
    for (int j = 0; j < decomp.n; ++j) {
        write_le(os, decomp.eigenvalues(j).real());
        write_le(os, decomp.eigenvalues(j).imag());
    }
    write_matrix(os, decomp.V);
    write_matrix(os, decomp.Vinv);
    if (!os)
        fail(ErrorCode::io, "save_decomposition: write failed for " + path);
}

SpectralDecomposition load_decomposition(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        fail(ErrorCode::io, "load_decomposition: cannot open " + path);
    std::string line;
    std::getline(is, line);
    std::istringstream hs(line);
    std::string magic, field;
    int version = 0;
    hs >> magic >> version;
    if (magic != kDumpMagic || version != kDumpVersion)
        fail(ErrorCode::io, "load_decomposition: unrecognized header in " + path);

    SpectralDecomposition out;
    while (hs >> field) {
        const auto eq = field.find('=');
        if (eq == std::string::npos)
            continue;
        const std::string key = field.substr(0, eq);
        const std::string value = field.substr(eq + 1);
        if (key == "n")
            out.n = std::stoi(value);
        else if (key == "dt")
            out.dt = std::strtod(value.c_str(), nullptr);
        else if (key == "cond2")
            out.cond2 = std::strtod(value.c_str(), nullptr);
        else if (key == "residual")
            out.residual = std::strtod(value.c_str(), nullptr);
        else if (key == "newton")
            out.max_newton_iters = std::stoi(value);
    }
    if (out.n < 1 || !(out.dt > 0.0))
        fail(ErrorCode::io, "load_decomposition: invalid n or dt in " + path);
    out.eigenvalues.resize(out.n);
    for (int j = 0; j < out.n; ++j) {
        const double re = read_le(is);
        const double im = read_le(is);
        out.eigenvalues(j) = Complex(re, im);
    }
    out.V = read_matrix(is, out.n);
    out.Vinv = read_matrix(is, out.n);
    return out;
}

} // namespace chebpint
