#include "chebpint/common.hpp"

namespace chebpint
{

const char* to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::ok: return "ok";
    case ErrorCode::invalid_argument: return "invalid argument";
    case ErrorCode::non_convergence: return "non-convergence";
    case ErrorCode::duplicate_roots: return "duplicate roots";
    case ErrorCode::degenerate_root: return "degenerate root";
    case ErrorCode::zero_pivot: return "zero pivot";
    case ErrorCode::singular_matrix: return "singular matrix";
    case ErrorCode::singular_shift: return "singular shift";
    case ErrorCode::dimension_mismatch: return "dimension mismatch";
    case ErrorCode::non_real_solution: return "non-real solution";
    case ErrorCode::max_iter_exceeded: return "maximum iterations exceeded";
    case ErrorCode::overflow: return "overflow";
    case ErrorCode::unsupported_kind: return "unsupported kind";
    case ErrorCode::invalid_grid: return "invalid grid";
    case ErrorCode::io: return "i/o error";
    case ErrorCode::internal: return "internal error";
    }
    return "unknown";
}

} // namespace chebpint
