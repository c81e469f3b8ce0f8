#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace engset {

/// Machine-readable failure category. The CLI maps these onto exit codes.
enum class ErrorCode {
    InvalidArgument,   ///< precondition or type-invariant violation
    RegimeMismatch,    ///< a limit law requested outside its regime
    QuadratureFailure, ///< adaptive quadrature did not reach tolerance
    Censored,          ///< Monte-Carlo input contains censored paths
    SingularSystem,    ///< linear solve broke down
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code)
    {
    }

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Raised when an integral cannot be resolved to the requested tolerance.
/// Carries the best estimate found before giving up.
class QuadratureError : public Error {
public:
    QuadratureError(const std::string& what, double best_estimate,
                    double error_estimate, long node_count)
        : Error(ErrorCode::QuadratureFailure, what),
          best_estimate_(best_estimate),
          error_estimate_(error_estimate),
          node_count_(node_count)
    {
    }

    double best_estimate() const noexcept { return best_estimate_; }
    double error_estimate() const noexcept { return error_estimate_; }
    long node_count() const noexcept { return node_count_; }

private:
    double best_estimate_;
    double error_estimate_;
    long node_count_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what)
{
    throw Error(code, what);
}

inline void require(bool cond, const std::string& what)
{
    if (!cond) {
        fail(ErrorCode::InvalidArgument, what);
    }
}

} // namespace engset
