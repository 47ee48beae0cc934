#pragma once

#include <stdexcept>
#include <string>

namespace epo {

enum class errc {
    non_positive_param,
    overdamped_param,
    invalid_state,
    insufficient_samples,
    solver_diverged,
    quadrature_not_converged,
    degenerate_denominator,
    config_invalid,
    io_error,
};

const char* errc_name(errc c);

class error : public std::runtime_error {
public:
    error(errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
    errc code() const { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) {
    throw error(code, what);
}

} // namespace epo
