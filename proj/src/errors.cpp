#include "epo/errors.hpp"

namespace epo {

const char* errc_name(errc c) {
    switch (c) {
    case errc::non_positive_param: return "NonPositiveParam";
    case errc::overdamped_param: return "OverdampedParam";
    case errc::invalid_state: return "InvalidState";
    case errc::insufficient_samples: return "InsufficientSamples";
    case errc::solver_diverged: return "SolverDiverged";
    case errc::quadrature_not_converged: return "QuadratureNotConverged";
    case errc::degenerate_denominator: return "DegenerateDenominator";
    case errc::config_invalid: return "ConfigInvalid";
    case errc::io_error: return "IoError";
    }
    return "UnknownError";
}

} // namespace epo
