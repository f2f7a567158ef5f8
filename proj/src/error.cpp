#include "pcopt/error.hpp"

namespace pcopt {

std::string_view to_string(Errc code) noexcept {
    switch (code) {
        case Errc::dimension_mismatch: return "dimension mismatch";
        case Errc::evaluation_failure: return "evaluation failure";
        case Errc::model_degeneracy: return "model degeneracy";
        case Errc::invalid_domain: return "invalid domain";
        case Errc::empty_sample: return "empty sample";
        case Errc::undefined_density: return "undefined density";
        case Errc::degenerate_overlap: return "degenerate overlap";
        case Errc::insufficient_sample: return "insufficient sample";
        case Errc::infinite_objective: return "infinite objective";
        case Errc::degenerate_weights: return "degenerate weights";
        case Errc::fit_failure: return "fit failure";
        case Errc::degenerate_point: return "degenerate point";
        case Errc::infeasible_folds: return "infeasible folds";
        case Errc::cv_failure: return "cross-validation failure";
        case Errc::stacking_failure: return "stacking failure";
        case Errc::invalid_input: return "invalid input";
        case Errc::config_error: return "config error";
        case Errc::io_error: return "i/o error";
    }
    return "unknown error";
}

}  // namespace pcopt
