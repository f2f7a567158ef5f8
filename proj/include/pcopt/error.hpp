#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pcopt {

enum class Errc {
    dimension_mismatch,
    evaluation_failure,
    model_degeneracy,
    invalid_domain,
    empty_sample,
    undefined_density,
    degenerate_overlap,
    insufficient_sample,
    infinite_objective,
    degenerate_weights,
    fit_failure,
    degenerate_point,
    infeasible_folds,
    cv_failure,
    stacking_failure,
    invalid_input,
    config_error,
    io_error,
};

std::string_view to_string(Errc code) noexcept;

/// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    [[nodiscard]] Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace pcopt
