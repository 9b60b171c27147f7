#pragma once

#include "tcone/errors.hpp"

namespace tcone {

/// Physical parameters of the two-phase functional. The set E carries the
/// larger permittivity `beta`, its complement carries `alpha`.
struct MaterialConfig {
    int n = 3;
    double alpha = 1.0;
    double beta = 30.0;
    double gamma = 1.0;       ///< surface tension
    double lambda_pen = 0.0;  ///< volume penalization Lambda

    [[nodiscard]] double ratio() const { return beta / alpha; }

    /// sigma_E(x): beta inside E, alpha outside.
    [[nodiscard]] double sigma(bool in_e) const { return in_e ? beta : alpha; }

    /// Enforces 0 < alpha < beta, gamma > 0, Lambda >= 0, n >= 2.
    void validate() const {
        if (n < 2) throw DomainError("MaterialConfig: dimension must be at least 2");
        if (!(alpha > 0.0)) throw DomainError("MaterialConfig: alpha must be positive");
        if (!(beta > alpha)) throw DomainError("MaterialConfig: beta must exceed alpha");
        if (!(gamma > 0.0)) throw DomainError("MaterialConfig: gamma must be positive");
        if (!(lambda_pen >= 0.0)) throw DomainError("MaterialConfig: Lambda must be non-negative");
    }

    /// Same as validate() but admits alpha == beta (no-contrast control runs).
    void validate_allow_equal() const {
        if (n < 2) throw DomainError("MaterialConfig: dimension must be at least 2");
        if (!(alpha > 0.0)) throw DomainError("MaterialConfig: alpha must be positive");
        if (!(beta >= alpha)) throw DomainError("MaterialConfig: beta must not be below alpha");
        if (!(gamma > 0.0)) throw DomainError("MaterialConfig: gamma must be positive");
        if (!(lambda_pen >= 0.0)) throw DomainError("MaterialConfig: Lambda must be non-negative");
    }
};

}  // namespace tcone
