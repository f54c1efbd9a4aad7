#pragma once

#include <string>

namespace jmgt {

/// Physical constants of the scaled equation. Immutable once built.
class ModelParams {
public:
    /// Throws ConfigError naming the first invalid field.
    ModelParams(double tau, double delta, double b_over_a, double sigma, double lambda = 1.0);

    double tau() const noexcept { return tau_; }
    double delta() const noexcept { return delta_; }
    double b_over_a() const noexcept { return b_over_a_; }
    double sigma() const noexcept { return sigma_; }
    double lambda() const noexcept { return lambda_; }

    /// 1 + B/(2A).
    double beta() const noexcept { return 1.0 + 0.5 * b_over_a_; }

    ModelParams with_lambda(double lambda) const;
    ModelParams with_b_over_a(double b_over_a) const;

    std::string describe() const;

private:
    double tau_, delta_, b_over_a_, sigma_, lambda_;
};

}  // namespace jmgt
