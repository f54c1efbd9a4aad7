#include "jmgt/params.hpp"

#include <cmath>
#include <sstream>

#include "jmgt/errors.hpp"

namespace jmgt {

namespace {

void require_positive(const char* name, double v) {
    if (!std::isfinite(v) || !(v > 0.0))
        throw ConfigError(name, "must be a finite positive number, got " + std::to_string(v));
}

}  // namespace

ModelParams::ModelParams(double tau, double delta, double b_over_a, double sigma, double lambda)
    : tau_(tau), delta_(delta), b_over_a_(b_over_a), sigma_(sigma), lambda_(lambda) {
    require_positive("tau", tau);
    require_positive("delta", delta);
    require_positive("b_over_a", b_over_a);
    require_positive("sigma", sigma);
    if (!std::isfinite(lambda) || !(lambda >= 1.0))
        throw ConfigError("lambda", "must be >= 1, got " + std::to_string(lambda));
}

ModelParams ModelParams::with_lambda(double lambda) const {
    return ModelParams(tau_, delta_, b_over_a_, sigma_, lambda);
}

ModelParams ModelParams::with_b_over_a(double b_over_a) const {
    return ModelParams(tau_, delta_, b_over_a, sigma_, lambda_);
}

std::string ModelParams::describe() const {
    std::ostringstream os;
    os.precision(17);
    os << "tau=" << tau_ << " delta=" << delta_ << " b_over_a=" << b_over_a_ << " sigma=" << sigma_
       << " lambda=" << lambda_;
    return os.str();
}

}  // namespace jmgt
