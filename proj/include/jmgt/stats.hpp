#pragma once

#include <cstddef>
#include <span>

namespace jmgt {

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::size_t points = 0;
};

/// Ordinary least squares y = slope * x + intercept.
LinearFit least_squares(std::span<const double> x, std::span<const double> y);

/// Fit log(y) against log(x); nonpositive entries are skipped.
LinearFit loglog_fit(std::span<const double> x, std::span<const double> y);

}  // namespace jmgt
