#include "jmgt/stats.hpp"

#include <cmath>
#include <vector>

#include "jmgt/errors.hpp"

namespace jmgt {

LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ContractViolation("least_squares: size mismatch");
    LinearFit f;
    f.points = x.size();
    if (x.size() < 2) return f;
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= x.size();
    my /= y.size();
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) return f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return f;
}

LinearFit loglog_fit(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ContractViolation("loglog_fit: size mismatch");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] > 0.0 && y[i] > 0.0) {
            lx.push_back(std::log(x[i]));
            ly.push_back(std::log(y[i]));
        }
    return least_squares(lx, ly);
}

}  // namespace jmgt
