#pragma once

#include <fftw3.h>

#include <cstdint>
#include <vector>

#include "jmgt/grid.hpp"

namespace jmgt {

struct FrequencyGrid::Impl {
    int dims = 1;
    int n = 4;
    double period = 0.0;
    double fundamental = 0.0;
    double max_magnitude = 0.0;
    std::size_t total = 0;
    std::vector<double> magnitudes;
    std::vector<std::int64_t> keys;
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;

    Impl() = default;
    Impl(const Impl&) = delete;
    Impl& operator=(const Impl&) = delete;
    ~Impl();

    void make_plans();
};

}  // namespace jmgt
