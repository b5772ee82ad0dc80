#pragma once

#include "oracle/oracle.hpp"
#include "xplab/space.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

namespace xplab::test {

inline std::vector<double> weights_of(const WeightedSpace& s)
{
    return {s.weights().begin(), s.weights().end()};
}

inline std::vector<std::size_t> zero_based(const SupportSet& S)
{
    std::vector<std::size_t> out;
    for (std::size_t n : S)
        out.push_back(n - 1);
    return out;
}

inline bool rel_close(double a, double b, double tol)
{
    return std::abs(a - b) <= tol * std::max({std::abs(a), std::abs(b), 1e-300});
}

} // namespace xplab::test
