// Independent reference computations used by several test files.
#pragma once

#include <random>
#include <vector>

#include "wdro/empirical.hpp"

namespace wdro_test {

/// Random canonical law with `atoms` atoms on [-5, 5] and Dirichlet-like masses.
wdro::DiscreteDistribution1D random_distribution(std::mt19937_64& gen, int atoms);

/// W_p by solving the transport LP over the full coupling polytope.
double coupling_lp_distance(const wdro::DiscreteDistribution1D& P, const wdro::DiscreteDistribution1D& Q, double p);

/// max c'x over {Ax <= b, x >= 0} by enumerating every basis; only for tiny problems.
double brute_force_lp_max(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
                          const std::vector<double>& c, bool* feasible);

}  // namespace wdro_test
