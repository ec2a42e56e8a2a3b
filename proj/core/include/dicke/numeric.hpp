#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dicke {

/// Pairwise (cascade) summation. The reduction tree depends only on the
/// length of the input, so the result is bit-stable across worker counts.
double pairwise_sum(std::span<const double> values);

/// Gauss-Legendre nodes and weights on [-1, 1], nodes ascending.
struct GaussLegendre {
    std::size_t size() const { return nodes.size(); }

    std::vector<double> nodes;
    std::vector<double> weights;
};

GaussLegendre gauss_legendre(int n);

/// Sets the OpenMP worker count; 0 keeps the runtime default.
void set_worker_count(int n);
int worker_count();

}  // namespace dicke
