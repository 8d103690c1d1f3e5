#pragma once

#include <cstdint>

#include "kfdar/instance.hpp"

namespace kfdar {

// 2*n_pairs points uniform in the unit square; demand i joins point 2i to
// point 2i+1. Capacity is floor(sqrt(n_pairs)) (at least 1) and the root is
// the endpoint nearest the origin.
DialARideInstance gen_euclidean_random(int n_pairs, std::uint64_t seed);

// Closure of a complete graph with edge lengths uniform in [1, 10].
Metric gen_random_metric(int n, std::uint64_t seed);

// Random metric plus m demands with distinct endpoints.
KForestInstance gen_random_metric_instance(int n, int m, int k, std::uint64_t seed);

// Dial-a-Ride on a random metric; weights are uniform in [1, max_weight] and
// the root is a uniformly chosen vertex.
DialARideInstance gen_random_dar_instance(int n, int m, std::int64_t capacity,
                                          std::int64_t max_weight, std::uint64_t seed);

// Dial-a-Ride on n points with uniform x in [0, 1] and y = 0.
DialARideInstance gen_line_instance(int n, int m, std::int64_t capacity, std::int64_t max_weight,
                                    std::uint64_t seed);

}  // namespace kfdar
