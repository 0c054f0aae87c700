#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace dss::solve_stats {

/// Thread-local counters for interface-operator factorizations, used to
/// verify how much linear-algebra work each coupling method performs.
void reset();
void record_factorization(std::size_t dim);
std::uint64_t factorization_count();
std::vector<std::size_t> factorization_dims();

}  // namespace dss::solve_stats
