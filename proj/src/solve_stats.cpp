#include "dss/solve_stats.hpp"

namespace dss::solve_stats {

namespace {
thread_local std::vector<std::size_t> g_dims;
}

void reset() { g_dims.clear(); }

void record_factorization(std::size_t dim) { g_dims.push_back(dim); }

std::uint64_t factorization_count() { return g_dims.size(); }

std::vector<std::size_t> factorization_dims() { return g_dims; }

}  // namespace dss::solve_stats
