#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "uwoan/config.hpp"
#include "uwoan/report.hpp"

namespace uwoan {

struct RunSpec
{
  SimConfig config;
  std::uint64_t seed{0};
};

/// One spec per (c0, seed) pair: c0 outer, seeds base_seed .. base_seed+n-1 inner.
std::vector<RunSpec> sweep_specs(const SimConfig& base, std::span<const double> c0_values, std::size_t seeds);

/// Reference implementation: runs in order on the calling thread.
std::vector<SimReport> run_batch_serial(std::span<const RunSpec> specs);

/// OpenMP fan-out over independent runs. Output slot k always holds the
/// report for specs[k]; each run owns its RNG, so results are identical to
/// run_batch_serial for any thread count. threads = 0 uses the OpenMP default.
std::vector<SimReport> run_batch_parallel(std::span<const RunSpec> specs, int threads = 0);

int max_threads();

} // namespace uwoan
