#include "uwoan/batch.hpp"

#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "uwoan/sim_engine.hpp"

namespace uwoan {

std::vector<RunSpec> sweep_specs(const SimConfig& base, std::span<const double> c0_values, std::size_t seeds)
{
  std::vector<RunSpec> specs;
  specs.reserve(c0_values.size() * seeds);
  for (double c0 : c0_values) {
    SimConfig cfg = base;
    cfg.water.c0 = c0;
    cfg.validate();
    for (std::size_t s = 0; s < seeds; ++s)
      specs.push_back({cfg, base.seed + s});
  }
  return specs;
}

std::vector<SimReport> run_batch_serial(std::span<const RunSpec> specs)
{
  std::vector<SimReport> out;
  out.reserve(specs.size());
  for (const auto& s : specs)
    out.push_back(run(s.config, s.seed));
  return out;
}

std::vector<SimReport> run_batch_parallel(std::span<const RunSpec> specs, int threads)
{
  std::vector<SimReport> out(specs.size());
  std::exception_ptr failure;
  const auto n = static_cast<std::ptrdiff_t>(specs.size());

#ifdef _OPENMP
  const int team = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 4) num_threads(team)
#endif
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    try {
      out[k] = run(specs[k].config, specs[k].seed);
    } catch (...) {
#ifdef _OPENMP
#pragma omp critical(uwoan_batch_failure)
#endif
      if (!failure)
        failure = std::current_exception();
    }
  }
  (void)threads;
  if (failure)
    std::rethrow_exception(failure);
  return out;
}

int max_threads()
{
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

} // namespace uwoan
