// Times the serial reference sweep against the OpenMP sweep on the default
// scenario and checks that both produce the same reports.
//
//   bench_sweep [seeds-per-c0] [threads]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "uwoan/batch.hpp"
#include "uwoan/scenario.hpp"

using namespace uwoan;
using clock_type = std::chrono::steady_clock;

int main(int argc, char** argv)
{
  const std::size_t seeds = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 200;
  const int threads = argc > 2 ? std::atoi(argv[2]) : max_threads();
  const std::vector<double> c0s{0.056, 0.120, 0.151};
  const auto specs = sweep_specs(SimConfig{}, c0s, seeds);

  auto t0 = clock_type::now();
  const auto serial = run_batch_serial(specs);
  auto t1 = clock_type::now();
  const auto parallel = run_batch_parallel(specs, threads);
  auto t2 = clock_type::now();

  const double ts = std::chrono::duration<double>(t1 - t0).count();
  const double tp = std::chrono::duration<double>(t2 - t1).count();
  const bool same = sweep_csv(serial) == sweep_csv(parallel);

  std::printf("runs           %zu\n", specs.size());
  std::printf("serial         %.3f s (%.2f ms/run)\n", ts, 1e3 * ts / static_cast<double>(specs.size()));
  std::printf("openmp x%-3d    %.3f s (%.2f ms/run)\n", threads, tp, 1e3 * tp / static_cast<double>(specs.size()));
  std::printf("speedup        %.2fx\n", tp > 0 ? ts / tp : 0.0);
  std::printf("identical      %s\n", same ? "yes" : "NO");
  return same ? 0 : 1;
}
