// bench: throughput of big atomics on the array and hash-table workloads.
//
//   bench --impl cached-me --mode array -p 8 -n 1000000 -u 5 -z 0 -k 4
//         --seconds 5 --seed 1 --csv out.csv

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <exception>
#include <string>

#include "bigatomic/bench/workload.hpp"
#include "bigatomic/thread_registry.hpp"

using namespace bigatomic;
using namespace bigatomic::bench;

int main(int argc, char** argv) {
  CLI::App app{"Big-atomic workload benchmark"};
  std::string impl_name = "cached-me", mode_name = "array", csv;
  bench_config cfg;
  app.add_option("--impl", impl_name, "simplock|seqlock|indirect|cached-wf|cached-me|writable");
  app.add_option("--mode", mode_name, "array|hash|hash-chaining");
  app.add_option("-p", cfg.p, "worker threads");
  app.add_option("-n", cfg.n, "elements (array), or table capacity and stored keys (hash)");
  app.add_option("-u", cfg.u, "update percent, 0..100");
  app.add_option("-z", cfg.z, "Zipfian exponent, 0 = uniform");
  app.add_option("-k", cfg.k, "payload words, 1..16 (array mode)");
  app.add_option("--seconds", cfg.seconds, "measured duration");
  app.add_option("--warmup", cfg.warmup, "uncounted warmup before measuring");
  app.add_option("--seed", cfg.seed, "workload seed");
  app.add_option("--csv", csv, "append a result row to this CSV file");
  CLI11_PARSE(app, argc, argv);

  const auto impl = parse_impl(impl_name);
  if (!impl) {
    std::fprintf(stderr, "bench: unknown implementation '%s'\n", impl_name.c_str());
    return 2;
  }
  const auto mode = parse_mode(mode_name);
  if (!mode) {
    std::fprintf(stderr, "bench: unknown mode '%s'\n", mode_name.c_str());
    return 2;
  }
  cfg.impl = *impl;
  cfg.mode = *mode;

  try {
    // Size per-thread tables for the workers plus this thread.
    if (cfg.p < kHardMaxThreads)
      thread_registry::configure(std::max(thread_registry::max_threads(), cfg.p + 1));
    const throughput_report r = run_bench(cfg);
    std::printf("%s\n%s\n", std::string(kCsvHeader).c_str(), format_row(r).c_str());
    if (!csv.empty()) emit_report(csv, {r});
  } catch (const std::exception& e) {
    std::fprintf(stderr, "bench: %s\n", e.what());
    return 1;
  }
  return 0;
}
