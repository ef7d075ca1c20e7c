// lincheck: verification suites for one big-atomic implementation.
//
//   lincheck --impl cached-me --suite audits --seed 7

#include <CLI11.hpp>

#include <cstdio>
#include <string>

#include "bigatomic/lincheck/suites.hpp"

using namespace bigatomic;
using namespace bigatomic::lincheck;

int main(int argc, char** argv) {
  CLI::App app{"Linearizability, progress and invariant checks for big atomics"};
  std::string impl_name, suite;
  std::uint64_t seed = 1;
  std::size_t histories = 500;
  std::size_t audit_steps = 100000;
  double probe_seconds = 1.0;
  app.add_option("--impl", impl_name, "simplock|seqlock|indirect|cached-wf|cached-me|writable")
      ->required();
  app.add_option("--suite", suite, "histories|probes|audits")
      ->required()
      ->check(CLI::IsMember({"histories", "probes", "audits"}));
  app.add_option("--seed", seed, "base seed");
  app.add_option("--histories", histories, "randomized histories per check");
  app.add_option("--audit-steps", audit_steps, "minimum random scheduled steps under audit");
  app.add_option("--probe-seconds", probe_seconds, "torn-read probe duration per payload size");
  CLI11_PARSE(app, argc, argv);

  const auto impl = parse_impl(impl_name);
  if (!impl) {
    std::fprintf(stderr, "lincheck: unknown implementation '%s'\n", impl_name.c_str());
    return 2;
  }

  suite_report r;
  if (suite == "histories") {
    r.append(register_histories(*impl, seed, histories));
    r.append(map_histories(*impl, seed, histories));
  } else if (suite == "probes") {
    const std::size_t threads = std::max(2u, std::thread::hardware_concurrency());
    r.append(torn_reads(*impl, threads, std::chrono::duration<double>(probe_seconds)));
    r.lines.push_back(torn_read_mutant(threads, std::chrono::seconds(1)));
    r.append(progress_probes(*impl));
    r.lines.push_back(map_progress_probe(*impl));
  } else {
    r.append(forced_schedules(*impl));
    r.append(random_audits(*impl, seed, audit_steps));
    if (*impl == impl_kind::cached_wf) r.lines.push_back(audit_mutant());
  }

  for (const auto& l : r.lines) {
    std::printf("[%s] %s: %s\n", l.pass ? "PASS" : "FAIL", l.name.c_str(), l.detail.c_str());
  }
  std::printf("%s\n", r.ok() ? "all checks passed" : "violations found");
  return r.ok() ? 0 : 1;
}
