#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "bigatomic/bench/config.hpp"

namespace bigatomic::bench {

// Per-run op accounting, summed over workers after the run.
struct op_counters {
  std::uint64_t finds = 0;
  std::uint64_t updates = 0;
  std::uint64_t inserts = 0;  // update ops that drew insert
  std::uint64_t erases = 0;   // update ops that drew delete
  std::uint64_t cas_attempts = 0;
  std::uint64_t cas_successes = 0;

  op_counters& operator+=(const op_counters& o) noexcept;
};

struct throughput_report {
  std::string impl;
  std::string mode;
  std::uint64_t p = 0;
  std::uint64_t n = 0;
  unsigned u = 0;
  double z = 0;
  unsigned k = 0;
  double seconds = 0;  // measured wall time of the counted phase
  std::uint64_t ops = 0;
  op_counters counters;  // not part of the CSV row

  double mops() const noexcept { return static_cast<double>(ops) / seconds / 1e6; }
};

inline constexpr std::string_view kCsvHeader = "impl,mode,p,n,u,z,k,seconds,ops,mops";

// Floating fields use the shortest representation that parses back to the
// same double; mops is fixed at three decimals.
std::string format_row(const throughput_report& r);
// Throws std::invalid_argument on a malformed row, including a mops field
// inconsistent with ops and seconds.
throughput_report parse_row(std::string_view line);

// Appends rows to path, writing the header first if the file is new or
// empty. Throws std::runtime_error naming the path on I/O failure.
void emit_report(const std::string& path, const std::vector<throughput_report>& rows);
// Reads a CSV written by emit_report.
std::vector<throughput_report> read_report(const std::string& path);

}  // namespace bigatomic::bench
