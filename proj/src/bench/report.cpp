#include "bigatomic/bench/report.hpp"

#include <cerrno>
#include <charconv>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <system_error>

namespace bigatomic::bench {

const char* to_string(bench_mode m) noexcept {
  switch (m) {
    case bench_mode::array: return "array";
    case bench_mode::hash: return "hash";
    case bench_mode::hash_chaining: return "hash-chaining";
  }
  return "?";
}

std::optional<bench_mode> parse_mode(std::string_view s) noexcept {
  for (bench_mode m : {bench_mode::array, bench_mode::hash, bench_mode::hash_chaining})
    if (s == to_string(m)) return m;
  return std::nullopt;
}

op_counters& op_counters::operator+=(const op_counters& o) noexcept {
  finds += o.finds;
  updates += o.updates;
  inserts += o.inserts;
  erases += o.erases;
  cas_attempts += o.cas_attempts;
  cas_successes += o.cas_successes;
  return *this;
}

namespace {

std::string shortest(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

std::string fixed3(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::fixed, 3);
  return std::string(buf, end);
}

template <class T>
T field(std::string_view s, const char* name) {
  T v{};
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size() || s.empty())
    throw std::invalid_argument(std::string("csv: bad ") + name + " field '" + std::string(s) + "'");
  return v;
}

}  // namespace

std::string format_row(const throughput_report& r) {
  std::string out;
  out += r.impl + ',' + r.mode + ',' + std::to_string(r.p) + ',' + std::to_string(r.n) + ',' +
         std::to_string(r.u) + ',' + shortest(r.z) + ',' + std::to_string(r.k) + ',' +
         shortest(r.seconds) + ',' + std::to_string(r.ops) + ',' + fixed3(r.mops());
  return out;
}

throughput_report parse_row(std::string_view line) {
  if (!line.empty() && line.back() == '\n') line.remove_suffix(1);
  std::string_view f[10];
  std::size_t count = 0;
  for (;;) {
    const auto comma = line.find(',');
    if (count == 10) throw std::invalid_argument("csv: too many fields");
    f[count++] = line.substr(0, comma);
    if (comma == std::string_view::npos) break;
    line.remove_prefix(comma + 1);
  }
  if (count != 10) throw std::invalid_argument("csv: expected 10 fields, got " + std::to_string(count));
  throughput_report r;
  r.impl = f[0];
  r.mode = f[1];
  r.p = field<std::uint64_t>(f[2], "p");
  r.n = field<std::uint64_t>(f[3], "n");
  r.u = field<unsigned>(f[4], "u");
  r.z = field<double>(f[5], "z");
  r.k = field<unsigned>(f[6], "k");
  r.seconds = field<double>(f[7], "seconds");
  r.ops = field<std::uint64_t>(f[8], "ops");
  if (fixed3(r.mops()) != f[9])
    throw std::invalid_argument("csv: mops '" + std::string(f[9]) + "' does not match ops/seconds");
  return r;
}

void emit_report(const std::string& path, const std::vector<throughput_report>& rows) {
  bool fresh;
  {
    std::ifstream probe(path, std::ios::binary | std::ios::ate);
    fresh = !probe || probe.tellg() == 0;
  }
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw std::runtime_error("cannot open " + path + ": " + std::strerror(errno));
  if (fresh) out << kCsvHeader << '\n';
  for (const auto& r : rows) out << format_row(r) << '\n';
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + path);
}

std::vector<throughput_report> read_report(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path + ": " + std::strerror(errno));
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader)
    throw std::invalid_argument("csv: missing header in " + path);
  std::vector<throughput_report> rows;
  while (std::getline(in, line))
    if (!line.empty()) rows.push_back(parse_row(line));
  return rows;
}

}  // namespace bigatomic::bench
