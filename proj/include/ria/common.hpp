#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace ria {

// Error taxonomy. The CLI maps these onto exit codes 2/3/4.
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct data_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Collector for non-fatal diagnostics (imputation fallbacks, dropped
/// regions, degenerate permutation distributions, ...). Ops accept an
/// optional pointer; a null sink discards messages.
struct warning_log {
  std::vector<std::string> messages;
  void add(std::string msg) { messages.push_back(std::move(msg)); }
  std::size_t count() const { return messages.size(); }
};

inline void warn(warning_log* log, std::string msg) {
  if (log) log->add(std::move(msg));
}

/// Fixed-decimal formatting with round-half-even ties, used by every CSV
/// emitter so that artifact bytes are stable across runs and platforms.
inline std::string format_fixed(double v, int places = 4) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  double scale = std::pow(10.0, places);
  double scaled = v * scale;
  if (std::fabs(scaled) >= 9.0e15) {  // out of exact integer range; fall back
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", places, v);
    return buf;
  }
  // nearbyint under the default rounding mode resolves ties to even
  long long r = static_cast<long long>(std::nearbyint(scaled));
  bool neg = r < 0;
  unsigned long long mag = neg ? -static_cast<unsigned long long>(r) : r;
  unsigned long long p = static_cast<unsigned long long>(scale);
  std::string frac = std::to_string(mag % p);
  frac.insert(0, static_cast<std::size_t>(places) - frac.size(), '0');
  std::string out = neg ? "-" : "";
  out += std::to_string(mag / p);
  if (places > 0) {
    out += '.';
    out += frac;
  }
  return out;
}

/// Index-space parallel loop. Work item i is fully determined by i, so the
/// schedule cannot affect results; callers rely on that for the determinism
/// contract on --threads.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::size_t nthreads = std::min<std::size_t>(threads, n);
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  for (std::size_t t = 0; t < nthreads; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < n; i += nthreads) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline std::string join_csv(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += fields[i];
  }
  return out;
}

}  // namespace ria
