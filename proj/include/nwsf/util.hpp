#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace nwsf {

struct InputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ContractError : std::logic_error {
  using std::logic_error::logic_error;
};

struct SizeCapError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Deterministic 64-bit stream; substreams never perturb the parent state.
inline uint64_t splitmix64_step(uint64_t& s) {
  uint64_t z = (s += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(uint64_t seed = 1) : s_(seed ^ 0xD1B54A32D192ED03ULL) {}

  uint64_t next_u64() { return splitmix64_step(s_); }

  // Uniform in [0, 1) with 53 random bits.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [0, n). Modulo bias is < 2^-32 for the n used here.
  uint64_t next_below(uint64_t n) { return n ? next_u64() % n : 0; }

  long next_in(long lo, long hi) {  // inclusive range
    return lo + static_cast<long>(next_below(static_cast<uint64_t>(hi - lo + 1)));
  }

  Rng substream(uint64_t idx) const {
    uint64_t s = s_ ^ (0xA24BAED4963EE407ULL * (idx + 1));
    splitmix64_step(s);
    return Rng(splitmix64_step(s));
  }

 private:
  uint64_t s_;
};

class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(static_cast<std::size_t>(n)) {
    for (int i = 0; i < n; ++i) parent_[static_cast<std::size_t>(i)] = i;
  }
  int find(int x) {
    while (parent_[static_cast<std::size_t>(x)] != x) {
      parent_[static_cast<std::size_t>(x)] = parent_[static_cast<std::size_t>(parent_[static_cast<std::size_t>(x)])];
      x = parent_[static_cast<std::size_t>(x)];
    }
    return x;
  }
  void unite(int a, int b) { parent_[static_cast<std::size_t>(find(a))] = find(b); }
  bool same(int a, int b) { return find(a) == find(b); }

 private:
  std::vector<int> parent_;
};

// Runs fn(i) for i in [0, n); results may be written into caller-owned slots,
// so output order is independent of the thread count.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                         unsigned threads = 0) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::size_t chunk = (n + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    std::size_t lo = t * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace nwsf
