#include "grushin/common.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>

namespace grushin {

namespace {

std::atomic<int> g_override{0};

int env_threads() {
  const char* env = std::getenv("GRUSHIN_THREADS");
  if (env == nullptr || std::string(env).empty() || std::string(env) == "auto") return 0;
  try {
    return std::max(1, std::stoi(env));
  } catch (const std::exception&) {
    return 0;
  }
}

}  // namespace

int thread_budget() {
  if (int o = g_override.load(); o > 0) return o;
  static const int from_env = env_threads();
  if (from_env > 0) return from_env;
  return std::max(1u, std::thread::hardware_concurrency());
}

void set_thread_budget(int threads) { g_override.store(std::max(0, threads)); }

namespace detail {

void run_partitioned(std::size_t n, int threads, void (*body)(void*, std::size_t, std::size_t), void* ctx) {
  const std::size_t t = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
  std::vector<std::thread> pool;
  pool.reserve(t);
  for (std::size_t k = 0; k < t; ++k) {
    const std::size_t lo = n * k / t;
    const std::size_t hi = n * (k + 1) / t;
    pool.emplace_back([=] { body(ctx, lo, hi); });
  }
  for (auto& th : pool) th.join();
}

}  // namespace detail
}  // namespace grushin
