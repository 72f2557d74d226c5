#pragma once

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <string>

namespace stackyrr {

namespace detail {

inline std::int64_t env_or(const char* name, std::int64_t fallback) {
  const char* raw = std::getenv(name);
  if (raw == nullptr || *raw == '\0') return fallback;
  char* end = nullptr;
  long long v = std::strtoll(raw, &end, 10);
  if (end == raw || *end != '\0' || v <= 0) return fallback;
  return static_cast<std::int64_t>(v);
}

inline std::atomic<std::int64_t>& conductor_cap_slot() {
  static std::atomic<std::int64_t> slot{env_or("STACKYRR_CONDUCTOR_CAP", 1000)};
  return slot;
}

inline std::atomic<std::int64_t>& tuple_cap_slot() {
  static std::atomic<std::int64_t> slot{env_or("STACKYRR_TUPLE_CAP", 100'000'000)};
  return slot;
}

inline std::atomic<std::int64_t>& order_cap_slot() {
  static std::atomic<std::int64_t> slot{10080};
  return slot;
}

}  // namespace detail

// Process-wide resource caps. Defaults may be overridden through the
// STACKYRR_CONDUCTOR_CAP and STACKYRR_TUPLE_CAP environment variables.

inline std::int64_t conductor_cap() { return detail::conductor_cap_slot().load(); }
inline void set_conductor_cap(std::int64_t cap) { detail::conductor_cap_slot().store(cap); }

/// Bounds brute-force tuple enumeration and the size of iterated inertia sets.
inline std::int64_t tuple_cap() { return detail::tuple_cap_slot().load(); }
inline void set_tuple_cap(std::int64_t cap) { detail::tuple_cap_slot().store(cap); }

inline std::int64_t group_order_cap() { return detail::order_cap_slot().load(); }
inline void set_group_order_cap(std::int64_t cap) { detail::order_cap_slot().store(cap); }

/// Restores a cap on scope exit. Handy in tests.
class ScopedTupleCap {
 public:
  explicit ScopedTupleCap(std::int64_t cap) : saved_(tuple_cap()) { set_tuple_cap(cap); }
  ~ScopedTupleCap() { set_tuple_cap(saved_); }
  ScopedTupleCap(const ScopedTupleCap&) = delete;
  ScopedTupleCap& operator=(const ScopedTupleCap&) = delete;

 private:
  std::int64_t saved_;
};

class ScopedConductorCap {
 public:
  explicit ScopedConductorCap(std::int64_t cap) : saved_(conductor_cap()) { set_conductor_cap(cap); }
  ~ScopedConductorCap() { set_conductor_cap(saved_); }
  ScopedConductorCap(const ScopedConductorCap&) = delete;
  ScopedConductorCap& operator=(const ScopedConductorCap&) = delete;

 private:
  std::int64_t saved_;
};

}  // namespace stackyrr
