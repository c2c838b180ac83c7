#pragma once

#include <functional>
#include <iostream>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

namespace mll::log {

using Sink = std::function<void(std::string_view)>;

namespace detail {
inline std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}
inline Sink& sink() {
  static Sink s = [](std::string_view msg) { std::cerr << "warning: " << msg << '\n'; };
  return s;
}
}  // namespace detail

/// Replaces the warning sink and returns the previous one.
inline Sink set_warning_sink(Sink sink) {
  std::lock_guard lock(detail::sink_mutex());
  Sink old = std::move(detail::sink());
  detail::sink() = std::move(sink);
  return old;
}

inline void warn(std::string_view message) {
  std::lock_guard lock(detail::sink_mutex());
  if (detail::sink()) detail::sink()(message);
}

/// Captures warnings for the lifetime of the object (tests use this).
class ScopedCapture {
 public:
  ScopedCapture() {
    previous_ = set_warning_sink([this](std::string_view m) { messages_.emplace_back(m); });
  }
  ~ScopedCapture() { set_warning_sink(std::move(previous_)); }
  ScopedCapture(const ScopedCapture&) = delete;
  ScopedCapture& operator=(const ScopedCapture&) = delete;

  const std::vector<std::string>& messages() const { return messages_; }

 private:
  Sink previous_;
  std::vector<std::string> messages_;
};

}  // namespace mll::log
