#pragma once

#include <cstdio>
#include <cstdlib>

namespace iwtm::detail {

// Contract violations are programming errors, not recoverable conditions:
// report and abort instead of throwing.  Input validation on the public
// surface (files, feature vectors, configs) throws std exceptions instead.
[[noreturn]] inline void fail(const char* message) {
  std::fputs("iwtm: ", stderr);
  std::fputs(message, stderr);
  std::fputc('\n', stderr);
  std::abort();
}

inline void require(bool condition, const char* message) {
  if (!condition) fail(message);
}

}  // namespace iwtm::detail
