// Runtime support for fixture programs: marker-prefixed logging on stderr,
// located exceptions printed as a stack trace, and a tiny test driver.
#pragma once

#include <cstdio>
#include <exception>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace rlog {
namespace detail {

inline void put(std::string& out, const std::string& v) { out += v; }
inline void put(std::string& out, const char* v) { out += v ? v : "(null)"; }
inline void put(std::string& out, char c) { out += c; }
inline void put(std::string& out, bool b) { out += b ? "true" : "false"; }

template <class T>
std::enable_if_t<std::is_integral_v<T>> put(std::string& out, T v) {
  out += std::to_string(v);
}

template <class T>
std::enable_if_t<std::is_floating_point_v<T>> put(std::string& out, T v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", static_cast<double>(v));
  out += buf;
}

template <class T>
void put(std::string& out, const std::vector<T>& v) {
  out += '[';
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    put(out, v[i]);
  }
  out += ']';
}

template <class T>
void put(std::string& out, const T* p) {
  out += p ? "<ptr>" : "null";
}

inline void format_into(std::string& out, const char* fmt) { out += fmt; }

template <class T, class... Rest>
void format_into(std::string& out, const char* fmt, const T& first, const Rest&... rest) {
  for (const char* p = fmt; *p; ++p) {
    if (p[0] == '{' && p[1] == '}') {
      put(out, first);
      format_into(out, p + 2, rest...);
      return;
    }
    out += *p;
  }
}

template <class... Args>
void emit(const char* level, const char* fmt, const Args&... args) {
  std::string msg;
  format_into(msg, fmt, args...);
  std::fprintf(stderr, "@@RELOG %s %s\n", level, msg.c_str());
  std::fflush(stderr);
}

}  // namespace detail

template <class... A> void trace(const char* f, const A&... a) { detail::emit("TRACE", f, a...); }
template <class... A> void debug(const char* f, const A&... a) { detail::emit("DEBUG", f, a...); }
template <class... A> void info(const char* f, const A&... a) { detail::emit("INFO", f, a...); }
template <class... A> void warn(const char* f, const A&... a) { detail::emit("WARN", f, a...); }
template <class... A> void error(const char* f, const A&... a) { detail::emit("ERROR", f, a...); }

}  // namespace rlog

namespace rt {

struct where {
  const char* type;
  const char* file;
  int line;
  const char* func;
};

template <class E>
struct located : E, where {
  located(const std::string& msg, where w) : E(msg), where(w) {}
};

#define RT_THROW(Type, msg) throw ::rt::located<Type>((msg), ::rt::where{#Type, __FILE__, __LINE__, __func__})

struct check_failed {
  std::string detail;
};

template <class A, class B>
void check_eq(const A& actual, const B& expected, const char* expr, const char* file, int line) {
  if (actual == expected) return;
  std::string d = std::string(expr) + " expected ";
  rlog::detail::put(d, expected);
  d += " got ";
  rlog::detail::put(d, actual);
  d += " (" + std::string(file) + ":" + std::to_string(line) + ")";
  throw check_failed{d};
}

#define RT_CHECK_EQ(actual, expected) ::rt::check_eq((actual), (expected), #actual, __FILE__, __LINE__)

inline int report(const std::exception& e) {
  if (auto w = dynamic_cast<const where*>(&e)) {
    std::fprintf(stderr, "Exception in thread \"main\" %s: %s\n\tat %s(%s:%d)\n", w->type, e.what(), w->func, w->file,
                 w->line);
  } else {
    std::fprintf(stderr, "Exception in thread \"main\" std::exception: %s\n", e.what());
  }
  return 1;
}

struct test_case {
  const char* name;
  void (*fn)();
};

inline int run(const std::vector<test_case>& tests, int argc, char** argv) {
  int failures = 0;
  for (const auto& t : tests) {
    bool selected = argc <= 1;
    for (int i = 1; i < argc; ++i) selected = selected || std::string(argv[i]) == t.name;
    if (!selected) continue;
    try {
      t.fn();
      std::printf("PASS %s\n", t.name);
    } catch (const check_failed& f) {
      std::printf("FAIL %s: %s\n", t.name, f.detail.c_str());
      ++failures;
    } catch (const std::exception& e) {
      std::fflush(stdout);
      return report(e);
    }
  }
  std::fflush(stdout);
  return failures ? 1 : 0;
}

}  // namespace rt
