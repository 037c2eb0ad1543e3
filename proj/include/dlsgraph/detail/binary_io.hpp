#pragma once

#include <bit>
#include <cstdint>
#include <deque>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "dlsgraph/error.hpp"

namespace dlsgraph::detail {

static_assert(std::endian::native == std::endian::little,
              "persist format is little-endian; big-endian hosts need byte swapping");

class BinaryWriter {
 public:
  explicit BinaryWriter(std::ostream& os) : os_(os) {}

  template <class T>
    requires std::is_trivially_copyable_v<T>
  void pod(const T& value) {
    os_.write(reinterpret_cast<const char*>(&value), sizeof(T));
  }

  template <class T>
  void vec(const std::vector<T>& values) {
    pod<std::uint64_t>(values.size());
    if (!values.empty()) {
      os_.write(reinterpret_cast<const char*>(values.data()),
                static_cast<std::streamsize>(values.size() * sizeof(T)));
    }
  }

  template <class T>
  void deque(const std::deque<T>& values) {
    pod<std::uint64_t>(values.size());
    for (const T& v : values) pod(v);
  }

  void str(std::string_view s) {
    pod<std::uint64_t>(s.size());
    os_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }

  bool ok() const { return static_cast<bool>(os_); }

 private:
  std::ostream& os_;
};

class BinaryReader {
 public:
  explicit BinaryReader(std::istream& is) : is_(is) {}

  template <class T>
    requires std::is_trivially_copyable_v<T>
  T pod() {
    T value{};
    is_.read(reinterpret_cast<char*>(&value), sizeof(T));
    check();
    return value;
  }

  std::uint64_t length(std::uint64_t limit = kMaxLength) {
    auto n = pod<std::uint64_t>();
    if (n > limit) throw Error("persist: implausible length " + std::to_string(n));
    return n;
  }

  template <class T>
  std::vector<T> vec() {
    std::vector<T> values(length());
    if (!values.empty()) {
      is_.read(reinterpret_cast<char*>(values.data()),
               static_cast<std::streamsize>(values.size() * sizeof(T)));
      check();
    }
    return values;
  }

  template <class T>
  std::deque<T> deque() {
    std::deque<T> values;
    for (auto n = length(); n > 0; --n) values.push_back(pod<T>());
    return values;
  }

  std::string str() {
    std::string s(length(), '\0');
    if (!s.empty()) {
      is_.read(s.data(), static_cast<std::streamsize>(s.size()));
      check();
    }
    return s;
  }

 private:
  static constexpr std::uint64_t kMaxLength = std::uint64_t{1} << 34;

  void check() {
    if (!is_) throw Error("persist: truncated input");
  }

  std::istream& is_;
};

}  // namespace dlsgraph::detail
