#pragma once

// NDSL1 model container: a magic line followed by named, typed binary
// records. Doubles are stored as raw IEEE-754 little-endian bytes, so a load
// reproduces every parameter bit for bit. Readers consume records in the
// order they were written and reject any name or type mismatch.

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nordiclid/corpus.hpp"
#include "nordiclid/error.hpp"
#include "nordiclid/math.hpp"

namespace nordiclid {

static_assert(std::endian::native == std::endian::little, "model files assume a little-endian host");

inline constexpr std::string_view kModelMagic = "NDSL1\n";

enum class RecordType : std::uint8_t { kU64 = 1, kF64, kString, kF64Array, kStringList, kMatrix, kU64Array };

class ModelWriter {
 public:
  ModelWriter() : buf_(kModelMagic) {}

  void u64(std::string_view name, std::uint64_t v) {
    header(name, RecordType::kU64);
    raw(v);
  }
  void f64(std::string_view name, double v) {
    header(name, RecordType::kF64);
    raw(v);
  }
  void str(std::string_view name, std::string_view s) {
    header(name, RecordType::kString);
    bytes(s);
  }
  void f64s(std::string_view name, std::span<const double> v) {
    header(name, RecordType::kF64Array);
    doubles(v);
  }
  void u64s(std::string_view name, std::span<const std::uint64_t> v) {
    header(name, RecordType::kU64Array);
    raw(static_cast<std::uint64_t>(v.size()));
    buf_.append(reinterpret_cast<const char*>(v.data()), v.size() * sizeof(std::uint64_t));
  }
  void strings(std::string_view name, std::span<const std::string> v) {
    header(name, RecordType::kStringList);
    raw(static_cast<std::uint64_t>(v.size()));
    for (const auto& s : v) bytes(s);
  }
  void matrix(std::string_view name, const Matrix& m) {
    header(name, RecordType::kMatrix);
    raw(static_cast<std::uint64_t>(m.rows()));
    raw(static_cast<std::uint64_t>(m.cols()));
    buf_.append(reinterpret_cast<const char*>(m.values().data()), m.size() * sizeof(double));
  }

  const std::string& bytes() const { return buf_; }

 private:
  template <class T>
  void raw(T v) {
    buf_.append(reinterpret_cast<const char*>(&v), sizeof(T));
  }
  void bytes(std::string_view s) {
    raw(static_cast<std::uint64_t>(s.size()));
    buf_.append(s);
  }
  void doubles(std::span<const double> v) {
    raw(static_cast<std::uint64_t>(v.size()));
    buf_.append(reinterpret_cast<const char*>(v.data()), v.size() * sizeof(double));
  }
  void header(std::string_view name, RecordType t) {
    buf_.push_back(static_cast<char>(t));
    bytes(name);
  }

  std::string buf_;
};

class ModelReader {
 public:
  explicit ModelReader(std::string data) : buf_(std::move(data)) {
    if (buf_.compare(0, kModelMagic.size(), kModelMagic) != 0) throw ParseError("not an NDSL1 model file");
    pos_ = kModelMagic.size();
  }

  std::uint64_t u64(std::string_view name) {
    expect(name, RecordType::kU64);
    return raw<std::uint64_t>();
  }
  double f64(std::string_view name) {
    expect(name, RecordType::kF64);
    return raw<double>();
  }
  std::string str(std::string_view name) {
    expect(name, RecordType::kString);
    return bytes();
  }
  std::vector<double> f64s(std::string_view name) {
    expect(name, RecordType::kF64Array);
    std::vector<double> v(count(sizeof(double)));
    copy(v.data(), v.size() * sizeof(double));
    return v;
  }
  std::vector<std::uint64_t> u64s(std::string_view name) {
    expect(name, RecordType::kU64Array);
    std::vector<std::uint64_t> v(count(sizeof(std::uint64_t)));
    copy(v.data(), v.size() * sizeof(std::uint64_t));
    return v;
  }
  std::vector<std::string> strings(std::string_view name) {
    expect(name, RecordType::kStringList);
    const auto n = count(sizeof(std::uint64_t));
    std::vector<std::string> v;
    v.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) v.push_back(bytes());
    return v;
  }
  Matrix matrix(std::string_view name) {
    expect(name, RecordType::kMatrix);
    const auto rows = raw<std::uint64_t>();
    const auto cols = raw<std::uint64_t>();
    if (cols != 0 && rows > (buf_.size() - pos_) / sizeof(double) / cols) throw ParseError("model file truncated");
    Matrix m(rows, cols);
    copy(m.values().data(), m.size() * sizeof(double));
    return m;
  }

  bool at_end() const { return pos_ == buf_.size(); }

 private:
  void need(std::size_t n) const {
    if (buf_.size() - pos_ < n) throw ParseError("model file truncated");
  }
  template <class T>
  T raw() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, buf_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  void copy(void* dst, std::size_t n) {
    need(n);
    if (n) std::memcpy(dst, buf_.data() + pos_, n);
    pos_ += n;
  }
  // Element count, validated against the remaining bytes.
  std::uint64_t count(std::size_t min_element_size) {
    const auto n = raw<std::uint64_t>();
    if (n > (buf_.size() - pos_) / min_element_size) throw ParseError("model file truncated");
    return n;
  }
  std::string bytes() {
    const auto n = count(1);
    std::string s(buf_.data() + pos_, n);
    pos_ += n;
    return s;
  }
  void expect(std::string_view name, RecordType t) {
    need(1);
    const auto got = static_cast<RecordType>(buf_[pos_++]);
    const std::string got_name = bytes();
    if (got != t || got_name != name) {
      throw ParseError("model file: expected field '" + std::string(name) + "', found '" + got_name + "'");
    }
  }

  std::string buf_;
  std::size_t pos_ = 0;
};

}  // namespace nordiclid
