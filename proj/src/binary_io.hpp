#pragma once

// Internal helpers for the versioned binary files (features, bases).

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "kinship/errors.hpp"

namespace kinship::detail {

inline constexpr std::uint32_t kEndianTag = 0x01020304u;

/// Writes to <path>.tmp and renames on commit(), so readers never observe a
/// partially written file.
class BinaryWriter {
public:
  explicit BinaryWriter(std::filesystem::path path)
      : path_(std::move(path)), tmp_(path_.string() + ".tmp"), out_(tmp_, std::ios::binary) {
    if (!out_) {
      throw DataError("cannot write " + path_.string());
    }
  }

  void magic(std::string_view m) { out_.write(m.data(), static_cast<std::streamsize>(m.size())); }

  template <typename T>
  void put(T v) {
    out_.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }

  template <typename T>
  void put_all(const std::vector<T>& v) {
    out_.write(reinterpret_cast<const char*>(v.data()),
               static_cast<std::streamsize>(v.size() * sizeof(T)));
  }

  void commit() {
    out_.close();
    if (!out_) {
      throw DataError("write failed for " + path_.string());
    }
    std::filesystem::rename(tmp_, path_);
  }

private:
  std::filesystem::path path_;
  std::filesystem::path tmp_;
  std::ofstream out_;
};

class BinaryReader {
public:
  BinaryReader(const std::filesystem::path& path, std::string_view magic) : path_(path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      throw DataError("cannot open " + path.string());
    }
    bytes_.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    if (bytes_.size() < magic.size() ||
        std::string_view(bytes_.data(), magic.size()) != magic) {
      throw DataError(path.string() + ": bad magic, expected '" + std::string(magic) + "'");
    }
    pos_ = magic.size();
    const auto tag = get<std::uint32_t>();
    if (tag == kEndianTag) {
      swap_ = false;
    } else if (byteswap32(tag) == kEndianTag) {
      swap_ = true;
    } else {
      throw DataError(path.string() + ": unrecognized endianness tag");
    }
  }

  template <typename T>
  T get() {
    if (pos_ + sizeof(T) > bytes_.size()) {
      throw DataError(path_.string() + ": file truncated");
    }
    std::array<char, sizeof(T)> raw;
    std::memcpy(raw.data(), bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    if (swap_) {
      std::reverse(raw.begin(), raw.end());
    }
    T v;
    std::memcpy(&v, raw.data(), sizeof(T));
    return v;
  }

  template <typename T>
  std::vector<T> get_all(std::size_t count) {
    if (count > (bytes_.size() - pos_) / sizeof(T)) {
      throw DataError(path_.string() + ": file truncated");
    }
    std::vector<T> v(count);
    for (auto& x : v) {
      x = get<T>();
    }
    return v;
  }

  bool at_end() const { return pos_ == bytes_.size(); }
  const std::filesystem::path& path() const { return path_; }

private:
  static std::uint32_t byteswap32(std::uint32_t v) {
    return ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
  }

  std::filesystem::path path_;
  std::vector<char> bytes_;
  std::size_t pos_ = 0;
  bool swap_ = false;
};

}  // namespace kinship::detail
