#pragma once

// EEGX subject files. Little-endian layout:
//
//   "EEGX" | version u8 (=1) | C u32 | T u32 | N u32 | id_len u32 | id bytes
//   then N records of: label u8 | C*T float32, channel-major
//
// Samples are float32 on disk and double in memory.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <vector>

#include "tlcsp/eeg_data.hpp"

namespace tlcsp {

inline constexpr char kEegxMagic[4] = {'E', 'E', 'G', 'X'};
inline constexpr std::uint8_t kEegxVersion = 1;
inline constexpr std::size_t kEegxHeaderBytes = 21;  // with an empty subject id

namespace detail {

class ByteWriter {
 public:
  void u8(std::uint8_t v) { bytes_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void raw(const void* data, std::size_t n) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    bytes_.insert(bytes_.end(), p, p + n);
  }
  std::vector<std::uint8_t> take() { return std::move(bytes_); }

 private:
  std::vector<std::uint8_t> bytes_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t offset() const { return pos_; }
  bool at_end() const { return pos_ == bytes_.size(); }

  std::uint8_t u8(const char* what) {
    need(1, what);
    return bytes_[pos_++];
  }
  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  float f32(const char* what) { return std::bit_cast<float>(u32(what)); }
  std::string str(std::size_t n, const char* what) {
    need(n, what);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }

 private:
  void need(std::size_t n, const char* what) {
    if (bytes_.size() - pos_ < n) {
      throw Error(ErrorKind::format, std::string("truncated ") + what + " at byte offset " +
                                         std::to_string(pos_));
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline std::vector<std::uint8_t> encode_subject(const SubjectDataset& dataset) {
  dataset.validate();
  detail::ByteWriter w;
  w.raw(kEegxMagic, 4);
  w.u8(kEegxVersion);
  w.u32(static_cast<std::uint32_t>(dataset.channels()));
  w.u32(static_cast<std::uint32_t>(dataset.samples()));
  w.u32(static_cast<std::uint32_t>(dataset.epochs.size()));
  w.u32(static_cast<std::uint32_t>(dataset.subject_id.size()));
  w.raw(dataset.subject_id.data(), dataset.subject_id.size());
  for (const auto& e : dataset.epochs) {
    w.u8(static_cast<std::uint8_t>(e.label));
    const Matrix& x = e.epoch.data();
    for (Index c = 0; c < x.rows(); ++c) {
      for (Index t = 0; t < x.cols(); ++t) w.f32(static_cast<float>(x(c, t)));
    }
  }
  return w.take();
}

inline SubjectDataset decode_subject(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes);
  const std::string magic = r.str(4, "magic");
  if (std::memcmp(magic.data(), kEegxMagic, 4) != 0) {
    throw Error(ErrorKind::format, "bad magic at byte offset 0");
  }
  const std::size_t version_offset = r.offset();
  const auto version = r.u8("version");
  if (version != kEegxVersion) {
    throw Error(ErrorKind::format, "unsupported version " + std::to_string(version) +
                                       " at byte offset " + std::to_string(version_offset));
  }
  const auto channels = r.u32("channel count");
  const auto samples = r.u32("sample count");
  const auto count = r.u32("epoch count");
  const auto id_len = r.u32("subject id length");
  SubjectDataset dataset;
  dataset.subject_id = r.str(id_len, "subject id");
  if (channels < 2 || samples < 2) {
    throw Error(ErrorKind::format, "epoch shape " + std::to_string(channels) + "x" +
                                       std::to_string(samples) + " below 2x2 in header");
  }
  if (count == 0) throw Error(ErrorKind::format, "file holds no epochs");
  dataset.epochs.reserve(count);
  for (std::uint32_t n = 0; n < count; ++n) {
    const std::size_t label_offset = r.offset();
    const auto raw_label = r.u8("epoch label");
    if (raw_label > 1) {
      throw Error(ErrorKind::label, "label byte " + std::to_string(raw_label) +
                                        " at byte offset " + std::to_string(label_offset));
    }
    Matrix x(channels, samples);
    for (Index c = 0; c < x.rows(); ++c) {
      for (Index t = 0; t < x.cols(); ++t) x(c, t) = static_cast<double>(r.f32("epoch samples"));
    }
    dataset.epochs.push_back({Epoch(std::move(x)), static_cast<Label>(raw_label)});
  }
  if (!r.at_end()) {
    throw Error(ErrorKind::format,
                "trailing bytes after last epoch at byte offset " + std::to_string(r.offset()));
  }
  return dataset;
}

inline SubjectDataset load_subject(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return decode_subject(bytes);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.message());
  }
}

inline void save_subject(const SubjectDataset& dataset, const std::filesystem::path& path) {
  const auto bytes = encode_subject(dataset);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::io, "write failed for " + path.string());
}

/// Every *.eegx file in `dir`, ordered by file name.
inline std::vector<SubjectDataset> load_directory(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw Error(ErrorKind::io, "not a directory: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".eegx") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<SubjectDataset> out;
  out.reserve(files.size());
  for (const auto& f : files) out.push_back(load_subject(f));
  return out;
}

}  // namespace tlcsp
