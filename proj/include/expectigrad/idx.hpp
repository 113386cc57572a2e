#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "expectigrad/dataset.hpp"

namespace expectigrad {

// IDX is the big-endian binary format of the classic MNIST distribution:
// 4-byte magic (0, 0, type, ndims), then ndims big-endian uint32 dimension
// sizes, then the payload.  Only unsigned-byte data (type 0x08) with 1
// dimension (labels, magic 0x00000801) or 3 dimensions (images, magic
// 0x00000803) is accepted.
enum class IdxErrorKind {
  Io,               // unreadable / missing file
  BadMagic,         // first two bytes nonzero
  UnsupportedType,  // type byte != 0x08 or dimension count not 1 or 3
  Overflow,         // dimension product does not fit in memory bounds
  SizeMismatch,     // payload shorter or longer than the header promises
};

class IdxError : public std::runtime_error {
 public:
  IdxError(IdxErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind(kind) {}
  IdxErrorKind kind;
};

struct IdxData {
  std::vector<std::uint32_t> dims;
  std::vector<std::uint8_t> data;
};

IdxData load_idx(const std::string& path);

// Pairs an images file with a labels file (counts must agree), scales pixels
// to [0, 1], and reports classes = max label + 1.
Dataset mnist_dataset(const std::string& images_path, const std::string& labels_path);

}  // namespace expectigrad
