#include "expectigrad/idx.hpp"

#include <algorithm>
#include <fstream>

namespace expectigrad {

IdxData load_idx(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IdxError(IdxErrorKind::Io, "cannot open '" + path + "'");

  unsigned char magic[4];
  if (!in.read(reinterpret_cast<char*>(magic), 4))
    throw IdxError(IdxErrorKind::SizeMismatch, "'" + path + "': file shorter than the 4-byte magic");
  if (magic[0] != 0 || magic[1] != 0)
    throw IdxError(IdxErrorKind::BadMagic,
                   "'" + path + "': first two magic bytes must be zero");
  if (magic[2] != 0x08)
    throw IdxError(IdxErrorKind::UnsupportedType,
                   "'" + path + "': only unsigned-byte data (type 0x08) is supported");
  const unsigned ndims = magic[3];
  if (ndims != 1 && ndims != 3)
    throw IdxError(IdxErrorKind::UnsupportedType,
                   "'" + path + "': expected 1 (labels) or 3 (images) dimensions, got " +
                       std::to_string(ndims));

  IdxData out;
  out.dims.resize(ndims);
  std::uint64_t total = 1;
  for (unsigned d = 0; d < ndims; ++d) {
    unsigned char be[4];
    if (!in.read(reinterpret_cast<char*>(be), 4))
      throw IdxError(IdxErrorKind::SizeMismatch, "'" + path + "': truncated dimension header");
    out.dims[d] = (std::uint32_t(be[0]) << 24) | (std::uint32_t(be[1]) << 16) |
                  (std::uint32_t(be[2]) << 8) | std::uint32_t(be[3]);
    total *= out.dims[d];
    if (total > (std::uint64_t(1) << 40))  // 1 TiB of ubyte payload: clearly bogus
      throw IdxError(IdxErrorKind::Overflow, "'" + path + "': dimension product overflows");
  }

  out.data.resize(static_cast<std::size_t>(total));
  in.read(reinterpret_cast<char*>(out.data.data()),
          static_cast<std::streamsize>(total));
  const std::uint64_t got = static_cast<std::uint64_t>(in.gcount());
  if (got != total)
    throw IdxError(IdxErrorKind::SizeMismatch,
                   "'" + path + "': expected " + std::to_string(total) +
                       " payload bytes, got " + std::to_string(got));
  // Trailing garbage would silently corrupt a later reader's offsets; reject it.
  in.peek();
  if (!in.eof())
    throw IdxError(IdxErrorKind::SizeMismatch,
                   "'" + path + "': trailing bytes after the promised payload");
  return out;
}

Dataset mnist_dataset(const std::string& images_path, const std::string& labels_path) {
  const IdxData images = load_idx(images_path);
  const IdxData labels = load_idx(labels_path);
  if (images.dims.size() != 3)
    throw IdxError(IdxErrorKind::UnsupportedType,
                   "'" + images_path + "': images file must have 3 dimensions");
  if (labels.dims.size() != 1)
    throw IdxError(IdxErrorKind::UnsupportedType,
                   "'" + labels_path + "': labels file must have 1 dimension");
  if (images.dims[0] != labels.dims[0])
    throw IdxError(IdxErrorKind::SizeMismatch,
                   "image count " + std::to_string(images.dims[0]) +
                       " does not match label count " + std::to_string(labels.dims[0]));

  Dataset data;
  data.rows = images.dims[0];
  data.cols = static_cast<std::size_t>(images.dims[1]) * images.dims[2];
  data.inputs.resize(data.rows * data.cols);
  for (std::size_t i = 0; i < data.inputs.size(); ++i)
    data.inputs[i] = static_cast<double>(images.data[i]) / 255.0;
  data.labels.resize(data.rows);
  std::int32_t max_label = 0;
  for (std::size_t i = 0; i < data.rows; ++i) {
    data.labels[i] = static_cast<std::int32_t>(labels.data[i]);
    max_label = std::max(max_label, data.labels[i]);
  }
  data.classes = static_cast<std::size_t>(max_label) + 1;
  return data;
}

}  // namespace expectigrad
