#include "vlsm/nifti.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <memory>

#include "vlsm/error.hpp"

namespace vlsm::nifti {
namespace {

// Byte offsets of the header fields used here.
constexpr std::size_t kOffSizeofHdr = 0;
constexpr std::size_t kOffDim = 40;
constexpr std::size_t kOffDatatype = 70;
constexpr std::size_t kOffBitpix = 72;
constexpr std::size_t kOffPixdim = 76;
constexpr std::size_t kOffVoxOffset = 108;
constexpr std::size_t kOffSclSlope = 112;
constexpr std::size_t kOffSclInter = 116;
constexpr std::size_t kOffXyztUnits = 123;
constexpr std::size_t kOffDescrip = 148;
constexpr std::size_t kOffQformCode = 252;
constexpr std::size_t kOffSformCode = 254;
constexpr std::size_t kOffQuatern = 256;
constexpr std::size_t kOffQoffset = 268;
constexpr std::size_t kOffSrow = 280;
constexpr std::size_t kOffMagic = 344;

constexpr std::array<char, 4> kMagic{'n', '+', '1', '\0'};

template <typename T>
T load_le(const std::uint8_t* p) {
  using U = std::conditional_t<sizeof(T) == 2, std::uint16_t, std::uint32_t>;
  U raw = 0;
  for (std::size_t b = 0; b < sizeof(T); ++b) raw |= static_cast<U>(static_cast<U>(p[b]) << (8 * b));
  return std::bit_cast<T>(raw);
}

template <typename T>
void store_le(std::uint8_t* p, T value) {
  using U = std::conditional_t<sizeof(T) == 2, std::uint16_t, std::uint32_t>;
  const U raw = std::bit_cast<U>(value);
  for (std::size_t b = 0; b < sizeof(T); ++b) p[b] = static_cast<std::uint8_t>(raw >> (8 * b));
}

template <typename T>
void swap_to_host(std::vector<T>& values) {
  if constexpr (std::endian::native == std::endian::big && sizeof(T) > 1) {
    for (auto& v : values) {
      auto bytes = std::bit_cast<std::array<std::uint8_t, sizeof(T)>>(v);
      std::reverse(bytes.begin(), bytes.end());
      v = std::bit_cast<T>(bytes);
    }
  }
}

struct GzCloser {
  void operator()(gzFile f) const {
    if (f != nullptr) gzclose(f);
  }
};
using GzHandle = std::unique_ptr<gzFile_s, GzCloser>;

std::size_t read_fully(gzFile f, void* dst, std::size_t n) {
  std::size_t done = 0;
  auto* out = static_cast<char*>(dst);
  while (done < n) {
    const auto chunk = static_cast<unsigned>(std::min<std::size_t>(n - done, 1u << 30));
    const int got = gzread(f, out + done, chunk);
    if (got <= 0) break;
    done += static_cast<std::size_t>(got);
  }
  return done;
}

std::int16_t bitpix_for(Datatype type) {
  switch (type) {
    case Datatype::kUint8: return 8;
    case Datatype::kInt16: return 16;
    case Datatype::kFloat32: return 32;
  }
  return 0;
}

bool has_gz_extension(const std::filesystem::path& path) { return path.extension() == ".gz"; }

template <typename T>
std::vector<T> read_payload(gzFile f, std::size_t count, const std::string& where) {
  std::vector<T> values(count);
  const std::size_t bytes = count * sizeof(T);
  if (read_fully(f, values.data(), bytes) != bytes) {
    throw InputError(where + ": truncated payload (dim[1..3] require " + std::to_string(bytes) + " data bytes)");
  }
  swap_to_host(values);
  return values;
}

}  // namespace

Datatype Volume::datatype() const {
  switch (data.index()) {
    case 0: return Datatype::kUint8;
    case 1: return Datatype::kInt16;
    default: return Datatype::kFloat32;
  }
}

std::size_t Volume::voxel_count() const {
  return std::visit([](const auto& v) { return v.size(); }, data);
}

std::vector<double> Volume::as_double() const {
  const bool scaled = scl_slope != 0.0f && !(scl_slope == 1.0f && scl_inter == 0.0f);
  return std::visit(
      [&](const auto& v) {
        std::vector<double> out(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
          const auto raw = static_cast<double>(v[i]);
          out[i] = scaled ? raw * scl_slope + scl_inter : raw;
        }
        return out;
      },
      data);
}

BinaryMask Volume::as_mask() const {
  return std::visit(
      [&](const auto& v) {
        std::vector<std::uint8_t> bits(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) bits[i] = v[i] != 0 ? 1 : 0;
        return BinaryMask(geometry, std::move(bits));
      },
      data);
}

Volume read(const std::filesystem::path& path) {
  const std::string where = path.string();
  GzHandle file(gzopen(where.c_str(), "rb"));
  if (!file) throw InputError(where + ": cannot open");

  std::array<std::uint8_t, kHeaderSize> hdr{};
  if (read_fully(file.get(), hdr.data(), hdr.size()) != hdr.size()) {
    throw InputError(where + ": truncated header (sizeof_hdr requires 348 bytes)");
  }
  const auto sizeof_hdr = load_le<std::int32_t>(&hdr[kOffSizeofHdr]);
  if (sizeof_hdr != kHeaderSize) {
    throw InputError(where + ": sizeof_hdr = " + std::to_string(sizeof_hdr) +
                     " (expected 348; big-endian files are not supported)");
  }
  if (std::memcmp(&hdr[kOffMagic], kMagic.data(), kMagic.size()) != 0) {
    throw InputError(where + ": bad magic (expected \"n+1\\0\")");
  }

  std::array<std::int16_t, 8> dim{};
  for (int i = 0; i < 8; ++i) dim[i] = load_le<std::int16_t>(&hdr[kOffDim + 2 * i]);
  if (dim[0] != 3) throw InputError(where + ": dim[0] = " + std::to_string(dim[0]) + " (expected 3)");

  const auto datatype = load_le<std::int16_t>(&hdr[kOffDatatype]);
  if (datatype != 2 && datatype != 4 && datatype != 16) {
    throw InputError(where + ": unsupported datatype " + std::to_string(datatype) +
                     " (supported: 2 uint8, 4 int16, 16 float32)");
  }

  std::array<double, 3> spacing{};
  for (int i = 0; i < 3; ++i) spacing[i] = load_le<float>(&hdr[kOffPixdim + 4 * (i + 1)]);

  Volume volume;
  const auto qform_code = load_le<std::int16_t>(&hdr[kOffQformCode]);
  const auto sform_code = load_le<std::int16_t>(&hdr[kOffSformCode]);
  std::array<double, 3> origin{0.0, 0.0, 0.0};
  if (qform_code > 0) {
    for (int i = 0; i < 3; ++i) origin[i] = load_le<float>(&hdr[kOffQoffset + 4 * i]);
    for (int i = 0; i < 3; ++i) {
      if (load_le<float>(&hdr[kOffQuatern + 4 * i]) != 0.0f) {
        volume.warnings.push_back("qform rotation (quatern_b/c/d) ignored");
        break;
      }
    }
  } else if (sform_code > 0) {
    bool rotated = false;
    for (int row = 0; row < 3; ++row) {
      origin[row] = load_le<float>(&hdr[kOffSrow + 16 * row + 12]);
      for (int col = 0; col < 3; ++col) {
        if (row != col && load_le<float>(&hdr[kOffSrow + 16 * row + 4 * col]) != 0.0f) rotated = true;
      }
    }
    if (rotated) volume.warnings.push_back("sform rotation/shear ignored");
  }
  volume.geometry = VolumeGeometry({dim[1], dim[2], dim[3]}, spacing, origin);

  volume.scl_slope = load_le<float>(&hdr[kOffSclSlope]);
  volume.scl_inter = load_le<float>(&hdr[kOffSclInter]);
  if (volume.scl_slope != 0.0f && !(volume.scl_slope == 1.0f && volume.scl_inter == 0.0f)) {
    volume.warnings.push_back("scl_slope/scl_inter scaling applied to values");
  }

  const float vox_offset = load_le<float>(&hdr[kOffVoxOffset]);
  if (!(vox_offset >= static_cast<float>(kVoxOffset)) || vox_offset != std::floor(vox_offset)) {
    throw InputError(where + ": vox_offset = " + std::to_string(vox_offset) + " (expected integer >= 352)");
  }
  std::vector<std::uint8_t> skip(static_cast<std::size_t>(vox_offset) - kHeaderSize);
  if (read_fully(file.get(), skip.data(), skip.size()) != skip.size()) {
    throw InputError(where + ": truncated payload (file ends before vox_offset)");
  }

  const std::size_t n = volume.geometry.voxel_count();
  switch (datatype) {
    case 2: volume.data = read_payload<std::uint8_t>(file.get(), n, where); break;
    case 4: volume.data = read_payload<std::int16_t>(file.get(), n, where); break;
    default: volume.data = read_payload<float>(file.get(), n, where); break;
  }
  return volume;
}

BinaryMask read_mask(const std::filesystem::path& path) { return read(path).as_mask(); }

void write(const VolumeGeometry& geometry, const VoxelData& data, const std::filesystem::path& path) {
  const std::string where = path.string();
  const std::size_t n = std::visit([](const auto& v) { return v.size(); }, data);
  if (n != geometry.voxel_count()) {
    throw InputError(where + ": " + std::to_string(n) + " values for geometry " + geometry.describe());
  }
  for (int axis = 0; axis < 3; ++axis) {
    if (geometry.dims[axis] > std::numeric_limits<std::int16_t>::max()) {
      throw InputError(where + ": dim[" + std::to_string(axis + 1) + "] = " + std::to_string(geometry.dims[axis]) +
                       " overflows the int16 header field");
    }
  }

  Volume tmp;
  tmp.data = data;
  const Datatype type = tmp.datatype();

  std::array<std::uint8_t, kVoxOffset> hdr{};
  store_le<std::int32_t>(&hdr[kOffSizeofHdr], kHeaderSize);
  const std::array<std::int16_t, 8> dim{3,
                                        static_cast<std::int16_t>(geometry.dims[0]),
                                        static_cast<std::int16_t>(geometry.dims[1]),
                                        static_cast<std::int16_t>(geometry.dims[2]),
                                        1, 1, 1, 1};
  for (int i = 0; i < 8; ++i) store_le<std::int16_t>(&hdr[kOffDim + 2 * i], dim[i]);
  store_le<std::int16_t>(&hdr[kOffDatatype], static_cast<std::int16_t>(type));
  store_le<std::int16_t>(&hdr[kOffBitpix], bitpix_for(type));
  store_le<float>(&hdr[kOffPixdim], 1.0f);  // qfac
  for (int i = 0; i < 3; ++i) store_le<float>(&hdr[kOffPixdim + 4 * (i + 1)], static_cast<float>(geometry.spacing[i]));
  for (int i = 4; i < 8; ++i) store_le<float>(&hdr[kOffPixdim + 4 * i], 1.0f);
  store_le<float>(&hdr[kOffVoxOffset], static_cast<float>(kVoxOffset));
  store_le<float>(&hdr[kOffSclSlope], 1.0f);
  store_le<float>(&hdr[kOffSclInter], 0.0f);
  hdr[kOffXyztUnits] = 2;  // mm
  const char descrip[] = "vlsm";
  std::memcpy(&hdr[kOffDescrip], descrip, sizeof(descrip) - 1);
  store_le<std::int16_t>(&hdr[kOffQformCode], 1);
  store_le<std::int16_t>(&hdr[kOffSformCode], 1);
  for (int i = 0; i < 3; ++i) store_le<float>(&hdr[kOffQoffset + 4 * i], static_cast<float>(geometry.origin[i]));
  for (int row = 0; row < 3; ++row) {
    store_le<float>(&hdr[kOffSrow + 16 * row + 4 * row], static_cast<float>(geometry.spacing[row]));
    store_le<float>(&hdr[kOffSrow + 16 * row + 12], static_cast<float>(geometry.origin[row]));
  }
  std::memcpy(&hdr[kOffMagic], kMagic.data(), kMagic.size());
  // bytes 348..351: extension flag, all zero.

  std::vector<std::uint8_t> payload = std::visit(
      [](const auto& v) {
        using T = typename std::decay_t<decltype(v)>::value_type;
        std::vector<std::uint8_t> bytes(v.size() * sizeof(T));
        if constexpr (sizeof(T) == 1) {
          std::memcpy(bytes.data(), v.data(), bytes.size());
        } else {
          for (std::size_t i = 0; i < v.size(); ++i) store_le<T>(&bytes[i * sizeof(T)], v[i]);
        }
        return bytes;
      },
      data);

  if (has_gz_extension(path)) {
    GzHandle file(gzopen(where.c_str(), "wb"));
    if (!file) throw Error(where + ": cannot open for writing");
    const bool ok = gzwrite(file.get(), hdr.data(), static_cast<unsigned>(hdr.size())) ==
                        static_cast<int>(hdr.size()) &&
                    (payload.empty() || gzwrite(file.get(), payload.data(), static_cast<unsigned>(payload.size())) ==
                                            static_cast<int>(payload.size()));
    if (!ok) throw Error(where + ": write failed");
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(where + ": cannot open for writing");
  out.write(reinterpret_cast<const char*>(hdr.data()), static_cast<std::streamsize>(hdr.size()));
  out.write(reinterpret_cast<const char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
  if (!out) throw Error(where + ": write failed");
}

void write(const BinaryMask& mask, const std::filesystem::path& path) {
  const auto v = mask.voxels();
  write(mask.geometry(), std::vector<std::uint8_t>(v.begin(), v.end()), path);
}

void write_float(const VolumeGeometry& geometry, std::span<const double> values, const std::filesystem::path& path) {
  std::vector<float> data(values.size());
  std::transform(values.begin(), values.end(), data.begin(), [](double v) { return static_cast<float>(v); });
  write(geometry, data, path);
}

void write_int16(const VolumeGeometry& geometry, std::span<const std::int32_t> values,
                 const std::filesystem::path& path) {
  std::vector<std::int16_t> data(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] < std::numeric_limits<std::int16_t>::min() || values[i] > std::numeric_limits<std::int16_t>::max()) {
      throw InputError(path.string() + ": value " + std::to_string(values[i]) + " does not fit int16");
    }
    data[i] = static_cast<std::int16_t>(values[i]);
  }
  write(geometry, data, path);
}

}  // namespace vlsm::nifti
