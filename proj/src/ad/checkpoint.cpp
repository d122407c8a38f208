#include "uavnav/ad/checkpoint.h"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <map>

#include "uavnav/common/errors.h"

namespace uavnav::ad {
namespace {

static_assert(sizeof(float) == 4, "float32 payload expected");

template <typename T>
void put_le(std::ofstream& out, T value) {
  unsigned char bytes[sizeof(T)];
  std::uint64_t bits = 0;
  if constexpr (std::is_same_v<T, float>) {
    bits = std::bit_cast<std::uint32_t>(value);
  } else {
    bits = static_cast<std::uint64_t>(value);
  }
  for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xFF);
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path) : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw CheckpointError("cannot open checkpoint " + path.string());
  }

  void read_bytes(char* dst, std::size_t n) {
    in_.read(dst, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) throw CheckpointError("truncated checkpoint " + path_.string());
  }

  template <typename T>
  T get_le() {
    unsigned char bytes[sizeof(T)];
    read_bytes(reinterpret_cast<char*>(bytes), sizeof(T));
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
    if constexpr (std::is_same_v<T, float>) {
      return std::bit_cast<float>(static_cast<std::uint32_t>(bits));
    } else {
      return static_cast<T>(bits);
    }
  }

  bool at_end() { return in_.peek() == std::char_traits<char>::eof(); }

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
};

std::uint32_t read_header(Reader& reader) {
  char magic[8];
  reader.read_bytes(magic, sizeof(magic));
  if (std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0) {
    throw CheckpointError("not a tensor checkpoint (bad magic): " + reader.path().string());
  }
  return reader.get_le<std::uint32_t>();
}

}  // namespace

void save_tensors(const std::filesystem::path& path, std::span<const NamedTensor> tensors) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError("cannot write checkpoint " + path.string());
  out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  put_le<std::uint32_t>(out, kCheckpointVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(tensors.size()));
  for (const NamedTensor& t : tensors) {
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(t.name.size()));
    out.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
    const Shape& shape = t.tensor.shape();
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(shape.size()));
    for (const std::size_t d : shape) put_le<std::uint64_t>(out, d);
    for (const float v : t.tensor.values()) put_le<float>(out, v);
  }
  out.flush();
  if (!out) throw CheckpointError("write failed for checkpoint " + path.string());
}

std::vector<StoredTensor> read_tensors(const std::filesystem::path& path) {
  Reader reader(path);
  const std::uint32_t version = read_header(reader);
  if (version != kCheckpointVersion) {
    throw CheckpointError("checkpoint " + path.string() + " has version " + std::to_string(version) +
                          ", expected " + std::to_string(kCheckpointVersion));
  }
  const auto count = reader.get_le<std::uint32_t>();
  std::vector<StoredTensor> tensors;
  for (std::uint32_t k = 0; k < count; ++k) {
    StoredTensor t;
    const auto name_len = reader.get_le<std::uint32_t>();
    if (name_len > 4096) throw CheckpointError("corrupt tensor name in " + path.string());
    t.name.resize(name_len);
    reader.read_bytes(t.name.data(), name_len);
    const auto rank = reader.get_le<std::uint32_t>();
    if (rank > 8) throw CheckpointError("corrupt tensor rank in " + path.string());
    for (std::uint32_t i = 0; i < rank; ++i) t.shape.push_back(static_cast<std::size_t>(reader.get_le<std::uint64_t>()));
    const std::size_t n = shape_numel(t.shape);
    if (n > (std::size_t{1} << 32)) throw CheckpointError("corrupt tensor shape in " + path.string());
    t.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) t.values[i] = reader.get_le<float>();
    tensors.push_back(std::move(t));
  }
  if (!reader.at_end()) throw CheckpointError("trailing bytes in checkpoint " + path.string());
  return tensors;
}

void load_tensors_into(const std::filesystem::path& path, std::span<const NamedTensor> targets) {
  std::map<std::string, StoredTensor> stored;
  for (StoredTensor& t : read_tensors(path)) {
    const std::string name = t.name;
    stored.emplace(name, std::move(t));
  }
  if (stored.size() != targets.size()) {
    throw CheckpointError("checkpoint " + path.string() + " holds " + std::to_string(stored.size()) +
                          " tensors, expected " + std::to_string(targets.size()));
  }
  for (const NamedTensor& target : targets) {
    const auto it = stored.find(target.name);
    if (it == stored.end()) throw CheckpointError("checkpoint " + path.string() + " lacks tensor '" + target.name + "'");
    if (it->second.shape != target.tensor.shape()) {
      throw CheckpointError("tensor '" + target.name + "' has shape " + shape_string(it->second.shape) +
                            " in checkpoint, expected " + shape_string(target.tensor.shape()));
    }
    Tensor dst = target.tensor;
    std::copy(it->second.values.begin(), it->second.values.end(), dst.mutable_values().begin());
  }
}

std::uint32_t read_checkpoint_version(const std::filesystem::path& path) {
  Reader reader(path);
  return read_header(reader);
}

}  // namespace uavnav::ad
