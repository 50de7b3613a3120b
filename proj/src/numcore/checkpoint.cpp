#include "tag/numcore/checkpoint.hpp"

#include <bit>
#include <fstream>
#include <istream>
#include <ostream>

#include "tag/error.hpp"

namespace tag {

namespace {

template <class U>
void put_le(std::ostream& out, U value) {
  unsigned char bytes[sizeof(U)];
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    bytes[i] = static_cast<unsigned char>(value >> (8 * i));
  }
  out.write(reinterpret_cast<const char*>(bytes), sizeof(U));
}

template <class U>
U get_le(std::istream& in) {
  unsigned char bytes[sizeof(U)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(U))) {
    throw ValidationError("checkpoint: unexpected end of file");
  }
  U value = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) value |= static_cast<U>(bytes[i]) << (8 * i);
  return value;
}

}  // namespace

void write_checkpoint(std::ostream& out, const ParamStore& store) {
  put_le<std::uint32_t>(out, kCheckpointFormatVersion);
  put_le<std::uint64_t>(out, store.size());
  for (const auto& [name, t] : store.entries()) {
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(t.rank()));
    for (std::size_t d : t.shape()) put_le<std::uint64_t>(out, d);
    for (double v : t.values()) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
  }
  if (!out) throw Error("checkpoint: write failed");
}

ParamStore read_checkpoint(std::istream& in) {
  const auto version = get_le<std::uint32_t>(in);
  if (version != kCheckpointFormatVersion) {
    throw ValidationError("checkpoint: unsupported format version " + std::to_string(version));
  }
  const auto count = get_le<std::uint64_t>(in);
  ParamStore store;
  for (std::uint64_t p = 0; p < count; ++p) {
    const auto len = get_le<std::uint32_t>(in);
    if (len > (1u << 16)) throw ValidationError("checkpoint: implausible name length");
    std::string name(len, '\0');
    if (!in.read(name.data(), len)) throw ValidationError("checkpoint: truncated name");
    const auto rank = get_le<std::uint32_t>(in);
    if (rank == 0 || rank > 8) throw ValidationError("checkpoint: bad rank for " + name);
    Shape shape(rank);
    for (auto& d : shape) d = static_cast<std::size_t>(get_le<std::uint64_t>(in));
    std::vector<double> values(shape_size(shape));
    for (double& v : values) v = std::bit_cast<double>(get_le<std::uint64_t>(in));
    store.add(name, Tensor(shape, std::move(values)));
  }
  return store;
}

void save_checkpoint(const std::string& path, const ParamStore& store) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open checkpoint for writing: " + path);
  write_checkpoint(out, store);
}

ParamStore load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open checkpoint: " + path);
  return read_checkpoint(in);
}

void assign_parameters(ParamStore& target, const ParamStore& source) {
  if (target.size() != source.size()) {
    throw ValidationError("checkpoint has " + std::to_string(source.size()) +
                          " parameters, model expects " + std::to_string(target.size()));
  }
  for (auto& [name, t] : target.entries()) {
    if (!source.contains(name)) throw ValidationError("checkpoint lacks parameter " + name);
    const Tensor& s = source.get(name);
    if (s.shape() != t.shape()) {
      throw ValidationError("checkpoint shape mismatch for " + name + ": " +
                            shape_string(s.shape()) + " vs " + shape_string(t.shape()));
    }
    t.values() = s.values();
  }
}

}  // namespace tag
