#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "tag/numcore/param_store.hpp"

namespace tag {

inline constexpr std::uint32_t kCheckpointFormatVersion = 1;

// Binary layout, all integers and floats little-endian:
//   u32 format_version, u64 parameter_count,
//   per parameter: u32 name_length, name bytes, u32 rank, u64 dims[rank],
//                  f64 values[product(dims)] (row-major).
void write_checkpoint(std::ostream& out, const ParamStore& store);
ParamStore read_checkpoint(std::istream& in);

void save_checkpoint(const std::string& path, const ParamStore& store);
ParamStore load_checkpoint(const std::string& path);

// Copies values from `source` into `target`; names and shapes must match exactly.
void assign_parameters(ParamStore& target, const ParamStore& source);

}  // namespace tag
