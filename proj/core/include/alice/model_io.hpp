#pragma once

// Portable model file:
//   "ALICE" | version u8 | u32 meta count | (str key, str value)* |
//   u32 block count | (str name, u32 rows, u32 cols, f64 values row-major)* |
//   u32 CRC-32 of every preceding byte
// Integers and floats are little-endian; str is a u32 length plus bytes.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "alice/connet.hpp"

namespace alice {

inline constexpr std::uint8_t kModelFormatVersion = 1;

struct ParameterBlock {
  std::string name;
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::vector<double> values;
};

struct ModelFile {
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<ParameterBlock> blocks;

  const std::string* find_meta(const std::string& key) const;
};

std::string serialize(const ModelFile& f);
/// Throws IntegrityError on a bad magic, version, length or checksum.
ModelFile deserialize(const std::string& bytes);

void save_model_file(const std::string& path, const ModelFile& f);
/// Throws InputError when the file cannot be read, IntegrityError when corrupt.
ModelFile load_model_file(const std::string& path);

/// Captures every named parameter of the model.
ModelFile capture(ConNetModel& model, std::vector<std::pair<std::string, std::string>> meta);
/// Copies blocks into the model by name; throws IntegrityError on a missing
/// block or a shape mismatch.
void apply(const ModelFile& f, ConNetModel& model);

}  // namespace alice
