#include "alice/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <zlib.h>

#include "alice/config.hpp"

namespace alice {

namespace {

constexpr char kMagic[5] = {'A', 'L', 'I', 'C', 'E'};

void put_u32(std::string& out, std::uint32_t x) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((x >> (8 * i)) & 0xFF));
}

void put_f64(std::string& out, double x) {
  const auto bits = std::bit_cast<std::uint64_t>(x);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

void put_str(std::string& out, const std::string& s) {
  put_u32(out, static_cast<std::uint32_t>(s.size()));
  out += s;
}

std::uint32_t crc(const char* data, std::size_t n) {
  return static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(data), static_cast<uInt>(n)));
}

class Reader {
 public:
  Reader(const std::string& bytes, std::size_t end) : bytes_(bytes), end_(end) {}

  std::uint64_t uint(int width) {
    need(static_cast<std::size_t>(width));
    std::uint64_t x = 0;
    for (int i = 0; i < width; ++i) {
      x |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += static_cast<std::size_t>(width);
    return x;
  }
  std::uint32_t u32() { return static_cast<std::uint32_t>(uint(4)); }
  double f64() { return std::bit_cast<double>(uint(8)); }
  std::string str() {
    const std::size_t n = u32();
    need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t remaining() const { return end_ - pos_; }

 private:
  void need(std::size_t n) const {
    if (end_ - pos_ < n) throw IntegrityError("model file is truncated");
  }
  const std::string& bytes_;
  std::size_t end_;
  std::size_t pos_ = 0;
};

}  // namespace

const std::string* ModelFile::find_meta(const std::string& key) const {
  for (const auto& [k, v] : meta) {
    if (k == key) return &v;
  }
  return nullptr;
}

std::string serialize(const ModelFile& f) {
  std::string out(kMagic, sizeof kMagic);
  out.push_back(static_cast<char>(kModelFormatVersion));
  put_u32(out, static_cast<std::uint32_t>(f.meta.size()));
  for (const auto& [k, v] : f.meta) {
    put_str(out, k);
    put_str(out, v);
  }
  put_u32(out, static_cast<std::uint32_t>(f.blocks.size()));
  for (const auto& b : f.blocks) {
    if (b.values.size() != static_cast<std::size_t>(b.rows) * b.cols) {
      throw std::invalid_argument("parameter block " + b.name + " has the wrong value count");
    }
    put_str(out, b.name);
    put_u32(out, b.rows);
    put_u32(out, b.cols);
    for (double x : b.values) put_f64(out, x);
  }
  put_u32(out, crc(out.data(), out.size()));
  return out;
}

ModelFile deserialize(const std::string& bytes) {
  if (bytes.size() < sizeof kMagic + 1 + 4 || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) {
    throw IntegrityError("not a model file (bad magic)");
  }
  const std::size_t body = bytes.size() - 4;
  const std::string stored = bytes.substr(body);
  Reader tail(stored, 4);
  if (tail.u32() != crc(bytes.data(), body)) throw IntegrityError("model file checksum mismatch");
  if (static_cast<std::uint8_t>(bytes[sizeof kMagic]) != kModelFormatVersion) {
    throw IntegrityError("unsupported model file version");
  }

  Reader r(bytes, body);
  r.uint(sizeof kMagic + 1);
  ModelFile f;
  for (std::uint32_t n = r.u32(); n > 0; --n) {
    std::string k = r.str();
    f.meta.emplace_back(std::move(k), r.str());
  }
  for (std::uint32_t n = r.u32(); n > 0; --n) {
    ParameterBlock b;
    b.name = r.str();
    b.rows = r.u32();
    b.cols = r.u32();
    const std::size_t count = static_cast<std::size_t>(b.rows) * b.cols;
    if (count > r.remaining() / 8) throw IntegrityError("model file is truncated");
    b.values.resize(count);
    for (double& x : b.values) x = r.f64();
    f.blocks.push_back(std::move(b));
  }
  if (r.remaining() != 0) throw IntegrityError("trailing bytes in model file");
  return f;
}

void save_model_file(const std::string& path, const ModelFile& f) {
  const std::string bytes = serialize(f);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write model file '" + path + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw InputError("failed writing model file '" + path + "'");
}

ModelFile load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open model file '" + path + "'");
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize(bytes);
}

ModelFile capture(ConNetModel& model, std::vector<std::pair<std::string, std::string>> meta) {
  ModelFile f;
  f.meta = std::move(meta);
  for (const auto& nt : model.named_parameters()) {
    const Matrix& m = nt.tensor->values();
    f.blocks.push_back({nt.name, static_cast<std::uint32_t>(m.rows()),
                        static_cast<std::uint32_t>(m.cols()),
                        std::vector<double>(m.data(), m.data() + m.size())});
  }
  return f;
}

void apply(const ModelFile& f, ConNetModel& model) {
  for (const auto& nt : model.named_parameters()) {
    const ParameterBlock* block = nullptr;
    for (const auto& b : f.blocks) {
      if (b.name == nt.name) block = &b;
    }
    if (block == nullptr) throw IntegrityError("model file lacks parameter " + nt.name);
    Matrix& m = nt.tensor->values();
    if (block->rows != m.rows() || block->cols != m.cols()) {
      throw IntegrityError("parameter " + nt.name + " has shape " + ad::shape_string(block->rows, block->cols) +
                           ", expected " + ad::shape_string(m.rows(), m.cols()));
    }
    std::memcpy(m.data(), block->values.data(), block->values.size() * sizeof(double));
  }
}

}  // namespace alice
