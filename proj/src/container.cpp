#include "trialrank/container.hpp"

#include <bit>
#include <cstring>
#include <sstream>
#include <stdexcept>

static_assert(std::endian::native == std::endian::little,
              "container format is little-endian; add byte swaps for this target");

namespace trialrank {

void BinaryWriter::u32(std::uint32_t v) {
  os_.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void BinaryWriter::u64(std::uint64_t v) {
  os_.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void BinaryWriter::i64(std::int64_t v) {
  os_.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void BinaryWriter::f64(double v) {
  os_.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void BinaryWriter::str(const std::string& s) {
  u64(s.size());
  os_.write(s.data(), static_cast<std::streamsize>(s.size()));
}
void BinaryWriter::f64_array(const double* data, std::size_t n) {
  u64(n);
  os_.write(reinterpret_cast<const char*>(data),
            static_cast<std::streamsize>(n * sizeof(double)));
}
void BinaryWriter::u32_array(const std::uint32_t* data, std::size_t n) {
  u64(n);
  os_.write(reinterpret_cast<const char*>(data),
            static_cast<std::streamsize>(n * sizeof(std::uint32_t)));
}
void BinaryWriter::header(const std::string& artifact_type) {
  u32(kContainerMagic);
  u32(kContainerVersion);
  str(artifact_type);
}

void BinaryReader::need(std::size_t) {
  if (!is_)
    throw std::runtime_error("truncated artifact file" +
                             (source_.empty() ? "" : ": " + source_));
}
std::uint32_t BinaryReader::u32() {
  std::uint32_t v = 0;
  is_.read(reinterpret_cast<char*>(&v), sizeof(v));
  need(sizeof(v));
  return v;
}
std::uint64_t BinaryReader::u64() {
  std::uint64_t v = 0;
  is_.read(reinterpret_cast<char*>(&v), sizeof(v));
  need(sizeof(v));
  return v;
}
std::int64_t BinaryReader::i64() {
  std::int64_t v = 0;
  is_.read(reinterpret_cast<char*>(&v), sizeof(v));
  need(sizeof(v));
  return v;
}
double BinaryReader::f64() {
  double v = 0;
  is_.read(reinterpret_cast<char*>(&v), sizeof(v));
  need(sizeof(v));
  return v;
}
std::string BinaryReader::str() {
  std::uint64_t n = u64();
  std::string s(n, '\0');
  is_.read(s.data(), static_cast<std::streamsize>(n));
  need(n);
  return s;
}
std::vector<double> BinaryReader::f64_array() {
  std::uint64_t n = u64();
  std::vector<double> v(n);
  is_.read(reinterpret_cast<char*>(v.data()),
           static_cast<std::streamsize>(n * sizeof(double)));
  need(n);
  return v;
}
std::vector<std::uint32_t> BinaryReader::u32_array() {
  std::uint64_t n = u64();
  std::vector<std::uint32_t> v(n);
  is_.read(reinterpret_cast<char*>(v.data()),
           static_cast<std::streamsize>(n * sizeof(std::uint32_t)));
  need(n);
  return v;
}
void BinaryReader::header(const std::string& expected_type) {
  if (u32() != kContainerMagic)
    throw std::runtime_error("not a trialrank artifact" +
                             (source_.empty() ? "" : ": " + source_));
  std::uint32_t ver = u32();
  if (ver != kContainerVersion)
    throw std::runtime_error("unsupported artifact version " +
                             std::to_string(ver) +
                             (source_.empty() ? "" : " in " + source_));
  std::string type = str();
  if (type != expected_type)
    throw std::runtime_error("artifact type mismatch: expected '" +
                             expected_type + "', found '" + type + "'" +
                             (source_.empty() ? "" : " in " + source_));
}

void atomic_write(const std::filesystem::path& path,
                  const std::function<void(std::ostream&)>& fn) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write file: " + tmp.string());
    fn(os);
    os.flush();
    if (!os) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void atomic_write_text(const std::filesystem::path& path,
                       const std::string& content) {
  atomic_write(path, [&](std::ostream& os) { os << content; });
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace trialrank
