#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

namespace trialrank {

// Versioned little-endian binary container shared by FeatureMatrix, the
// PCA/LDA models and the factor model. Layout: magic "TRNK", format
// version, artifact-type tag, then type-specific sections.
inline constexpr std::uint32_t kContainerMagic = 0x4b4e5254;  // "TRNK"
inline constexpr std::uint32_t kContainerVersion = 1;

class BinaryWriter {
 public:
  explicit BinaryWriter(std::ostream& os) : os_(os) {}

  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void i64(std::int64_t v);
  void f64(double v);
  void str(const std::string& s);
  void f64_array(const double* data, std::size_t n);
  void u32_array(const std::uint32_t* data, std::size_t n);
  void header(const std::string& artifact_type);

 private:
  std::ostream& os_;
};

class BinaryReader {
 public:
  explicit BinaryReader(std::istream& is, std::string source = "")
      : is_(is), source_(std::move(source)) {}

  std::uint32_t u32();
  std::uint64_t u64();
  std::int64_t i64();
  double f64();
  std::string str();
  std::vector<double> f64_array();
  std::vector<std::uint32_t> u32_array();
  // Validates magic/version and the expected artifact type; throws on
  // mismatch naming the file.
  void header(const std::string& expected_type);

 private:
  void need(std::size_t n);
  std::istream& is_;
  std::string source_;
};

// Writes to <path>.tmp then renames, so a failed run never leaves a
// partial artifact at the final path.
void atomic_write(const std::filesystem::path& path,
                  const std::function<void(std::ostream&)>& fn);

void atomic_write_text(const std::filesystem::path& path,
                       const std::string& content);

std::string read_text(const std::filesystem::path& path);

}  // namespace trialrank
