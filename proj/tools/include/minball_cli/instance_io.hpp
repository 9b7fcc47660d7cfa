#pragma once

#include "minball/types.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace minball::cli {

inline constexpr int kSchemaVersion = 1;

struct Metadata {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> generator;
  std::optional<std::string> name;
};

struct InstanceFile {
  Instance instance;
  std::optional<Metadata> metadata;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

// Doubles are written in shortest round-trip form, so parse(serialize(f))
// reproduces every finite value bit for bit.
std::string serialize_instance(const InstanceFile& file);
InstanceFile parse_instance(const std::string& text);

InstanceFile read_instance_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

// splitmix64, the generator every instance is drawn from.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Top 53 bits scaled into [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

enum class Distribution { uniform, sphere };

Distribution parse_distribution(const std::string& name);
const char* to_string(Distribution d);

struct GenerateOptions {
  int n = 2;
  int m = 3;
  double radius_max = 0.0;
  std::uint64_t seed = 1;
  Distribution distribution = Distribution::uniform;
};

// Centers uniform in [−1,1]^n (or on the unit sphere), radii uniform in
// [0, radius_max]; a ball that would contain or sit inside an earlier one
// is redrawn.  More than 1000 redraws raise Error.
InstanceFile generate(const GenerateOptions& opt);

}  // namespace minball::cli
