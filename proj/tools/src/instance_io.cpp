#include "minball_cli/instance_io.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace minball::cli {

using nlohmann::json;

namespace {

int line_of(const std::string& text, std::size_t byte) {
  int line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

[[noreturn]] void fail(const std::string& field, const std::string& why) {
  throw ParseError("instance: field '" + field + "': " + why);
}

double number_at(const json& j, const std::string& field) {
  if (!j.is_number()) fail(field, "expected a number");
  return j.get<double>();
}

}  // namespace

std::string serialize_instance(const InstanceFile& file) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["dim"] = file.instance.dim;
  json balls = json::array();
  for (const Ball& b : file.instance.balls) {
    json c = json::array();
    for (int k = 0; k < b.center.size(); ++k) c.push_back(b.center[k]);
    balls.push_back({{"center", c}, {"radius", b.radius}});
  }
  doc["balls"] = balls;
  if (file.metadata) {
    json meta = json::object();
    if (file.metadata->seed) meta["seed"] = *file.metadata->seed;
    if (file.metadata->generator) meta["generator"] = *file.metadata->generator;
    if (file.metadata->name) meta["name"] = *file.metadata->name;
    doc["metadata"] = meta;
  }
  return doc.dump(2) + "\n";
}

InstanceFile parse_instance(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("instance: syntax error on line " + std::to_string(line_of(text, e.byte)) +
                     ": " + e.what());
  }
  if (!doc.is_object()) fail("<root>", "expected an object");
  if (doc.contains("schema_version")) {
    const json& v = doc["schema_version"];
    if (!v.is_number_integer() || v.get<int>() != kSchemaVersion)
      fail("schema_version", "unsupported version");
  }
  if (!doc.contains("dim")) fail("dim", "missing");
  if (!doc["dim"].is_number_integer() || doc["dim"].get<long>() < 1)
    fail("dim", "expected a positive integer");
  if (!doc.contains("balls") || !doc["balls"].is_array()) fail("balls", "expected an array");

  InstanceFile out;
  out.instance.dim = doc["dim"].get<int>();
  const json& balls = doc["balls"];
  for (std::size_t i = 0; i < balls.size(); ++i) {
    const std::string where = "balls[" + std::to_string(i) + "]";
    const json& b = balls[i];
    if (!b.is_object()) fail(where, "expected an object");
    if (!b.contains("center") || !b["center"].is_array()) fail(where + ".center", "expected an array");
    if (!b.contains("radius")) fail(where + ".radius", "missing");
    const json& c = b["center"];
    if (static_cast<int>(c.size()) != out.instance.dim)
      fail(where + ".center", "length " + std::to_string(c.size()) + " does not match dim");
    Ball ball;
    ball.center.resize(out.instance.dim);
    for (int k = 0; k < out.instance.dim; ++k)
      ball.center[k] = number_at(c[k], where + ".center[" + std::to_string(k) + "]");
    ball.radius = number_at(b["radius"], where + ".radius");
    if (ball.radius < 0.0) fail(where + ".radius", "must be nonnegative");
    out.instance.balls.push_back(std::move(ball));
  }
  if (out.instance.balls.empty()) fail("balls", "needs at least one ball");
  if (doc.contains("metadata") && !doc["metadata"].is_null()) {
    const json& meta = doc["metadata"];
    if (!meta.is_object()) fail("metadata", "expected an object");
    Metadata md;
    if (meta.contains("seed")) {
      if (!meta["seed"].is_number_unsigned()) fail("metadata.seed", "expected an unsigned integer");
      md.seed = meta["seed"].get<std::uint64_t>();
    }
    if (meta.contains("generator")) {
      if (!meta["generator"].is_string()) fail("metadata.generator", "expected a string");
      md.generator = meta["generator"].get<std::string>();
    }
    if (meta.contains("name")) {
      if (!meta["name"].is_string()) fail("metadata.name", "expected a string");
      md.name = meta["name"].get<std::string>();
    }
    out.metadata = md;
  }
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot write '" + path + "'");
  out << text;
  if (!out) throw std::ios_base::failure("write to '" + path + "' failed");
}

InstanceFile read_instance_file(const std::string& path) {
  return parse_instance(read_text_file(path));
}

Distribution parse_distribution(const std::string& name) {
  if (name == "uniform") return Distribution::uniform;
  if (name == "sphere") return Distribution::sphere;
  throw Error("unknown distribution '" + name + "'");
}

const char* to_string(Distribution d) {
  return d == Distribution::uniform ? "uniform" : "sphere";
}

InstanceFile generate(const GenerateOptions& opt) {
  if (opt.n < 1 || opt.m < 1) throw Error("generate: n and m must be positive");
  if (opt.radius_max < 0.0) throw Error("generate: radius_max must be nonnegative");
  SplitMix64 rng(opt.seed);
  InstanceFile file;
  file.instance.dim = opt.n;
  int rejects = 0;
  auto reject = [&] {
    if (++rejects > 1000) throw Error("generate: more than 1000 rejected draws");
  };
  while (static_cast<int>(file.instance.balls.size()) < opt.m) {
    Ball b;
    b.center.resize(opt.n);
    for (int k = 0; k < opt.n; ++k) b.center[k] = 2.0 * rng.uniform() - 1.0;
    if (opt.distribution == Distribution::sphere) {
      const double len = b.center.norm();
      if (len > 1.0 || len < 1e-6) {
        reject();
        continue;
      }
      b.center /= len;
    }
    b.radius = opt.radius_max * rng.uniform();
    bool ok = true;
    for (const Ball& o : file.instance.balls) {
      const double d = (b.center - o.center).norm();
      if (b.radius >= d + o.radius || o.radius >= d + b.radius) {
        ok = false;
        break;
      }
    }
    if (!ok) {
      reject();
      continue;
    }
    file.instance.balls.push_back(std::move(b));
  }
  file.metadata = Metadata{opt.seed, std::string("splitmix64-") + to_string(opt.distribution),
                           std::nullopt};
  return file;
}

}  // namespace minball::cli
