#include "anchorrefine/diffnet/checkpoint.h"

#include <bit>
#include <charconv>
#include <fstream>
#include <sstream>

#include "anchorrefine/core/errors.h"
#include "anchorrefine/core/hashing.h"

namespace anchorrefine::diffnet {

namespace {

bool Selected(std::string_view name, const std::vector<std::string>& prefixes) {
  for (const auto& p : prefixes) {
    if (HasPrefix(name, p)) return true;
  }
  return false;
}

void AppendLittleEndian(std::string& out, double v) {
  uint64_t bits = std::bit_cast<uint64_t>(v);
  for (int i = 0; i < 8; ++i) {
    out.push_back(static_cast<char>(bits & 0xff));
    bits >>= 8;
  }
}

double ReadLittleEndian(const char* p) {
  uint64_t bits = 0;
  for (int i = 7; i >= 0; --i) {
    bits = (bits << 8) | static_cast<unsigned char>(p[i]);
  }
  return std::bit_cast<double>(bits);
}

int64_t ParseInt(std::string_view s, const char* what) {
  int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError(std::string("checkpoint: bad ") + what + " '" +
                      std::string(s) + "'");
  }
  return v;
}

std::vector<int64_t> ParseShape(std::string_view s) {
  std::vector<int64_t> shape;
  size_t start = 0;
  while (true) {
    const size_t x = s.find('x', start);
    shape.push_back(ParseInt(s.substr(start, x - start), "shape"));
    if (x == std::string_view::npos) break;
    start = x + 1;
  }
  return shape;
}

}  // namespace

std::string SerializeCheckpoint(const ParamStore& params,
                                const std::vector<std::string>& prefixes,
                                uint64_t config_hash) {
  std::string header;
  std::string blob;
  header += kCheckpointMagic;
  header += '\n';
  header += std::to_string(kCheckpointVersion) + "\n";
  header += HashToHex(config_hash) + "\n";
  for (const auto& [name, t] : params) {
    if (!Selected(name, prefixes)) continue;
    const int64_t offset = static_cast<int64_t>(blob.size());
    for (int64_t i = 0; i < t.size(); ++i) AppendLittleEndian(blob, t.value[i]);
    header += name + " " + ShapeToString(t.shape) + " " +
              std::to_string(offset) + " " +
              std::to_string(static_cast<int64_t>(blob.size()) - offset) +
              "\n";
  }
  header += kCheckpointSeparator;
  header += '\n';
  return header + blob;
}

void SaveCheckpoint(const std::string& path, const ParamStore& params,
                    const std::vector<std::string>& prefixes,
                    uint64_t config_hash) {
  const std::string bytes = SerializeCheckpoint(params, prefixes, config_hash);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write checkpoint " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ConfigError("failed writing checkpoint " + path);
}

Checkpoint ParseCheckpoint(std::string_view bytes) {
  Checkpoint ckpt;
  size_t pos = 0;
  auto next_line = [&]() -> std::string_view {
    const size_t nl = bytes.find('\n', pos);
    if (nl == std::string_view::npos) {
      throw ConfigError("checkpoint: truncated manifest");
    }
    std::string_view line = bytes.substr(pos, nl - pos);
    pos = nl + 1;
    return line;
  };

  if (next_line() != kCheckpointMagic) {
    throw ConfigError("checkpoint: bad magic");
  }
  ckpt.version = static_cast<int>(ParseInt(next_line(), "version"));
  if (ckpt.version != kCheckpointVersion) {
    throw ConfigError("checkpoint: unsupported version " +
                      std::to_string(ckpt.version));
  }
  try {
    ckpt.config_hash = HexToHash(next_line());
  } catch (const ContractViolation&) {
    throw ConfigError("checkpoint: bad config hash");
  }
  for (std::string_view line = next_line(); line != kCheckpointSeparator;
       line = next_line()) {
    std::vector<std::string_view> fields;
    size_t start = 0;
    while (start <= line.size()) {
      const size_t sp = line.find(' ', start);
      fields.push_back(line.substr(start, sp - start));
      if (sp == std::string_view::npos) break;
      start = sp + 1;
    }
    if (fields.size() != 4) throw ConfigError("checkpoint: bad manifest line");
    CheckpointEntry e;
    e.name = std::string(fields[0]);
    e.shape = ParseShape(fields[1]);
    e.offset = ParseInt(fields[2], "offset");
    e.length = ParseInt(fields[3], "length");
    ckpt.manifest.push_back(std::move(e));
  }

  const std::string_view blob = bytes.substr(pos);
  for (const CheckpointEntry& e : ckpt.manifest) {
    int64_t n = 1;
    for (int64_t d : e.shape) n *= d;
    if (e.length != n * 8 || e.offset < 0 ||
        e.offset + e.length > static_cast<int64_t>(blob.size())) {
      throw ConfigError("checkpoint: inconsistent extent for " + e.name);
    }
    Tensor& t = ckpt.params.Add(e.name, e.shape);
    for (int64_t i = 0; i < n; ++i) {
      t.value[i] = ReadLittleEndian(blob.data() + e.offset + 8 * i);
    }
  }
  return ckpt;
}

Checkpoint ReadCheckpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open checkpoint " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ParseCheckpoint(ss.str());
}

void LoadCheckpoint(const Checkpoint& ckpt, ParamStore& into,
                    const std::vector<std::string>& required_prefixes,
                    std::optional<uint64_t> expected_hash) {
  if (expected_hash && *expected_hash != ckpt.config_hash) {
    throw ConfigError("checkpoint config hash " + HashToHex(ckpt.config_hash) +
                      " does not match expected " + HashToHex(*expected_hash));
  }
  for (const auto& [name, t] : ckpt.params) {
    if (!into.Contains(name)) {
      throw ConfigError("checkpoint has unexpected parameter " + name);
    }
    Tensor& dst = into.At(name);
    if (dst.shape != t.shape) {
      throw ConfigError("checkpoint shape mismatch for " + name + ": " +
                        ShapeToString(t.shape) + " vs expected " +
                        ShapeToString(dst.shape));
    }
  }
  for (const auto& [name, t] : into) {
    if (Selected(name, required_prefixes) && !ckpt.params.Contains(name)) {
      throw ConfigError("checkpoint is missing parameter " + name);
    }
  }
  into.CopyValuesFrom(ckpt.params, "");
}

}  // namespace anchorrefine::diffnet
