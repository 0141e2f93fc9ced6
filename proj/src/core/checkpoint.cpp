#include "core/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

#include "core/error.hpp"
#include "core/io_util.hpp"

namespace evatt {

namespace {

constexpr char kMagic[8] = {'E', 'V', 'A', 'T', 'T', 'C', 'K', 'P'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& in, const std::string& path) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) fail(ErrorKind::Parse, path + ": truncated checkpoint");
  return static_cast<std::uint32_t>(b[0]) |
         (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_f32(std::ostream& out, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  put_u32(out, bits);
}

void put_string(std::ostream& out, const std::string& s) {
  put_u32(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_string(std::istream& in, const std::string& path) {
  const std::uint32_t len = get_u32(in, path);
  if (len > (1u << 24)) fail(ErrorKind::Parse, path + ": absurd string size");
  std::string s(len, '\0');
  in.read(s.data(), len);
  if (!in) fail(ErrorKind::Parse, path + ": truncated checkpoint");
  return s;
}

void write_manifest(const Checkpoint& ckpt, const std::string& path) {
  AtomicFile file(path + ".manifest.txt");
  auto& out = file.stream();
  out << "format: evatt-checkpoint v" << kVersion << "\n";
  out << "kind: " << ckpt.kind << "\n";
  std::int64_t total = 0;
  for (const auto& [name, t] : ckpt.tensors) total += t.numel();
  out << "tensors: " << ckpt.tensors.size() << "\n";
  out << "weights: " << total << "\n";
  for (const auto& [name, t] : ckpt.tensors)
    out << "  " << name << " " << shape_string(t) << "\n";
  if (!ckpt.meta.empty()) {
    out << "meta:\n";
    for (const auto& [k, v] : ckpt.meta) out << "  " << k << "=" << v << "\n";
  }
  file.commit();
}

}  // namespace

const Tensor& Checkpoint::tensor(const std::string& name) const {
  for (const auto& [n, t] : tensors)
    if (n == name) return t;
  fail(ErrorKind::Config, "checkpoint has no tensor '" + name + "'");
}

std::string Checkpoint::meta_value(const std::string& key) const {
  for (const auto& [k, v] : meta)
    if (k == key) return v;
  fail(ErrorKind::Config, "checkpoint has no meta key '" + key + "'");
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  AtomicFile file(path, true);
  auto& out = file.stream();
  out.write(kMagic, 8);
  put_u32(out, kVersion);
  put_string(out, ckpt.kind);
  std::string meta;
  for (const auto& [k, v] : ckpt.meta) meta += k + "=" + v + "\n";
  put_string(out, meta);
  put_u32(out, static_cast<std::uint32_t>(ckpt.tensors.size()));
  for (const auto& [name, t] : ckpt.tensors) {
    put_string(out, name);
    put_u32(out, static_cast<std::uint32_t>(t.ndim()));
    for (int d : t.shape) put_u32(out, static_cast<std::uint32_t>(d));
    for (double v : t.data) put_f32(out, static_cast<float>(v));
  }
  file.commit();
  write_manifest(ckpt, path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0)
    fail(ErrorKind::Parse, path + ": not a checkpoint file");
  const std::uint32_t version = get_u32(in, path);
  if (version != kVersion)
    fail(ErrorKind::Parse,
         path + ": unsupported checkpoint version " + std::to_string(version));

  Checkpoint ckpt;
  ckpt.kind = get_string(in, path);
  const std::string meta = get_string(in, path);
  std::size_t pos = 0;
  while (pos < meta.size()) {
    std::size_t eol = meta.find('\n', pos);
    if (eol == std::string::npos) eol = meta.size();
    const std::string line = meta.substr(pos, eol - pos);
    pos = eol + 1;
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      fail(ErrorKind::Parse, path + ": malformed meta line '" + line + "'");
    ckpt.meta.emplace_back(line.substr(0, eq), line.substr(eq + 1));
  }

  const std::uint32_t count = get_u32(in, path);
  for (std::uint32_t i = 0; i < count; ++i) {
    std::string name = get_string(in, path);
    const std::uint32_t ndim = get_u32(in, path);
    if (ndim == 0 || ndim > 8)
      fail(ErrorKind::Parse, path + ": bad tensor rank");
    std::vector<int> shape(ndim);
    for (auto& d : shape) {
      d = static_cast<int>(get_u32(in, path));
      if (d <= 0) fail(ErrorKind::Parse, path + ": bad tensor dim");
    }
    Tensor t(shape);
    for (auto& v : t.data) {
      const std::uint32_t bits = get_u32(in, path);
      float f;
      std::memcpy(&f, &bits, 4);
      v = static_cast<double>(f);
    }
    ckpt.tensors.emplace_back(std::move(name), std::move(t));
  }
  return ckpt;
}

}  // namespace evatt
