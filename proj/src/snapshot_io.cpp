#include "byte_codec.hpp"
#include "pidmd/errors.hpp"
#include "pidmd/io.hpp"

#include <fstream>
#include <sstream>

namespace pidmd {

std::string encode_snapshot(const SnapshotSet& s) {
  s.validate(1);
  ByteWriter out;
  out.raw(kSnapshotMagic);
  out.raw("L");
  out.u64(static_cast<std::uint64_t>(s.states.rows()));
  out.u64(static_cast<std::uint64_t>(s.states.cols()));
  out.f64(s.dt);
  out.u64(static_cast<std::uint64_t>(s.theta.size()));
  for (Index i = 0; i < s.theta.size(); ++i) out.f64(s.theta(i));
  out.u64(s.label.size());
  out.raw(s.label);
  out.doubles(s.states.data(), s.states.size());
  return std::move(out).take();
}

SnapshotSet decode_snapshot(std::string_view bytes) {
  ByteReader in(bytes, "snapshot file");
  in.expect(kSnapshotMagic, "bad magic (not a snapshot file)");
  in.expect("L", "unsupported endianness tag");
  const auto n = in.count();
  const auto cols = in.count();
  SnapshotSet s;
  s.dt = in.f64();
  const auto p = in.count();
  s.theta.resize(p);
  for (Index i = 0; i < p; ++i) s.theta(i) = in.f64();
  s.label = in.str(in.count());
  in.check_remaining(static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(cols) * 8);
  s.states.resize(n, cols);
  in.doubles(s.states.data(), s.states.size());
  in.finish();
  s.validate(1);
  return s;
}

void write_snapshot_file(const std::filesystem::path& path, const SnapshotSet& s) {
  write_file_atomic(path, encode_snapshot(s));
}

SnapshotSet read_snapshot_file(const std::filesystem::path& path) {
  return decode_snapshot(read_file(path));
}

void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::InvalidInput, "cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) fail(ErrorKind::InvalidInput, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) fail(ErrorKind::InvalidInput, "cannot move " + tmp.string() + " into place: " + ec.message());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::InvalidInput, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  static constexpr char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[hash & 0xf];
    hash >>= 4;
  }
  return out;
}

}  // namespace pidmd
