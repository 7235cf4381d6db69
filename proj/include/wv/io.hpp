#pragma once

// Output writers.  CSV gets %.17g floats so reruns can be compared
// byte-for-byte; the field container is a little-endian binary dump with a
// fixed 32-byte header.  Nothing here writes wall-clock times: timing goes
// to stderr only, so output files stay deterministic.

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "wv/errors.hpp"
#include "wv/fields.hpp"

namespace wv {

inline std::string fmt_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return std::string(buf);
}

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw ConfigError("cannot open output file: " + path);
    ncol_ = header.size();
    for (size_t i = 0; i < header.size(); ++i) {
      if (i) out_ << ',';
      out_ << header[i];
    }
    out_ << '\n';
  }

  void row(const std::vector<double>& vals) {
    if (vals.size() != ncol_) throw ConfigError("csv row width mismatch");
    for (size_t i = 0; i < vals.size(); ++i) {
      if (i) out_ << ',';
      out_ << fmt_g17(vals[i]);
    }
    out_ << '\n';
  }

  void row_mixed(const std::vector<std::string>& vals) {
    if (vals.size() != ncol_) throw ConfigError("csv row width mismatch");
    for (size_t i = 0; i < vals.size(); ++i) {
      if (i) out_ << ',';
      out_ << vals[i];
    }
    out_ << '\n';
  }

 private:
  std::ofstream out_;
  size_t ncol_ = 0;
};

// Binary field container
//   bytes 0..7   magic "wvfield1"
//   bytes 8..11  uint32 n       (points per axis)
//   bytes 12..15 uint32 nt      (time frames)
//   bytes 16..23 float64 dt
//   bytes 24..27 uint32 complex flag (0 real, 1 complex)
//   bytes 28..31 uint32 reserved (0)
// then nt frames of n^3 doubles in i,j,k row-major order; complex data is
// interleaved re,im.  Values are little-endian IEEE, written natively.

namespace detail {
constexpr char kFieldMagic[8] = {'w', 'v', 'f', 'i', 'e', 'l', 'd', '1'};

inline void put_u32(std::ofstream& out, uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), 4);
}
inline uint32_t get_u32(std::ifstream& in) {
  uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), 4);
  return v;
}
}  // namespace detail

inline void write_field(const std::string& path, const RSpaceTimeField& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file: " + path);
  out.write(detail::kFieldMagic, 8);
  detail::put_u32(out, static_cast<uint32_t>(f.grid.n));
  detail::put_u32(out, static_cast<uint32_t>(f.grid.nt));
  out.write(reinterpret_cast<const char*>(&f.grid.dt), 8);
  detail::put_u32(out, 0u);
  detail::put_u32(out, 0u);
  for (const auto& frame : f.frames)
    out.write(reinterpret_cast<const char*>(frame.a.data()),
              static_cast<std::streamsize>(frame.a.size() * sizeof(double)));
  if (!out) throw ConfigError("write failed: " + path);
}

inline void write_field(const std::string& path, const CSpaceTimeField& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file: " + path);
  out.write(detail::kFieldMagic, 8);
  detail::put_u32(out, static_cast<uint32_t>(f.grid.n));
  detail::put_u32(out, static_cast<uint32_t>(f.grid.nt));
  out.write(reinterpret_cast<const char*>(&f.grid.dt), 8);
  detail::put_u32(out, 1u);
  detail::put_u32(out, 0u);
  for (const auto& frame : f.frames)
    out.write(reinterpret_cast<const char*>(frame.a.data()),
              static_cast<std::streamsize>(frame.a.size() * sizeof(cplx)));
  if (!out) throw ConfigError("write failed: " + path);
}

struct FieldHeader {
  int n = 0;
  int nt = 0;
  double dt = 0.0;
  bool is_complex = false;
};

inline FieldHeader read_field_header(std::ifstream& in, const std::string& path) {
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, detail::kFieldMagic, 8) != 0)
    throw ConfigError("not a field container: " + path);
  FieldHeader h;
  h.n = static_cast<int>(detail::get_u32(in));
  h.nt = static_cast<int>(detail::get_u32(in));
  in.read(reinterpret_cast<char*>(&h.dt), 8);
  h.is_complex = detail::get_u32(in) != 0;
  detail::get_u32(in);
  if (!in) throw ConfigError("truncated field container: " + path);
  return h;
}

inline RSpaceTimeField read_real_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open field container: " + path);
  FieldHeader h = read_field_header(in, path);
  if (h.is_complex) throw ConfigError("expected real field container: " + path);
  RSpaceTimeField f;
  f.grid = Grid3D(h.n, h.dt, h.dt * (h.nt - 1));
  f.frames.assign(static_cast<size_t>(h.nt), RField3(h.n));
  for (auto& frame : f.frames) {
    in.read(reinterpret_cast<char*>(frame.a.data()),
            static_cast<std::streamsize>(frame.a.size() * sizeof(double)));
    if (!in) throw ConfigError("truncated field container: " + path);
  }
  return f;
}

// Whole-file equality used by rerun determinism checks.
inline bool files_identical(const std::string& a, const std::string& b) {
  std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
  if (!fa || !fb) throw ConfigError("cannot open files for comparison");
  std::vector<char> ba((std::istreambuf_iterator<char>(fa)), std::istreambuf_iterator<char>());
  std::vector<char> bb((std::istreambuf_iterator<char>(fb)), std::istreambuf_iterator<char>());
  return ba == bb;
}

}  // namespace wv
