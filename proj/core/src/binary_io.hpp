#pragma once
#include <bit>
#include <cstdint>
#include <fstream>
#include <string>

#include "dmace/complex_matrix.hpp"
#include "dmace/errors.hpp"

// Little-endian record primitives shared by the dataset, matrix, and
// checkpoint file formats. Multi-byte values are emitted byte by byte so the
// encoding is independent of host endianness.
namespace dmace::io {

inline void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 4);
}

inline void put_u64(std::ostream& os, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

inline void put_f64(std::ostream& os, double v) {
  put_u64(os, std::bit_cast<std::uint64_t>(v));
}

inline void put_string(std::ostream& os, const std::string& s) {
  put_u64(os, s.size());
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline void put_cmatrix(std::ostream& os, const ComplexMatrix& m) {
  put_u64(os, m.rows());
  put_u64(os, m.cols());
  for (std::size_t i = 0; i < m.size(); ++i) {
    put_f64(os, m[i].real());
    put_f64(os, m[i].imag());
  }
}

inline std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  if (!is) throw PersistenceError("binary read: truncated u32");
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

inline std::uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  if (!is) throw PersistenceError("binary read: truncated u64");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

inline double get_f64(std::istream& is) {
  return std::bit_cast<double>(get_u64(is));
}

inline std::string get_string(std::istream& is) {
  const std::uint64_t n = get_u64(is);
  if (n > (1ull << 20)) throw PersistenceError("binary read: string too long");
  std::string s(n, '\0');
  is.read(s.data(), static_cast<std::streamsize>(n));
  if (!is) throw PersistenceError("binary read: truncated string");
  return s;
}

inline ComplexMatrix get_cmatrix(std::istream& is) {
  const std::uint64_t rows = get_u64(is);
  const std::uint64_t cols = get_u64(is);
  if (rows > (1ull << 24) || cols > (1ull << 24))
    throw PersistenceError("binary read: implausible matrix shape");
  ComplexMatrix m(rows, cols);
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double re = get_f64(is);
    const double im = get_f64(is);
    m[i] = cplx{re, im};
  }
  return m;
}

inline void expect_magic(std::istream& is, const char (&magic)[5],
                         const char* what) {
  char buf[4];
  is.read(buf, 4);
  if (!is || buf[0] != magic[0] || buf[1] != magic[1] || buf[2] != magic[2] ||
      buf[3] != magic[3])
    throw PersistenceError(std::string(what) + ": bad magic bytes");
}

}  // namespace dmace::io
