#pragma once

// File formats.
//
// Field snapshot (binary, little-endian):
//   char[8]  "S7FIELD\0"
//   u32      version (1)
//   u32      number of active dimensions d
//   i32[d]   active coordinate indices
//   i32[d]   points per axis
//   f64[d]   torus side per axis
//   u64      basis hash (FNV-1a of the fiber basis)
//   u64      generator seed
//   f64      time
//   f64[7 * sites]  fiber coordinates, sites in row-major order
//
// Tensor interchange (text):
//   spin7-tensor <kind> <count>        kind in {2-form, 3-form, 4-form}
//   <8^rank values, one per line>      dense row-major, components in %.17g
// Lines starting with '#' are ignored. Values may also be hex floats.

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "spin7/fiber.hpp"
#include "spin7/tensor.hpp"

namespace spin7 {

static_assert(std::endian::native == std::endian::little, "snapshot IO assumes a little-endian host");

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Snapshot {
  FiberField field;
  std::uint64_t basis_hash = 0;
  std::uint64_t seed = 0;
  double time = 0.0;
};

inline constexpr char kSnapshotMagic[8] = {'S', '7', 'F', 'I', 'E', 'L', 'D', '\0'};
inline constexpr std::uint32_t kSnapshotVersion = 1;

namespace detail {

template <class T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& in) {
  T v;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw FormatError("snapshot: truncated file");
  return v;
}

}  // namespace detail

inline void write_snapshot(std::ostream& out, const Snapshot& s) {
  const LatticeGrid& g = s.field.grid;
  out.write(kSnapshotMagic, sizeof kSnapshotMagic);
  detail::put(out, kSnapshotVersion);
  detail::put(out, static_cast<std::uint32_t>(g.dims()));
  for (int a : g.active_dims()) detail::put(out, static_cast<std::int32_t>(a));
  for (int n : g.sizes()) detail::put(out, static_cast<std::int32_t>(n));
  for (double l : g.lengths()) detail::put(out, l);
  detail::put(out, s.basis_hash);
  detail::put(out, s.seed);
  detail::put(out, s.time);
  out.write(reinterpret_cast<const char*>(s.field.values.data()),
            static_cast<std::streamsize>(s.field.values.size() * sizeof(Fiber)));
}

inline Snapshot read_snapshot(std::istream& in) {
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kSnapshotMagic, sizeof magic) != 0) throw FormatError("snapshot: bad magic");
  if (detail::get<std::uint32_t>(in) != kSnapshotVersion) throw FormatError("snapshot: unsupported version");
  const auto d = detail::get<std::uint32_t>(in);
  if (d < 1 || d > kMaxActiveDims) throw FormatError("snapshot: bad dimension count");
  std::vector<int> active(d), sizes(d);
  std::vector<double> lengths(d);
  for (auto& a : active) a = detail::get<std::int32_t>(in);
  for (auto& n : sizes) n = detail::get<std::int32_t>(in);
  for (auto& l : lengths) l = detail::get<double>(in);
  LatticeGrid grid;
  try {
    grid = LatticeGrid(active, sizes, lengths);
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("snapshot: ") + e.what());
  }
  Snapshot s{FiberField(grid)};
  s.basis_hash = detail::get<std::uint64_t>(in);
  s.seed = detail::get<std::uint64_t>(in);
  s.time = detail::get<double>(in);
  in.read(reinterpret_cast<char*>(s.field.values.data()),
          static_cast<std::streamsize>(s.field.values.size() * sizeof(Fiber)));
  if (!in) throw FormatError("snapshot: truncated fiber data");
  return s;
}

inline void save_snapshot(const std::string& path, const Snapshot& s) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_snapshot(out, s);
}

/// Throws FormatError if the file was written against a different basis.
inline Snapshot load_snapshot(const std::string& path, std::uint64_t expected_hash) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  Snapshot s = read_snapshot(in);
  if (s.basis_hash != expected_hash) throw FormatError("snapshot: basis hash mismatch in " + path);
  return s;
}

// ---------------------------------------------------------------- tensors

inline int rank_of_kind(const std::string& kind) {
  if (kind == "2-form") return 2;
  if (kind == "3-form") return 3;
  if (kind == "4-form") return 4;
  throw FormatError("unknown tensor kind '" + kind + "' (expected 2-form, 3-form or 4-form)");
}

struct TensorFile {
  int rank = 0;
  std::vector<double> values;  // 8^rank, row-major
};

inline TensorFile read_tensor(std::istream& in) {
  std::string line;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '#') continue;
      return true;
    }
    return false;
  };
  if (!next_line()) throw FormatError("tensor file: missing header");
  std::istringstream header(line);
  std::string tag, kind;
  long count = -1;
  header >> tag >> kind >> count;
  if (tag != "spin7-tensor") throw FormatError("tensor file: header must start with 'spin7-tensor'");
  TensorFile t;
  t.rank = rank_of_kind(kind);
  long expected = 1;
  for (int r = 0; r < t.rank; ++r) expected *= kDim;
  if (count != expected)
    throw FormatError("tensor file: " + kind + " needs " + std::to_string(expected) + " components, header says " +
                      std::to_string(count));
  t.values.reserve(static_cast<std::size_t>(expected));
  while (static_cast<long>(t.values.size()) < expected) {
    if (!next_line())
      throw FormatError("tensor file: expected " + std::to_string(expected) + " values, got " +
                        std::to_string(t.values.size()));
    const char* begin = line.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) throw FormatError("tensor file: cannot parse value '" + line + "'");
    for (; *end; ++end)
      if (*end != ' ' && *end != '\t' && *end != '\r') throw FormatError("tensor file: trailing text in '" + line + "'");
    t.values.push_back(v);
  }
  if (next_line()) throw FormatError("tensor file: more values than the header declares");
  return t;
}

inline void write_tensor(std::ostream& out, int rank, const double* values) {
  static const char* kinds[] = {"", "", "2-form", "3-form", "4-form"};
  long count = 1;
  for (int r = 0; r < rank; ++r) count *= kDim;
  out << "spin7-tensor " << kinds[rank] << ' ' << count << '\n';
  char buf[40];
  for (long i = 0; i < count; ++i) {
    std::snprintf(buf, sizeof buf, "%.17g\n", values[i]);
    out << buf;
  }
}

template <int R, class Tag>
void write_tensor(std::ostream& out, const Tensor<R, Tag>& t) {
  write_tensor(out, R, t.components().data());
}

template <int R, class Tag>
Tensor<R, Tag> tensor_from_file(const TensorFile& f) {
  if (f.rank != R) throw FormatError("tensor file: rank mismatch");
  Tensor<R, Tag> t;
  for (std::size_t i = 0; i < Tensor<R, Tag>::size; ++i) t[i] = f.values[i];
  return t;
}

/// %.17g, or "nan" for non-finite values, for CSV and report output.
inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace spin7
