#include <fstream>
#include <limits>

#include "spca/binary_io.hpp"
#include "spca/models.hpp"

namespace spca {

void write_dataset(const std::string& path, const Dataset& x) {
  if (x.n > std::numeric_limits<std::uint32_t>::max() || x.d > std::numeric_limits<std::uint32_t>::max()) {
    throw ParameterError("dataset too large for the binary format");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write("SPCA", 4);
  binio::put<std::uint32_t>(out, static_cast<std::uint32_t>(x.n));
  binio::put<std::uint32_t>(out, static_cast<std::uint32_t>(x.d));
  binio::put<std::uint64_t>(out, x.seed);
  for (double v : x.rows) binio::put<double>(out, v);
  if (!out) throw IoError("write failed: " + path);
}

Dataset read_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  char magic[4];
  if (!in.read(magic, 4) || std::string(magic, 4) != "SPCA") throw IoError(path + ": not an SPCA dataset");
  const auto n = binio::get<std::uint32_t>(in, path);
  const auto d = binio::get<std::uint32_t>(in, path);
  const auto seed = binio::get<std::uint64_t>(in, path);
  std::vector<double> rows(static_cast<std::size_t>(n) * d);
  for (double& v : rows) v = binio::get<double>(in, path);
  if (in.peek() != std::char_traits<char>::eof()) throw IoError(path + ": trailing bytes after dataset");
  try {
    return Dataset(n, d, std::move(rows), seed);
  } catch (const ParameterError& e) {
    throw IoError(path + ": " + e.what());
  }
}

}  // namespace spca
