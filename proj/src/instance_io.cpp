#include <fstream>

#include "spca/binary_io.hpp"
#include "spca/counterexamples.hpp"

namespace spca {

namespace {

void put_string(std::ostream& out, const std::string& s) {
  binio::put<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_string(std::istream& in, const std::string& path) {
  const auto n = binio::get<std::uint32_t>(in, path);
  if (n > (1u << 20)) throw IoError(path + ": implausible string length");
  std::string s(n, '\0');
  if (!in.read(s.data(), n)) throw IoError(path + ": unexpected end of file");
  return s;
}

}  // namespace

void write_instance(const std::string& path, const CounterexampleInstance& inst) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write("SPCX", 4);
  put_string(out, inst.family);
  binio::put<std::uint32_t>(out, static_cast<std::uint32_t>(inst.params.size()));
  for (const auto& [k, v] : inst.params) {
    put_string(out, k);
    binio::put<double>(out, v);
  }
  const Index d = inst.instance.dim();
  binio::put<std::uint32_t>(out, static_cast<std::uint32_t>(d));
  for (Index i = 0; i < d * d; ++i) binio::put<double>(out, inst.instance.sigma.data()[i]);
  binio::put<std::uint32_t>(out, static_cast<std::uint32_t>(inst.instance.components.size()));
  for (const Vec& c : inst.instance.components) {
    for (double x : c) binio::put<double>(out, x);
  }
  if (!out) throw IoError("write failed: " + path);
}

CounterexampleInstance read_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  char magic[4];
  if (!in.read(magic, 4) || std::string(magic, 4) != "SPCX") throw IoError(path + ": not an SPCX instance");
  CounterexampleInstance inst;
  inst.family = get_string(in, path);
  const auto np = binio::get<std::uint32_t>(in, path);
  for (std::uint32_t i = 0; i < np; ++i) {
    std::string key = get_string(in, path);
    inst.params.emplace_back(std::move(key), binio::get<double>(in, path));
  }
  const auto d = binio::get<std::uint32_t>(in, path);
  if (d == 0) throw IoError(path + ": zero dimension");
  std::vector<double> a(static_cast<std::size_t>(d) * d);
  for (double& x : a) x = binio::get<double>(in, path);
  try {
    inst.instance.sigma = SymMatrix(d, std::move(a));
  } catch (const ParameterError& e) {
    throw IoError(path + ": " + e.what());
  }
  const auto k = binio::get<std::uint32_t>(in, path);
  for (std::uint32_t j = 0; j < k; ++j) {
    Vec c(d);
    for (double& x : c) x = binio::get<double>(in, path);
    inst.instance.components.push_back(std::move(c));
  }
  if (inst.instance.components.empty()) throw IoError(path + ": instance has no planted component");
  inst.instance.s = nnz(inst.instance.components.front());
  inst.instance.label = inst.family;
  if (inst.family == "diagthresh") inst.flags.push_back("reconstruction");
  return inst;
}

}  // namespace spca
