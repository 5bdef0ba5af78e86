#include <array>
#include <bit>
#include <fstream>
#include <stdexcept>

#include "premit/tensor.hpp"

namespace premit::tensor {

namespace {

constexpr std::array<char, 4> kMagic{'P', 'T', 'T', 'N'};

void put_u32(std::ostream& os, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
  os.write(b, 4);
}

void put_f64(std::ostream& os, double x) {
  const auto v = std::bit_cast<std::uint64_t>(x);
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
  os.write(b, 8);
}

std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) throw std::runtime_error("tensor dump: truncated header");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t{b[i]} << (8 * i);
  return v;
}

double get_f64(std::istream& is) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) throw std::runtime_error("tensor dump: truncated data");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t{b[i]} << (8 * i);
  return std::bit_cast<double>(v);
}

void write_train(std::ostream& os, const TensorTrain& t, DumpKind kind) {
  os.write(kMagic.data(), 4);
  put_u32(os, kDumpVersion);
  put_u32(os, static_cast<std::uint32_t>(t.size()));
  put_u32(os, static_cast<std::uint32_t>(kind));
  for (Index b : t.bond_dims()) put_u32(os, static_cast<std::uint32_t>(b));
  for (const Core& c : t.cores())
    for (double x : c.data) put_f64(os, x);
  if (!os) throw std::runtime_error("tensor dump: write failed");
}

TensorTrain read_train(std::istream& is, DumpKind expected) {
  std::array<char, 4> magic{};
  if (!is.read(magic.data(), 4) || magic != kMagic) throw std::runtime_error("tensor dump: bad magic");
  if (get_u32(is) != kDumpVersion) throw std::runtime_error("tensor dump: unsupported version");
  const std::uint32_t n = get_u32(is);
  if (n == 0) throw std::runtime_error("tensor dump: empty train");
  if (get_u32(is) != static_cast<std::uint32_t>(expected)) throw std::runtime_error("tensor dump: wrong kind");
  std::vector<Index> bonds(n + 1);
  for (auto& b : bonds) b = get_u32(is);
  const Index phys = expected == DumpKind::Mps ? 4 : 16;
  std::vector<Core> cores;
  for (std::uint32_t k = 0; k < n; ++k) {
    Core c(bonds[k], phys, bonds[k + 1]);
    for (double& x : c.data) x = get_f64(is);
    cores.push_back(std::move(c));
  }
  return TensorTrain(std::move(cores));
}

}  // namespace

void write_binary(std::ostream& os, const Mps& v) { write_train(os, v.train(), DumpKind::Mps); }
void write_binary(std::ostream& os, const Mpo& m) { write_train(os, m.train(), DumpKind::Mpo); }
Mps read_mps(std::istream& is) { return Mps(read_train(is, DumpKind::Mps)); }
Mpo read_mpo(std::istream& is) { return Mpo(read_train(is, DumpKind::Mpo)); }

void save(const std::string& path, const Mpo& m) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_binary(os, m);
}

Mpo load_mpo(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_mpo(is);
}

}  // namespace premit::tensor
