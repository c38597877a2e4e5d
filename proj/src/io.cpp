//
// SPDX-License-Identifier: Apache-2.0
//

#include "qubo/io.hpp"

#include <array>
#include <bit>
#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "qubo/error.hpp"

namespace qubo::io {

namespace {

constexpr std::array<char, 4> kMagic{'Q', 'U', 'B', '1'};

void put_u64_le(std::ostream &out, std::uint64_t v) {
  std::array<char, 8> buf{};
  for (std::size_t k = 0; k < 8; ++k)
    buf[k] = static_cast<char>((v >> (8 * k)) & 0xffU);
  out.write(buf.data(), buf.size());
}

bool get_u64_le(std::istream &in, std::uint64_t &v) {
  std::array<unsigned char, 8> buf{};
  if (!in.read(reinterpret_cast<char *>(buf.data()), buf.size()))
    return false;
  v = 0;
  for (std::size_t k = 0; k < 8; ++k)
    v |= static_cast<std::uint64_t>(buf[k]) << (8 * k);
  return true;
}

std::ofstream open_out(const std::filesystem::path &path,
                       std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out)
    throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

} // namespace

void write_qbin(std::ostream &out, const QuboMatrix &q) {
  out.write(kMagic.data(), kMagic.size());
  put_u64_le(out, q.size());
  for (const double v : q.entries())
    put_u64_le(out, std::bit_cast<std::uint64_t>(v));
  if (!out)
    throw IoError("write failed");
}

void write_qbin(const std::filesystem::path &path, const QuboMatrix &q) {
  auto out = open_out(path, std::ios::binary);
  write_qbin(out, q);
}

QuboMatrix read_qbin(std::istream &in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic)
    throw FormatError("missing QUB1 magic");
  std::uint64_t n = 0;
  if (!get_u64_le(in, n))
    throw FormatError("truncated header");
  if (n == 0)
    throw FormatError("matrix dimension is zero");
  if (n > (std::uint64_t{1} << 20))
    throw FormatError("matrix dimension " + std::to_string(n) +
                      " is implausibly large");
  std::vector<double> entries(n * n);
  for (auto &v : entries) {
    std::uint64_t raw = 0;
    if (!get_u64_le(in, raw))
      throw FormatError("truncated payload, expected " +
                        std::to_string(n * n) + " values");
    v = std::bit_cast<double>(raw);
  }
  if (in.peek() != std::char_traits<char>::eof())
    throw FormatError("trailing bytes after payload");
  return QuboMatrix(n, std::move(entries));
}

QuboMatrix read_qbin(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot open " + path.string());
  return read_qbin(in);
}

void write_solution(const std::filesystem::path &path, const BinaryVector &x,
                    Energy energy) {
  nlohmann::ordered_json doc;
  doc["n"] = x.size();
  auto &bits = doc["bits"] = nlohmann::ordered_json::array();
  for (const auto b : x.bits())
    bits.push_back(static_cast<int>(b));
  doc["energy"] = energy;
  auto out = open_out(path);
  out << doc.dump() << '\n';
  if (!out)
    throw IoError("write failed: " + path.string());
}

RawSolution read_solution(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot open " + path.string());
  RawSolution sol;
  try {
    const auto doc = nlohmann::json::parse(in);
    sol.n = doc.at("n").get<std::size_t>();
    for (const auto &b : doc.at("bits")) {
      if (!b.is_number_integer())
        throw FormatError("bits must be integers");
      sol.bits.push_back(b.get<std::int64_t>());
    }
    sol.energy = doc.at("energy").get<double>();
  } catch (const nlohmann::json::exception &e) {
    throw FormatError("bad solution file " + path.string() + ": " + e.what());
  }
  if (sol.bits.size() != sol.n)
    throw FormatError("solution declares n = " + std::to_string(sol.n) +
                      " but lists " + std::to_string(sol.bits.size()) +
                      " bits");
  return sol;
}

} // namespace qubo::io
