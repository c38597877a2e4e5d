//
// SPDX-License-Identifier: Apache-2.0
//

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "qubo/error.hpp"
#include "qubo/io.hpp"

using namespace qubo;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string &name) {
  const auto dir = fs::temp_directory_path() / "qubo_test_io";
  fs::create_directories(dir);
  return dir / name;
}

} // namespace

TEST_CASE("QBIN layout is bit-exact") {
  std::ostringstream out;
  io::write_qbin(out, QuboMatrix(1, {1.0}));
  const std::string bytes = out.str();
  const std::string expected("QUB1"
                             "\x01\x00\x00\x00\x00\x00\x00\x00"
                             "\x00\x00\x00\x00\x00\x00\xf0\x3f",
                             20);
  CHECK(bytes == expected);
}

TEST_CASE("QBIN round trip is bitwise") {
  const auto q = generate_qubo(17, 3);
  const auto path = scratch("m.qbin");
  io::write_qbin(path, q);
  CHECK(fs::file_size(path) == 4 + 8 + 17 * 17 * 8);
  CHECK(io::read_qbin(path) == q);
}

TEST_CASE("QBIN rejects malformed input") {
  std::ostringstream good;
  io::write_qbin(good, QuboMatrix(2, {1.0, 2.0, 2.0, 3.0}));
  const std::string bytes = good.str();

  SUBCASE("bad magic") {
    std::string b = bytes;
    b[3] = '2';
    std::istringstream in(b);
    CHECK_THROWS_AS(io::read_qbin(in), FormatError);
  }
  SUBCASE("truncated") {
    std::istringstream in(bytes.substr(0, bytes.size() - 3));
    CHECK_THROWS_AS(io::read_qbin(in), FormatError);
  }
  SUBCASE("trailing bytes") {
    std::istringstream in(bytes + "x");
    CHECK_THROWS_AS(io::read_qbin(in), FormatError);
  }
  SUBCASE("asymmetric payload") {
    std::string b = bytes;
    b[4 + 8 + 8 + 7] = '\x41'; // high byte of entry (0,1)
    std::istringstream in(b);
    CHECK_THROWS_AS(io::read_qbin(in), ValidationError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(io::read_qbin(scratch("does_not_exist.qbin")), IoError);
  }
}

TEST_CASE("solution JSON") {
  const auto path = scratch("s.json");
  const BinaryVector x(std::vector<std::uint8_t>{1, 0, 1});
  const double energy = -0.1 - 0.2; // not representable in short decimal
  io::write_solution(path, x, energy);
  const auto sol = io::read_solution(path);
  CHECK(sol.n == 3);
  CHECK(sol.bits == std::vector<std::int64_t>{1, 0, 1});
  CHECK(sol.energy == energy);

  std::ofstream(path) << R"({"n": 3, "bits": [1, 0], "energy": 1.0})";
  CHECK_THROWS_AS(io::read_solution(path), FormatError);
  std::ofstream(path) << R"({"n": 2, "bits": [1, 0.5], "energy": 1.0})";
  CHECK_THROWS_AS(io::read_solution(path), FormatError);
  std::ofstream(path) << "not json";
  CHECK_THROWS_AS(io::read_solution(path), FormatError);

  // A value of 2 parses; rejecting it is verify_solution's job.
  std::ofstream(path) << R"({"n": 2, "bits": [1, 2], "energy": 1.0})";
  CHECK(io::read_solution(path).bits[1] == 2);
}
