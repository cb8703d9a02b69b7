#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "chaosbandit/error.hpp"
#include "chaosbandit/output.hpp"
#include "doctest.h"

using namespace chaosbandit;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("real formatting is shortest round-trip") {
  CHECK(format_real(0.95) == "0.95");
  CHECK(format_real(1.0) == "1");
  CHECK(format_real(1e-9) == "1e-09");
  CHECK(format_real(-0.25) == "-0.25");
  CHECK(format_real(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_real(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(format_real(std::nan("")) == "nan");
  const double x = 0.1 + 0.2;
  CHECK(std::stod(format_real(x)) == x);
}

TEST_CASE("csv layout") {
  CsvWriter csv({"first", "second"}, {"a", "b"});
  csv.row({"1", "2"}).row({"3", "4"});
  CHECK(csv.str() == "# first\n# second\na,b\n1,2\n3,4\n");
  CHECK_THROWS_AS(csv.row({"1"}), InvalidArgument);
}

TEST_CASE("atomic writes create directories and leave no temp file") {
  const fs::path dir = fs::temp_directory_path() / "chaosbandit_test_output" / "nested";
  fs::remove_all(dir.parent_path());
  const fs::path file = dir / "x.csv";
  write_file_atomic(file, "one\n");
  write_file_atomic(file, "two\n");
  CHECK(slurp(file) == "two\n");
  CHECK_FALSE(fs::exists(dir / "x.csv.tmp"));
  CHECK_THROWS_AS(write_file_atomic(file / "child", "x"), IoError);
}
