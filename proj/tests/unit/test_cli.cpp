#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = chaosbandit::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "chaosbandit_test_cli" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::vector<std::string> data_lines(const fs::path& p) {
  std::istringstream in(slurp(p));
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#') lines.push_back(line);
  return lines;
}

json json_header(const fs::path& p) {
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line))
    if (line.rfind("# config ", 0) == 0) return json::parse(line.substr(9));
  return nullptr;
}

}  // namespace

TEST_CASE("run writes one CDR row per cycle") {
  const auto dir = fresh_dir("run");
  const auto r = invoke({"run", "--problem", "canonical:2", "--source", "uniform", "--plays", "500",
                         "--reps", "1000", "--seed", "7", "--out", dir.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("final CDR") != std::string::npos);
  const auto lines = data_lines(dir / "cdr.csv");
  REQUIRE(lines.size() == 501);
  CHECK(lines[0] == "cycle,cdr");
  CHECK(lines[1].rfind("1,", 0) == 0);
  CHECK(lines[500].rfind("500,", 0) == 0);
  const std::string text = slurp(dir / "cdr.csv");
  CHECK(text.rfind("# chaosbandit ", 0) == 0);
  const json cfg = json_header(dir / "cdr.csv");
  CHECK(cfg["plays"] == 500);
  CHECK(cfg["seed"] == 7);
  CHECK(cfg["reward-seed"] == 7);
  CHECK_FALSE(cfg.contains("jobs"));
  CHECK_FALSE(cfg.contains("out"));
}

TEST_CASE("identical arguments give byte-identical files regardless of --jobs") {
  const auto a = fresh_dir("det_a");
  const auto b = fresh_dir("det_b");
  std::vector<std::string> args{"run", "--source", "ar", "--problem", "canonical:4", "--plays",
                                "80", "--reps", "64", "--dump-tree"};
  auto with = [&](const fs::path& d, const std::string& jobs) {
    auto v = args;
    v.insert(v.end(), {"--out", d.string(), "--jobs", jobs});
    return invoke(v);
  };
  REQUIRE(with(a, "1").code == 0);
  REQUIRE(with(b, "5").code == 0);
  CHECK(slurp(a / "cdr.csv") == slurp(b / "cdr.csv"));
  CHECK(slurp(a / "tree_dump.json") == slurp(b / "tree_dump.json"));
  const json tree = json::parse(slurp(a / "tree_dump.json"));
  CHECK(tree.size() == 3);
  CHECK(tree.contains(""));
}

TEST_CASE("config file < environment < flag") {
  const auto dir = fresh_dir("precedence");
  const fs::path cfg = dir / "cfg.json";
  {
    std::ofstream out(cfg);
    out << R"({"plays": 50, "reps": 10, "source": "coloured"})";
  }
  auto rows = [&] { return data_lines(dir / "cdr.csv").size() - 1; };

  REQUIRE(invoke({"run", "--config", cfg.string(), "--out", dir.string()}).code == 0);
  CHECK(rows() == 50);
  CHECK(json_header(dir / "cdr.csv")["source"] == "coloured");

  setenv("CHAOSBANDIT_PLAYS", "40", 1);
  REQUIRE(invoke({"run", "--config", cfg.string(), "--out", dir.string()}).code == 0);
  CHECK(rows() == 40);

  REQUIRE(invoke({"run", "--config", cfg.string(), "--plays", "30", "--out", dir.string()}).code == 0);
  CHECK(rows() == 30);
  unsetenv("CHAOSBANDIT_PLAYS");

  {
    std::ofstream out(cfg);
    out << R"({"playz": 50})";
  }
  const auto bad = invoke({"run", "--config", cfg.string(), "--out", dir.string()});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("playz") != std::string::npos);
  CHECK(invoke({"run", "--config", (dir / "nope.json").string()}).code == 1);
}

TEST_CASE("exit codes") {
  CHECK(invoke({}).code == 2);
  CHECK(invoke({"launch"}).code == 2);
  CHECK(invoke({"run", "--bogus"}).code == 2);
  CHECK(invoke({"run", "--plays", "many"}).code == 2);
  CHECK(invoke({"analyze", "fourier"}).code == 2);
  CHECK(invoke({"run", "--help"}).code == 0);
  CHECK(invoke({"--version"}).code == 0);
  const auto dir = fresh_dir("errors");
  const auto bad_problem = invoke({"run", "--problem", "type:9", "--out", dir.string()});
  CHECK(bad_problem.code == 1);
  CHECK(bad_problem.err.find("type") != std::string::npos);
  CHECK(invoke({"run", "--source", "trace", "--trace-path", (dir / "none.csv").string(), "--out",
                dir.string()})
            .code == 1);
  CHECK(invoke({"run", "--plays", "0", "--out", dir.string()}).code == 1);
  CHECK(invoke({"run", "--ar-a1", "0.5", "--source", "ar", "--out", dir.string()}).code == 1);
  CHECK_FALSE(fs::exists(dir / "cdr.csv"));
}

TEST_CASE("gen-signal output feeds a trace run") {
  const auto dir = fresh_dir("trace");
  const fs::path csv = dir / "sig.csv";
  const fs::path bin = dir / "sig.bin";
  REQUIRE(invoke({"gen-signal", "--source", "ar", "--length", "5000", "--output", csv.string()}).code == 0);
  REQUIRE(invoke({"gen-signal", "--source", "ar", "--length", "5000", "--output", bin.string()}).code == 0);
  CHECK(fs::file_size(bin) == 5000);
  const auto a = fresh_dir("trace_a");
  const auto b = fresh_dir("trace_b");
  REQUIRE(invoke({"run", "--source", "trace", "--trace-path", csv.string(), "--plays", "20", "--reps",
                  "10", "--out", a.string()})
              .code == 0);
  REQUIRE(invoke({"run", "--source", "trace", "--trace-path", bin.string(), "--plays", "20", "--reps",
                  "10", "--out", b.string()})
              .code == 0);
  CHECK(data_lines(a / "cdr.csv") == data_lines(b / "cdr.csv"));
}

TEST_CASE("sweeps write their tables") {
  const auto dir = fresh_dir("sweeps");
  REQUIRE(invoke({"sweep-ds", "--source", "uniform,ar", "--ds-values", "1,5", "--reps", "20",
                  "--plays", "10", "--at-cycle", "10", "--out", dir.string()})
              .code == 0);
  auto lines = data_lines(dir / "sweep_ds.csv");
  CHECK(lines.size() == 5);
  CHECK(lines[0] == "param,value,cdr");
  CHECK(lines[1].rfind("uniform,1,", 0) == 0);
  CHECK(lines[4].rfind("ar,5,", 0) == 0);

  REQUIRE(invoke({"sweep-dl", "--dl-values", "0,2", "--reps", "20", "--plays", "10", "--at-cycle",
                  "10", "--out", dir.string()})
              .code == 0);
  lines = data_lines(dir / "sweep_dl.csv");
  CHECK(lines.size() == 9);
  CHECK(lines[0] == "param,value,cdr,cv");
  CHECK(lines[1].rfind("type1,0,", 0) == 0);

  REQUIRE(invoke({"sweep-levels", "--k-values", "2,8", "--p1-values", "0.7", "--reps", "20",
                  "--plays", "10", "--at-cycle", "10", "--out", dir.string()})
              .code == 0);
  lines = data_lines(dir / "sweep_levels.csv");
  CHECK(lines.size() == 3);
  CHECK(lines[1].rfind("p1=0.7,2,", 0) == 0);

  CHECK(invoke({"sweep-levels", "--k-values", "9", "--out", dir.string()}).code == 2);
  CHECK(invoke({"sweep-ds", "--at-cycle", "500", "--plays", "10", "--out", dir.string()}).code == 1);
}

TEST_CASE("scaling writes a fit with a and b") {
  const auto dir = fresh_dir("scaling");
  const auto r = invoke({"scaling", "--n", "2,4", "--source", "ar", "--max-plays", "400", "--max-reps",
                         "200", "--level", "0.5", "--out", dir.string()});
  REQUIRE(r.code == 0);
  const json fit = json::parse(slurp(dir / "fit.json"));
  CHECK(fit.contains("a"));
  CHECK(fit.contains("b"));
  CHECK(fit["points"].size() == 2);
  CHECK(fit["points"][0]["plays"] == 400);
  CHECK(fit["points"][0]["reps"] == 200);
  CHECK(fit["config"]["options"]["source"] == "ar");
  CHECK(invoke({"scaling", "--n", "3", "--out", dir.string()}).code == 1);
}

TEST_CASE("analyses write their outputs") {
  const auto dir = fresh_dir("analyze");
  REQUIRE(invoke({"analyze", "acf", "--source", "ar", "--length", "100000", "--max-lag", "10",
                  "--out", dir.string()})
              .code == 0);
  auto lines = data_lines(dir / "acf.csv");
  CHECK(lines.size() == 12);
  CHECK(lines[0] == "lag,rho");
  CHECK(lines[1] == "0,1");

  REQUIRE(invoke({"analyze", "spectrum", "--source", "quasiperiodic", "--length", "10000", "--out",
                  dir.string()})
              .code == 0);
  CHECK(data_lines(dir / "spectrum.csv")[0] == "freq_ghz,power_db");

  REQUIRE(invoke({"analyze", "condition", "--source", "ar", "--walks", "10", "--horizon", "2000",
                  "--lag", "100", "--out", dir.string()})
              .code == 0);
  const json cond = json::parse(slurp(dir / "condition.json"));
  CHECK(cond["condition_number"].get<double>() >= 1.0);
  CHECK(cond["pairing"] == "pooled");
  CHECK(cond["config"]["subcommand"] == "analyze condition");
}

TEST_CASE("ETMSD of uniform-source walks at tau 1000") {
  const auto dir = fresh_dir("etmsd");
  REQUIRE(invoke({"analyze", "etmsd", "--source", "uniform", "--tau", "1000", "--walks", "100",
                  "--horizon", "100000", "--out", dir.string()})
              .code == 0);
  const auto lines = data_lines(dir / "etmsd.csv");
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == "tau,etmsd");
  const double v = std::stod(lines[1].substr(lines[1].find(',') + 1));
  CHECK(std::abs(v - 1000.0) <= 50.0);
}
