#include <catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "colorq/ppm.hpp"
#include "testutil.hpp"

namespace fs = std::filesystem;

namespace {

struct CmdResult {
  int code = -1;
  std::string out;
};

fs::path scratch_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "colorq_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

CmdResult run_cli(const std::string& args) {
  const fs::path out_file = scratch_dir() / "stdout.txt";
  const std::string cmd = std::string(COLORQ_CLI_PATH) + " " + args + " > " + out_file.string() +
                          " 2> " + (scratch_dir() / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  CmdResult res;
  res.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(out_file);
  std::ostringstream ss;
  ss << in.rdbuf();
  res.out = ss.str();
  return res;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double field_after(const std::string& text, const std::string& key) {
  const auto pos = text.find(key);
  REQUIRE(pos != std::string::npos);
  return std::stod(text.substr(pos + key.size()));
}

// Blanks the named columns of a CSV so timing noise can be ignored.
std::string mask_columns(const std::string& csv, const std::set<std::string>& names) {
  std::istringstream in(csv);
  std::string line, out;
  std::vector<bool> masked;
  bool header = true;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (header) {
      for (const auto& f : fields) masked.push_back(names.count(f) > 0);
      header = false;
    }
    for (std::size_t i = 0; i < fields.size(); ++i)
      out += (i < masked.size() && masked[i] ? std::string("_") : fields[i]) + ",";
    out += "\n";
  }
  return out;
}

const fs::path& test_image() {
  static const fs::path p = [] {
    const fs::path path = scratch_dir() / "photo.ppm";
    colorq::save_ppm(testutil::synth_photo(64, 48, 5), path);
    return path;
  }();
  return p;
}

}  // namespace

TEST_CASE("quantize writes a palette-limited image and reports metrics") {
  const fs::path out = scratch_dir() / "q16.ppm";
  const fs::path pal = scratch_dir() / "q16.palette";
  const fs::path err = scratch_dir() / "q16err.ppm";

  const CmdResult res = run_cli("quantize " + test_image().string() +
                                " --method wsm --k 16 --seed 7 -o " + out.string() +
                                " --palette " + pal.string() + " --error-image " + err.string());
  REQUIRE(res.code == 0);
  REQUIRE(res.out.find("mse=") != std::string::npos);
  REQUIRE(res.out.find("psnr=") != std::string::npos);
  REQUIRE(res.out.find("time_ms=") != std::string::npos);

  const colorq::RgbImage mapped = colorq::load_ppm(out);
  std::set<std::uint32_t> distinct;
  for (const auto& px : mapped.pixels) distinct.insert(colorq::pack_rgb(px));
  REQUIRE(distinct.size() <= 16);

  // palette file: one triple per line
  std::ifstream pf(pal);
  int lines = 0;
  std::string line;
  while (std::getline(pf, line))
    if (!line.empty()) ++lines;
  REQUIRE(lines == 16);
  REQUIRE(fs::exists(err));
}

TEST_CASE("quantize is deterministic for a fixed seed") {
  const fs::path out1 = scratch_dir() / "d1.ppm";
  const fs::path out2 = scratch_dir() / "d2.ppm";
  const std::string base = "quantize " + test_image().string() + " --method wsm --k 8 --seed 3 -o ";
  REQUIRE(run_cli(base + out1.string()).code == 0);
  REQUIRE(run_cli(base + out2.string()).code == 0);
  REQUIRE(slurp(out1) == slurp(out2));
}

TEST_CASE("the convergent variant does at least as well as the fixed one") {
  const fs::path out = scratch_dir() / "v.ppm";
  const std::string tail = " --k 16 --seed 11 -o " + out.string();
  const CmdResult fixed = run_cli("quantize " + test_image().string() + " --method wsm" + tail);
  const CmdResult conv = run_cli("quantize " + test_image().string() + " --method wsm-c" + tail);
  REQUIRE(fixed.code == 0);
  REQUIRE(conv.code == 0);
  REQUIRE(field_after(conv.out, "mse=") <= field_after(fixed.out, "mse=") + 1e-9);
}

TEST_CASE("failures map to distinct exit codes") {
  const fs::path out = scratch_dir() / "x.ppm";
  REQUIRE(run_cli("quantize /nonexistent.ppm -o " + out.string()).code == 2);
  REQUIRE(run_cli("quantize " + test_image().string() + " --method octree -o " + out.string()).code == 3);
  REQUIRE(run_cli("quantize " + test_image().string() + " --k 0 -o " + out.string()).code == 4);
  // more centers than unique colors
  const fs::path tiny = scratch_dir() / "tiny.ppm";
  colorq::save_ppm(colorq::RgbImage(2, 2, colorq::RgbColor{1, 2, 3}), tiny);
  REQUIRE(run_cli("quantize " + tiny.string() + " --method wsm --k 8 -o " + out.string()).code == 4);
}

TEST_CASE("bench emits per-run, summary and rank CSVs") {
  const fs::path prefix = scratch_dir() / "b1";
  const CmdResult res =
      run_cli("bench --images " + test_image().string() + " --methods mc,wsm --k-values 8 --runs 1 " +
              "--base-seed 5 --output " + prefix.string());
  REQUIRE(res.code == 0);

  const std::string summary = slurp(prefix.string() + "_summary.csv");
  REQUIRE(summary.find("method,k,image,runs,mse_mean,mse_std,psnr_mean,time_mean_ms,stability,"
                       "iterations_mean") == 0);
  // single deterministic run: sigma = 0, stability = 100
  std::istringstream in(summary);
  std::string line;
  std::getline(in, line);  // header
  bool saw_mc = false;
  while (std::getline(in, line)) {
    if (line.rfind("mc,", 0) == 0) {
      saw_mc = true;
      std::vector<std::string> f;
      std::istringstream ls(line);
      std::string tok;
      while (std::getline(ls, tok, ',')) f.push_back(tok);
      REQUIRE(std::stod(f[5]) == 0.0);    // mse_std
      REQUIRE(std::stod(f[8]) == 100.0);  // stability
    }
  }
  REQUIRE(saw_mc);

  const std::string ranks = slurp(prefix.string() + "_ranks.csv");
  REQUIRE(ranks.find("method,mse_rank,time_rank,mean_rank,stability_rank") == 0);
  REQUIRE(slurp(prefix.string() + "_runs.csv").find("image,method,k,seed,") == 0);
}

TEST_CASE("bench output is reproducible except for timing columns") {
  const fs::path p1 = scratch_dir() / "r1";
  const fs::path p2 = scratch_dir() / "r2";
  const std::string args = "bench --images " + test_image().string() +
                           " --methods wsm,mc --k-values 4,8 --runs 2 --base-seed 9 --output ";
  REQUIRE(run_cli(args + p1.string()).code == 0);
  REQUIRE(run_cli(args + p2.string()).code == 0);

  REQUIRE(mask_columns(slurp(p1.string() + "_runs.csv"), {"elapsed_ms"}) ==
          mask_columns(slurp(p2.string() + "_runs.csv"), {"elapsed_ms"}));
  REQUIRE(mask_columns(slurp(p1.string() + "_summary.csv"), {"time_mean_ms"}) ==
          mask_columns(slurp(p2.string() + "_summary.csv"), {"time_mean_ms"}));
}

TEST_CASE("bench names the failing cell") {
  const fs::path prefix = scratch_dir() / "bf";
  const fs::path tiny = scratch_dir() / "tiny2.ppm";
  colorq::save_ppm(colorq::RgbImage(2, 2, colorq::RgbColor{9, 9, 9}), tiny);
  const CmdResult res = run_cli("bench --images " + tiny.string() +
                                " --methods wsm --k-values 64 --runs 1 --output " + prefix.string());
  REQUIRE(res.code != 0);
  REQUIRE(slurp(scratch_dir() / "stderr.txt").find("cell image=tiny2 method=wsm k=64") !=
          std::string::npos);
}

TEST_CASE("scaling sweeps K and reports monotone distance work") {
  const fs::path csv = scratch_dir() / "scale.csv";
  const CmdResult one = run_cli("scaling " + test_image().string() + " --method wsm --k-values 1");
  REQUIRE(one.code == 0);
  REQUIRE(one.out.find("k,elapsed_ms,dist_evals\n1,") != std::string::npos);

  REQUIRE(run_cli("scaling " + test_image().string() +
                  " --method wsm --k-values 2,4,8,16,32 --seed 3 -o " + csv.string())
              .code == 0);
  std::ifstream in(csv);
  std::string line;
  std::getline(in, line);  // header
  double prev = -1;
  int rows = 0;
  while (std::getline(in, line)) {
    const auto last = line.rfind(',');
    const double evals = std::stod(line.substr(last + 1));
    if (prev >= 0) REQUIRE(evals >= prev * 0.95);
    prev = evals;
    ++rows;
  }
  REQUIRE(rows == 5);
}
