#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("chromacurve-cli-" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " '" CHROMACURVE_CLI "' " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

}  // namespace

TEST_CASE("cli: usage errors exit 2") {
  CHECK(cli("") == 2);
  CHECK(cli("bogus-command") == 2);
  CHECK(cli("fit") == 2);
  CHECK(cli("fit --report-format xml a.png") == 2);
  CHECK(cli("--help") == 0);
}

TEST_CASE("cli: flags override config which overrides the environment") {
  const fs::path dir = scratch("precedence");
  REQUIRE(cli("render-synthetic --kind material --seed 7 --width 64 --height 48 --out-dir " + q(dir)) == 0);
  const fs::path img = dir / "synthetic-material-7.png";
  REQUIRE(fs::exists(img));

  // Environment only.
  REQUIRE(cli("fit " + q(img), "CHROMACURVE_OUT_DIR=" + q(dir / "env")) == 0);
  CHECK(fs::exists(dir / "env" / "synthetic-material-7.model.json"));

  // Config beats environment.
  std::ofstream(dir / "cfg.json") << "{\"out-dir\": \"" << (dir / "cfg").string() << "\", \"dt\": 31}";
  REQUIRE(cli("fit --config " + q(dir / "cfg.json") + " " + q(img), "CHROMACURVE_OUT_DIR=" + q(dir / "env2")) == 0);
  CHECK(fs::exists(dir / "cfg" / "synthetic-material-7.model.json"));
  CHECK_FALSE(fs::exists(dir / "env2"));
  CHECK(slurp(dir / "cfg" / "synthetic-material-7.fit.txt").find("dt: 31.000000") != std::string::npos);

  // Flags beat config.
  REQUIRE(cli("fit --config " + q(dir / "cfg.json") + " --dt 12 --out-dir " + q(dir / "flag") + " " + q(img)) == 0);
  CHECK(fs::exists(dir / "flag" / "synthetic-material-7.model.json"));
  CHECK(slurp(dir / "flag" / "synthetic-material-7.fit.txt").find("dt: 12.000000") != std::string::npos);

  // Defaults.
  REQUIRE(cli("fit --out-dir " + q(dir / "def") + " " + q(img)) == 0);
  CHECK(slurp(dir / "def" / "synthetic-material-7.fit.txt").find("dt: 25.000000") != std::string::npos);
}

TEST_CASE("cli: bad config and inputs") {
  const fs::path dir = scratch("bad");
  REQUIRE(cli("render-synthetic --seed 1 --width 40 --height 40 --out-dir " + q(dir)) == 0);
  const fs::path img = dir / "synthetic-material-1.png";
  std::ofstream(dir / "unknown.json") << R"({"palette_size": 12})";
  CHECK(cli("fit --config " + q(dir / "unknown.json") + " " + q(img)) == 2);
  CHECK(cli("fit --config " + q(dir / "missing.json") + " " + q(img)) == 2);
  CHECK(cli("fit --method popularity --out-dir " + q(dir) + " " + q(img)) == 2);
  CHECK(cli("fit --palette-size 0 --out-dir " + q(dir) + " " + q(img)) == 2);
  CHECK(cli("fit --out-dir " + q(dir) + " " + q(dir / "nope.png")) == 3);
  CHECK(cli("detect --out-dir " + q(dir) + " " + q(img)) == 2);
}

TEST_CASE("cli: repeated runs are byte-identical") {
  const fs::path dir = scratch("repro");
  REQUIRE(cli("render-synthetic --kind two-material --seed 4 --width 120 --height 80 --out-dir " + q(dir)) == 0);
  REQUIRE(cli("render-synthetic --kind material --seed 4 --width 120 --height 80 --out-dir " + q(dir)) == 0);
  const fs::path ex = dir / "synthetic-material-4.png";
  const fs::path probe = dir / "synthetic-two-material-4.png";
  for (const char* run : {"a", "b"}) {
    const fs::path out = dir / run;
    REQUIRE(cli("fit --method k-means --seed 3 --out-dir " + q(out) + " " + q(ex)) == 0);
    const std::string model = q(out / "synthetic-material-4.model.json");
    REQUIRE(cli("detect --model " + model + " --out-dir " + q(out) + " " + q(probe)) == 0);
    REQUIRE(cli("recognize --model " + model + " --out-dir " + q(out) + " " + q(probe)) == 0);
    REQUIRE(cli("quantize --method octree --out-dir " + q(out) + " " + q(ex)) == 0);
  }
  for (const char* name : {"synthetic-material-4.model.json", "synthetic-material-4.fit.txt",
                           "synthetic-two-material-4.detect.txt", "synthetic-two-material-4.recognize.txt",
                           "synthetic-two-material-4.mask.png", "synthetic-material-4.palette.json",
                           "synthetic-material-4.histogram.csv", "synthetic-material-4.quantize.txt"}) {
    CAPTURE(name);
    const std::string a = slurp(dir / "a" / name);
    CHECK_FALSE(a.empty());
    CHECK(a == slurp(dir / "b" / name));
  }
}
