#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "json.hpp"

#include "daec/decoders.hpp"
#include "daec/hmz.hpp"
#include "daec/noise.hpp"

using namespace daec;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run daec_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

// Fresh scratch directory per test case.
fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("daec_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

const fs::path kGolden = DAEC_GOLDEN_DIR;

std::vector<std::string> kCenters = {"--center", "81.3,122.9", "--center", "40,40", "--center", "150.6,30.2",
                                     "--center", "2.5,250"};

fs::path encoded(const fs::path& dir) {
  std::vector<std::string> args{"encode", "--width", "48", "--height", "64", "-o", (dir / "in.hmz").string()};
  args.insert(args.end(), kCenters.begin(), kCenters.end());
  REQUIRE(daec_cli(args).code == 0);
  return dir / "in.hmz";
}

const char* kPlan = R"({
  "samples": 60,
  "noise": [
    {"id": "clean", "specs": []},
    {"id": "ghost", "specs": [{"kind": "ghost", "amplitude": 0.05, "offset": [2, 2], "seed": 11}]}
  ],
  "decoders": [
    {"method": "standard"},
    {"method": "shifting"},
    {"method": "darklite", "presmooth": 2},
    {"method": "daec", "delta": 0},
    {"method": "daec", "delta": "calibrated", "pattern": "br"},
    {"method": "daec", "delta": "auto-paper", "label": "daec paper, default"}
  ],
  "calibration": {"patterns": ["br", "ul"]}
})";

}  // namespace

TEST_CASE("cli: decode matches the golden JSON lines") {
  const auto dir = scratch("golden_decode");
  const auto in = encoded(dir);
  CHECK(slurp(in) == slurp(kGolden / "centers.hmz"));
  for (const std::string name : {"standard", "shifting", "darklite", "daec"}) {
    const auto r = daec_cli({"decode", in.string(), "--method", name, "--delta", "auto-paper"});
    REQUIRE(r.code == 0);
    CHECK(r.out == slurp(kGolden / ("decode_" + name + ".jsonl")));
  }
}

TEST_CASE("cli: decode rows equal the library bit for bit") {
  const auto dir = scratch("fidelity");
  const auto maps = hmz::read_file(encoded(dir));
  const DecoderConfig cfg{Method::Daec, 0, Pattern::BR};
  const auto r = daec_cli({"decode", (dir / "in.hmz").string(), "--method", "daec", "--delta", "0", "-o",
                           (dir / "out.jsonl").string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  std::istringstream lines(slurp(dir / "out.jsonl"));
  std::size_t i = 0;
  for (std::string line; std::getline(lines, line); ++i) {
    const auto row = nlohmann::json::parse(line);
    const Coord c = decode(maps[i], cfg).coord;
    CHECK(row["index"] == i);
    CHECK(row["x"].get<double>() == c.x);
    CHECK(row["y"].get<double>() == c.y);
    CHECK(row["space"] == "image");
    CHECK(row["method"] == "daec");
    CHECK(row["delta"] == 0);
  }
  CHECK(i == maps.size());
}

TEST_CASE("cli: UL on the mirrored file mirrors UR") {
  const auto dir = scratch("mirror");
  const auto maps = hmz::read_file(encoded(dir));
  std::vector<Heatmap> noisy, mirrored;
  for (const auto& hm : maps) {
    noisy.push_back(inject_noise(hm, {NoiseKind::GhostGaussian, 0.2, 2, 1, 0, 0, 0}));
    mirrored.push_back(mirror_x(noisy.back()));
  }
  hmz::write_file(dir / "a.hmz", noisy);
  hmz::write_file(dir / "m.hmz", mirrored);
  const auto a = daec_cli({"decode", (dir / "a.hmz").string(), "--method", "daec", "--delta", "2", "--pattern", "ur"});
  const auto m = daec_cli({"decode", (dir / "m.hmz").string(), "--method", "daec", "--delta", "2", "--pattern", "ul"});
  REQUIRE(a.code == 0);
  REQUIRE(m.code == 0);
  std::istringstream la(a.out), lm(m.out);
  std::string ra, rm;
  const double span = 47 * 4.0;
  while (std::getline(la, ra) && std::getline(lm, rm)) {
    const auto ja = nlohmann::json::parse(ra), jm = nlohmann::json::parse(rm);
    CHECK(jm["x"].get<double>() == doctest::Approx(span - ja["x"].get<double>()).epsilon(1e-12));
    CHECK(jm["y"].get<double>() == ja["y"].get<double>());
  }
}

TEST_CASE("cli: decode errors and exit codes") {
  const auto dir = scratch("errors");
  const auto in = encoded(dir);
  auto r = daec_cli({"decode", in.string(), "--method", "daec", "--delta", "9"});
  CHECK(r.code == cli::kDomain);
  CHECK(r.err.find("delta exceeds window") != std::string::npos);
  CHECK(r.err.find("heatmap 0") != std::string::npos);

  CHECK(daec_cli({"decode", (dir / "missing.hmz").string()}).code == cli::kFormat);
  spit(dir / "junk.hmz", "HMZ0 not really");
  CHECK(daec_cli({"decode", (dir / "junk.hmz").string()}).code == cli::kFormat);
  CHECK(daec_cli({"decode", in.string(), "--bogus"}).code == cli::kUsage);
  CHECK(daec_cli({"decode", in.string(), "--method", "dark"}).code == cli::kUsage);
  CHECK(daec_cli({"decode", in.string(), "--delta", "4x"}).code == cli::kUsage);
  CHECK(daec_cli({"decode", in.string(), "--presmooth", "-1"}).code == cli::kUsage);
  CHECK(daec_cli({}).code == cli::kUsage);
  CHECK(daec_cli({"frobnicate"}).code == cli::kUsage);
  CHECK(daec_cli({"--help"}).code == 0);
  CHECK(daec_cli({"encode", "--width", "4", "--height", "4", "-o", (dir / "x.hmz").string(), "--center", "99,1"})
            .code == cli::kDomain);
}

TEST_CASE("cli: presmooth and auto-paper delta") {
  const auto dir = scratch("presmooth");
  const auto in = encoded(dir);
  const auto r = daec_cli({"decode", in.string(), "--method", "daec", "--delta", "auto-paper", "--presmooth", "2"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("\"delta\":3") != std::string::npos);
  const auto s = daec_cli({"decode", in.string(), "--method", "standard"});
  CHECK(s.out.find("\"delta\":null") != std::string::npos);
}

TEST_CASE("cli: experiment output matches the golden CSVs") {
  const auto dir = scratch("experiment");
  spit(dir / "plan.json", kPlan);
  const auto r = daec_cli({"experiment", (dir / "plan.json").string(), "--out-dir", (dir / "out").string(), "--dump"});
  REQUIRE(r.code == 0);
  CHECK(slurp(dir / "out" / "results.csv") == slurp(kGolden / "results.csv"));
  CHECK(slurp(dir / "out" / "curves.csv") == slurp(kGolden / "curves.csv"));
  CHECK(fs::exists(dir / "out" / "ghost.hmz"));
  CHECK(fs::exists(dir / "out" / "clean.truth.json"));
}

TEST_CASE("cli: calibrate on dumped datasets") {
  const auto dir = scratch("calibrate");
  std::string plan = R"({"samples": 300, "noise": [{"id": "clean", "specs": []},
    {"id": "ghost", "specs": [{"kind": "ghost", "amplitude": 0.05, "offset": [2, 2], "seed": 3}]}],
    "decoders": [{"method": "standard"}]})";
  spit(dir / "plan.json", plan);
  REQUIRE(daec_cli({"experiment", (dir / "plan.json").string(), "--out-dir", dir.string(), "--dump"}).code == 0);

  auto clean = daec_cli({"calibrate", (dir / "clean.hmz").string(), (dir / "clean.truth.json").string(), "-o",
                         (dir / "clean.json").string()});
  REQUIRE(clean.code == 0);
  const auto report = nlohmann::json::parse(slurp(dir / "clean.json"));
  CHECK(report["delta_opt"] == 0);
  CHECK(report["samples"] == 300);
  CHECK(report["curve"].size() == 9);
  CHECK(clean.out.find("delta_opt 0") != std::string::npos);

  auto ghost = daec_cli({"calibrate", (dir / "ghost.hmz").string(), (dir / "ghost.truth.json").string(), "-o",
                         (dir / "ghost.json").string(), "--candidates", "0,1,2,3,4"});
  REQUIRE(ghost.code == 0);
  CHECK(nlohmann::json::parse(slurp(dir / "ghost.json"))["delta_opt"].get<int>() > 0);

  CHECK(daec_cli({"calibrate", (dir / "ghost.hmz").string(), (dir / "nope.json").string(), "-o",
                  (dir / "x.json").string()})
            .code == cli::kFormat);
  CHECK(daec_cli({"calibrate", (dir / "ghost.hmz").string(), (dir / "clean.truth.json").string(), "-o",
                  (dir / "x.json").string(), "--candidates", "0,12"})
            .code == cli::kDomain);
  CHECK(daec_cli({"calibrate", (dir / "ghost.hmz").string(), (dir / "clean.truth.json").string(), "-o",
                  (dir / "x.json").string(), "--objective", "auc"})
            .code == cli::kUsage);

  // Zero heatmaps: every candidate is flagged.
  std::vector<Heatmap> zeros(4, Heatmap(48, 64, 4.0, 2.0, std::vector<float>(48 * 64, 0.0f)));
  hmz::write_file(dir / "zeros.hmz", zeros);
  spit(dir / "zeros.json", R"({"joints": 1, "norm_length": 32, "keypoints": [[1,1,1],[2,2,1],[3,3,1],[4,4,1]]})");
  const auto failed = daec_cli({"calibrate", (dir / "zeros.hmz").string(), (dir / "zeros.json").string(), "-o",
                                (dir / "x.json").string()});
  CHECK(failed.code == cli::kDomain);
  CHECK(failed.err.find("calibration failed") != std::string::npos);
}

TEST_CASE("cli: plan errors and bench") {
  const auto dir = scratch("bench");
  spit(dir / "bad.json", R"({"margin": 2, "decoders": [{"method": "standard"}]})");
  CHECK(daec_cli({"experiment", (dir / "bad.json").string(), "--out-dir", dir.string()}).code == cli::kConfig);
  spit(dir / "broken.json", "{");
  CHECK(daec_cli({"experiment", (dir / "broken.json").string()}).code == cli::kFormat);

  spit(dir / "plan.json", R"({"samples": 8, "bench_batch": 8, "decoders": [{"method": "shifting"}]})");
  const auto r = daec_cli({"bench", (dir / "plan.json").string(), "--iterations", "30"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("decoder,method,delta,pattern,presmooth,median_extra_ns", 0) == 0);
  CHECK(daec_cli({"bench", (dir / "plan.json").string(), "--iterations", "3"}).code == cli::kDomain);
}
