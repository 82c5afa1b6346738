#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "daec/calibration.hpp"
#include "daec/decoders.hpp"
#include "daec/errors.hpp"
#include "daec/harness.hpp"
#include "daec/hmz.hpp"
#include "daec/parallel.hpp"

namespace daec::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw FormatError("failed writing " + path.string());
}

// "-" or empty means standard output.
void emit(const std::string& target, const std::string& text, std::ostream& out) {
  if (target.empty() || target == "-") {
    out << text;
  } else {
    write_text(target, text);
  }
}

std::optional<double> parse_presmooth(const std::string& text) {
  if (text == "off") return std::nullopt;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || !(v > 0.0)) throw CLI::ValidationError("--presmooth", "expected 'off' or a positive number");
  return v;
}

Pattern parse_pattern_flag(const std::string& text) {
  if (auto p = parse_pattern(text)) return *p;
  throw CLI::ValidationError("--pattern", "expected br, ur, bl or ul");
}

std::vector<int> parse_candidates(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (item.empty() || used != item.size()) throw CLI::ValidationError("--candidates", "bad integer '" + item + "'");
    out.push_back(v);
  }
  return out;
}

bool use_color(std::ostream& err) {
  return &err == &std::cerr && std::getenv("NO_COLOR") == nullptr && isatty(STDERR_FILENO) != 0;
}

void report_error(std::ostream& err, const std::string& message) {
  if (use_color(err)) {
    err << "\x1b[31merror:\x1b[0m " << message << "\n";
  } else {
    err << "error: " << message << "\n";
  }
}

// --- encode -----------------------------------------------------------------

struct EncodeArgs {
  std::vector<std::string> centers;
  std::string centers_file;
  int width = 0;
  int height = 0;
  double stride = 4.0;
  double sigma = 2.0;
  bool normalized = false;
  std::string output;
};

int cmd_encode(const EncodeArgs& a, std::ostream& out) {
  std::vector<Coord> centers;
  for (const auto& c : a.centers) {
    const auto comma = c.find(',');
    if (comma == std::string::npos) throw CLI::ValidationError("--center", "expected X,Y");
    try {
      centers.push_back({std::stod(c.substr(0, comma)), std::stod(c.substr(comma + 1)), Space::Image});
    } catch (const std::exception&) {
      throw CLI::ValidationError("--center", "expected X,Y, got '" + c + "'");
    }
  }
  if (!a.centers_file.empty()) {
    try {
      for (const auto& p : ordered_json::parse(read_text(a.centers_file))) {
        centers.push_back({p.at(0).get<double>(), p.at(1).get<double>(), Space::Image});
      }
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("centers file: " + std::string(e.what()));
    }
  }
  if (centers.empty()) throw CLI::ValidationError("encode", "no centers given (use --center or --centers)");

  const auto convention = a.normalized ? PeakConvention::Normalized : PeakConvention::UnitPeak;
  std::vector<Heatmap> maps;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    try {
      maps.push_back(encode(centers[i], a.width, a.height, a.stride, a.sigma, convention));
    } catch (const DomainError& e) {
      throw DomainError("center " + std::to_string(i) + ": " + e.what());
    }
  }
  hmz::write_file(a.output, maps);
  out << "wrote " << maps.size() << " heatmap(s) to " << a.output << "\n";
  return kOk;
}

// --- decode -----------------------------------------------------------------

struct DecodeArgs {
  std::string input;
  std::string method = "standard";
  std::string delta = "0";
  std::string pattern = "br";
  std::string presmooth = "off";
  std::string output;
};

int cmd_decode(const DecodeArgs& a, std::ostream& out) {
  DecoderConfig config;
  const auto method = parse_method(a.method);
  if (!method) throw CLI::ValidationError("--method", "expected standard, shifting, darklite or daec");
  config.method = *method;
  config.pattern = parse_pattern_flag(a.pattern);
  config.presmooth = parse_presmooth(a.presmooth);
  const bool auto_paper = a.delta == "auto-paper";
  if (!auto_paper) {
    std::size_t used = 0;
    try {
      config.delta = std::stoi(a.delta, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != a.delta.size()) throw CLI::ValidationError("--delta", "expected an integer or auto-paper");
  }

  const auto maps = hmz::read_file(a.input);
  if (auto_paper && !maps.empty()) {
    config.delta = paper_default_delta(maps.front().sigma(), config.presmooth.has_value());
  }

  std::vector<Coord> coords(maps.size());
  parallel_for(maps.size(), [&](std::size_t i) {
    try {
      coords[i] = decode(maps[i], config).coord;
    } catch (const DomainError& e) {
      throw DomainError("heatmap " + std::to_string(i) + ": " + e.what());
    } catch (const ContractError& e) {
      throw ContractError("heatmap " + std::to_string(i) + ": " + e.what());
    }
  });

  const bool daec = config.method == Method::Daec;
  std::string text;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    ordered_json row{{"index", i},
                     {"x", coords[i].x},
                     {"y", coords[i].y},
                     {"space", "image"},
                     {"method", std::string(to_string(config.method))},
                     {"delta", daec ? ordered_json(config.delta) : ordered_json()}};
    text += row.dump() + "\n";
  }
  emit(a.output, text, out);
  return kOk;
}

// --- calibrate --------------------------------------------------------------

struct CalibrateArgs {
  std::string dataset;
  std::string truth;
  std::string pattern = "br";
  std::string presmooth = "off";
  std::string candidates;
  std::string objective = "mean-error";
  std::string output;
};

int cmd_calibrate(const CalibrateArgs& a, std::ostream& out) {
  CalibrationSpec spec;
  spec.pattern = parse_pattern_flag(a.pattern);
  spec.presmooth = parse_presmooth(a.presmooth);
  try {
    spec.objective = parse_objective(a.objective);
  } catch (const DomainError& e) {
    throw CLI::ValidationError("--objective", e.what());
  }

  auto maps = hmz::read_file(a.dataset);
  const std::string truth = read_text(a.truth);
  if (maps.empty()) throw FormatError(a.dataset + " holds no heatmaps");
  spec.candidates = a.candidates.empty() ? default_candidates(maps.front().sigma()) : parse_candidates(a.candidates);
  const auto samples = attach_truth(std::move(maps), truth);

  const CalibrationReport report = calibrate(samples, spec);
  write_text(a.output, to_json(report) + "\n");
  out << curve_table(report);
  out << "delta_opt " << report.delta_opt << " (" << to_string(report.objective) << ", pattern "
      << to_string(report.pattern) << ", " << report.samples << " samples)\n";
  return kOk;
}

// --- experiment -------------------------------------------------------------

struct ExperimentArgs {
  std::string plan;
  std::string out_dir = ".";
  bool dump = false;
};

int cmd_experiment(const ExperimentArgs& a, std::ostream& out) {
  const ExperimentPlan plan = plan_from_json(read_text(a.plan));
  validate(plan);
  const ExperimentResult result = run_experiment(plan);

  fs::create_directories(a.out_dir);
  const fs::path dir(a.out_dir);
  write_text(dir / "results.csv", results_csv(result, plan.pck_thresholds));
  write_text(dir / "curves.csv", curves_csv(result));
  if (a.dump) {
    std::vector<NoiseCondition> conditions = plan.noise;
    if (conditions.empty()) conditions.push_back({"clean", {}});
    for (const auto& cond : conditions) {
      const auto samples = generate(plan, cond);
      hmz::write_file(dir / (cond.id + ".hmz"), flatten_heatmaps(samples));
      write_text(dir / (cond.id + ".truth.json"), truth_to_json(samples) + "\n");
    }
  }

  std::size_t failed = 0;
  for (const auto& c : result.cells) failed += c.error.empty() ? 0 : 1;
  out << "wrote " << result.cells.size() << " cell(s), " << result.curves.size() << " curve point(s) to "
      << dir.string() << "\n";
  if (failed > 0) out << failed << " cell(s) failed; see the status column\n";
  return kOk;
}

// --- bench ------------------------------------------------------------------

struct BenchArgs {
  std::string plan;
  std::size_t iterations = 30;
  std::string output;
};

int cmd_bench(const BenchArgs& a, std::ostream& out) {
  const ExperimentPlan plan = plan_from_json(read_text(a.plan));
  validate(plan);
  const BenchResult result = bench(plan, a.iterations);
  emit(a.output, bench_csv(result), out);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Heatmap coordinate decoding toolkit", "daec"};
  app.require_subcommand(1);

  EncodeArgs enc;
  auto* encode_cmd = app.add_subcommand("encode", "Encode image-space centers as Gaussian heatmaps (.hmz)");
  encode_cmd->add_option("--center", enc.centers, "Image-space center X,Y (repeatable)");
  encode_cmd->add_option("--centers", enc.centers_file, "JSON file holding [[x, y], ...]");
  encode_cmd->add_option("--width", enc.width, "Heatmap width")->required()->check(CLI::PositiveNumber);
  encode_cmd->add_option("--height", enc.height, "Heatmap height")->required()->check(CLI::PositiveNumber);
  encode_cmd->add_option("--stride", enc.stride, "Image pixels per heatmap pixel")->capture_default_str();
  encode_cmd->add_option("--sigma", enc.sigma, "Gaussian sigma in heatmap pixels")->capture_default_str();
  encode_cmd->add_flag("--normalized", enc.normalized, "Use the unit-integral convention instead of unit peak");
  encode_cmd->add_option("-o,--output", enc.output, "Output .hmz path")->required();

  DecodeArgs dec;
  auto* decode_cmd = app.add_subcommand("decode", "Decode every heatmap in a .hmz file to JSON lines");
  decode_cmd->add_option("input", dec.input, "Input .hmz file")->required();
  decode_cmd->add_option("--method", dec.method, "standard|shifting|darklite|daec")->capture_default_str();
  decode_cmd->add_option("--delta", dec.delta, "Integer or auto-paper (sigma+2, sigma+1 when presmoothed)")
      ->capture_default_str();
  decode_cmd->add_option("--pattern", dec.pattern, "br|ur|bl|ul")->capture_default_str();
  decode_cmd->add_option("--presmooth", dec.presmooth, "Kernel sigma or off")->capture_default_str();
  decode_cmd->add_option("-o,--output", dec.output, "Output path (default stdout)");

  CalibrateArgs cal;
  auto* calibrate_cmd = app.add_subcommand("calibrate", "Grid-search the compensation factor on a labeled dataset");
  calibrate_cmd->add_option("dataset", cal.dataset, "Heatmaps (.hmz)")->required();
  calibrate_cmd->add_option("truth", cal.truth, "Truth JSON")->required();
  calibrate_cmd->add_option("--pattern", cal.pattern, "br|ur|bl|ul")->capture_default_str();
  calibrate_cmd->add_option("--presmooth", cal.presmooth, "Kernel sigma or off")->capture_default_str();
  calibrate_cmd->add_option("--candidates", cal.candidates, "Comma-separated deltas (default -2..sigma+4)");
  calibrate_cmd->add_option("--objective", cal.objective, "mean-error or pck:<t>[,<t>...]")->capture_default_str();
  calibrate_cmd->add_option("-o,--output", cal.output, "Report JSON path")->required();

  ExperimentArgs exp;
  auto* experiment_cmd = app.add_subcommand("experiment", "Run a decoder x noise experiment plan");
  experiment_cmd->add_option("plan", exp.plan, "Plan JSON")->required();
  experiment_cmd->add_option("--out-dir", exp.out_dir, "Directory for results.csv and curves.csv")
      ->capture_default_str();
  experiment_cmd->add_flag("--dump", exp.dump, "Also write <noise_id>.hmz and <noise_id>.truth.json");

  BenchArgs ben;
  auto* bench_cmd = app.add_subcommand("bench", "Time each plan decoder against standard decoding");
  bench_cmd->add_option("plan", ben.plan, "Plan JSON")->required();
  bench_cmd->add_option("--iterations", ben.iterations, "Timed iterations (>= 30)")->capture_default_str();
  bench_cmd->add_option("-o,--output", ben.output, "Output CSV path (default stdout)");

  std::vector<std::string> argv{"daec"};
  argv.insert(argv.end(), args.begin(), args.end());
  std::vector<char*> ptrs;
  for (auto& s : argv) ptrs.push_back(s.data());

  try {
    app.parse(static_cast<int>(ptrs.size()), ptrs.data());
    if (encode_cmd->parsed()) return cmd_encode(enc, out);
    if (decode_cmd->parsed()) return cmd_decode(dec, out);
    if (calibrate_cmd->parsed()) return cmd_calibrate(cal, out);
    if (experiment_cmd->parsed()) return cmd_experiment(exp, out);
    if (bench_cmd->parsed()) return cmd_bench(ben, out);
    return kUsage;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  } catch (const FormatError& e) {
    report_error(err, e.what());
    return kFormat;
  } catch (const ConfigError& e) {
    report_error(err, e.what());
    return kConfig;
  } catch (const CalibrationError& e) {
    report_error(err, e.what());
    return kDomain;
  } catch (const DomainError& e) {
    report_error(err, e.what());
    return kDomain;
  } catch (const ContractError& e) {
    report_error(err, e.what());
    return kDomain;
  } catch (const fs::filesystem_error& e) {
    report_error(err, e.what());
    return kFormat;
  } catch (const std::exception& e) {
    report_error(err, std::string("unexpected: ") + e.what());
    return kUnexpected;
  }
}

}  // namespace daec::cli
