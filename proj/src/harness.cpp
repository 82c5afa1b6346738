#include "daec/harness.hpp"

#include <cmath>
#include <random>
#include <set>

#include "json.hpp"

#include "daec/errors.hpp"
#include "daec/parallel.hpp"

namespace daec {

using nlohmann::ordered_json;

void validate(const ExperimentPlan& plan) {
  if (plan.width < 1 || plan.height < 1) throw ConfigError("grid dimensions must be positive");
  if (!(plan.stride > 0.0)) throw ConfigError("stride must be positive");
  if (!(plan.sigma > 0.0)) throw ConfigError("sigma must be positive");
  if (plan.samples == 0) throw ConfigError("sample count must be positive");
  if (plan.joints == 0) throw ConfigError("joints per sample must be positive");
  if (!(plan.norm_length > 0.0)) throw ConfigError("norm_length must be positive");
  if (!(plan.occlusion_rate >= 0.0 && plan.occlusion_rate < 1.0)) {
    throw ConfigError("occlusion_rate must lie in [0, 1)");
  }
  if (!(plan.margin >= 0.0)) throw ConfigError("margin must be non-negative");
  const double min_margin = 3.0 * plan.sigma + 2.0;
  if (!plan.border && plan.margin < min_margin) {
    throw ConfigError("margin " + format_number(plan.margin) + " < 3*sigma+2 = " + format_number(min_margin) +
                      " (set \"border\": true for border runs)");
  }
  if (plan.width - 1 < 2.0 * plan.margin || plan.height - 1 < 2.0 * plan.margin) {
    throw ConfigError("margin " + format_number(plan.margin) + " leaves no interior on a " +
                      std::to_string(plan.width) + "x" + std::to_string(plan.height) + " grid");
  }
  for (double t : plan.pck_thresholds) {
    if (!(t > 0.0)) throw ConfigError("PCK thresholds must be positive");
  }
  std::set<std::string> ids;
  for (const auto& n : plan.noise) {
    if (n.id.empty()) throw ConfigError("noise condition without id");
    if (!ids.insert(n.id).second) throw ConfigError("duplicate noise id '" + n.id + "'");
  }
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

template <class T>
T get_or(const ordered_json& j, const char* key, T fallback) {
  return j.contains(key) && !j.at(key).is_null() ? j.at(key).get<T>() : fallback;
}

Pattern pattern_from(const std::string& s) {
  if (auto p = parse_pattern(s)) return *p;
  throw FormatError("unknown pattern '" + s + "'");
}

NoiseSpec noise_from_json(const ordered_json& j) {
  NoiseSpec spec;
  const auto kind = parse_noise_kind(j.at("kind").get<std::string>());
  if (!kind) throw FormatError("unknown noise kind '" + j.at("kind").get<std::string>() + "'");
  spec.kind = *kind;
  spec.amplitude = get_or(j, "amplitude", 0.0);
  if (j.contains("offset")) {
    spec.offset_x = j.at("offset").at(0).get<double>();
    spec.offset_y = j.at("offset").at(1).get<double>();
  }
  if (j.contains("gradient")) {
    spec.gradient_x = j.at("gradient").at(0).get<double>();
    spec.gradient_y = j.at("gradient").at(1).get<double>();
  }
  spec.seed = get_or<std::uint64_t>(j, "seed", 0);
  return spec;
}

ordered_json noise_to_json(const NoiseSpec& spec) {
  return {{"kind", std::string(to_string(spec.kind))},
          {"amplitude", spec.amplitude},
          {"offset", {spec.offset_x, spec.offset_y}},
          {"gradient", {spec.gradient_x, spec.gradient_y}},
          {"seed", spec.seed}};
}

DecoderEntry decoder_from_json(const ordered_json& j) {
  DecoderEntry entry;
  const auto method = parse_method(j.at("method").get<std::string>());
  if (!method) throw FormatError("unknown decoder method '" + j.at("method").get<std::string>() + "'");
  entry.config.method = *method;
  if (j.contains("delta")) {
    const auto& d = j.at("delta");
    if (d.is_string()) {
      const auto s = d.get<std::string>();
      if (s == "auto-paper") {
        entry.delta_source = DeltaSource::AutoPaper;
      } else if (s == "calibrated") {
        entry.delta_source = DeltaSource::Calibrated;
      } else {
        throw FormatError("delta must be an integer, \"auto-paper\" or \"calibrated\"");
      }
    } else {
      entry.config.delta = d.get<int>();
    }
  }
  if (j.contains("pattern")) entry.config.pattern = pattern_from(j.at("pattern").get<std::string>());
  if (j.contains("presmooth") && !j.at("presmooth").is_null()) {
    entry.config.presmooth = j.at("presmooth").get<double>();
  }
  entry.label = get_or<std::string>(j, "label", "");
  return entry;
}

ordered_json decoder_to_json(const DecoderEntry& e) {
  ordered_json j{{"method", std::string(to_string(e.config.method))}};
  switch (e.delta_source) {
    case DeltaSource::Fixed: j["delta"] = e.config.delta; break;
    case DeltaSource::AutoPaper: j["delta"] = "auto-paper"; break;
    case DeltaSource::Calibrated: j["delta"] = "calibrated"; break;
  }
  j["pattern"] = std::string(to_string(e.config.pattern));
  j["presmooth"] = e.config.presmooth ? ordered_json(*e.config.presmooth) : ordered_json();
  if (!e.label.empty()) j["label"] = e.label;
  return j;
}

}  // namespace

ExperimentPlan plan_from_json(const std::string& text) {
  ExperimentPlan plan;
  try {
    const auto j = ordered_json::parse(text);
    plan.height = get_or(j, "height", plan.height);
    plan.width = get_or(j, "width", plan.width);
    plan.stride = get_or(j, "stride", plan.stride);
    plan.sigma = get_or(j, "sigma", plan.sigma);
    plan.samples = get_or(j, "samples", plan.samples);
    plan.joints = get_or(j, "joints", plan.joints);
    plan.margin = get_or(j, "margin", plan.margin);
    plan.border = get_or(j, "border", plan.border);
    plan.norm_length = get_or(j, "norm_length", plan.norm_length);
    plan.occlusion_rate = get_or(j, "occlusion_rate", plan.occlusion_rate);
    plan.pck_thresholds = get_or(j, "pck_thresholds", plan.pck_thresholds);
    plan.bench_batch = get_or(j, "bench_batch", plan.bench_batch);
    plan.seed = get_or(j, "seed", plan.seed);
    if (j.contains("noise")) {
      for (const auto& n : j.at("noise")) {
        NoiseCondition cond{n.at("id").get<std::string>(), {}};
        for (const auto& s : n.at("specs")) cond.specs.push_back(noise_from_json(s));
        plan.noise.push_back(std::move(cond));
      }
    }
    if (j.contains("decoders")) {
      for (const auto& d : j.at("decoders")) plan.decoders.push_back(decoder_from_json(d));
    }
    if (j.contains("calibration")) {
      const auto& c = j.at("calibration");
      if (c.contains("patterns")) {
        for (const auto& p : c.at("patterns")) plan.calibration.patterns.push_back(pattern_from(p.get<std::string>()));
      }
      plan.calibration.candidates = get_or(c, "candidates", plan.calibration.candidates);
      if (c.contains("objective")) plan.calibration.objective = parse_objective(c.at("objective").get<std::string>());
      if (c.contains("presmooth") && !c.at("presmooth").is_null()) {
        plan.calibration.presmooth = c.at("presmooth").get<double>();
      }
      plan.calibration.samples = get_or(c, "samples", plan.calibration.samples);
      plan.calibration.seed = get_or(c, "seed", plan.calibration.seed);
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("plan JSON: ") + e.what());
  } catch (const DomainError& e) {
    throw FormatError(std::string("plan JSON: ") + e.what());
  }
  return plan;
}

std::string to_json(const ExperimentPlan& plan) {
  ordered_json j{{"height", plan.height},
                 {"width", plan.width},
                 {"stride", plan.stride},
                 {"sigma", plan.sigma},
                 {"samples", plan.samples},
                 {"joints", plan.joints},
                 {"margin", plan.margin},
                 {"border", plan.border},
                 {"norm_length", plan.norm_length},
                 {"occlusion_rate", plan.occlusion_rate},
                 {"pck_thresholds", plan.pck_thresholds},
                 {"bench_batch", plan.bench_batch},
                 {"seed", plan.seed}};
  j["noise"] = ordered_json::array();
  for (const auto& n : plan.noise) {
    ordered_json specs = ordered_json::array();
    for (const auto& s : n.specs) specs.push_back(noise_to_json(s));
    j["noise"].push_back({{"id", n.id}, {"specs", specs}});
  }
  j["decoders"] = ordered_json::array();
  for (const auto& d : plan.decoders) j["decoders"].push_back(decoder_to_json(d));
  ordered_json patterns = ordered_json::array();
  for (auto p : plan.calibration.patterns) patterns.push_back(std::string(to_string(p)));
  j["calibration"] = {{"patterns", patterns},
                      {"candidates", plan.calibration.candidates},
                      {"objective", to_string(plan.calibration.objective)},
                      {"presmooth", plan.calibration.presmooth ? ordered_json(*plan.calibration.presmooth)
                                                               : ordered_json()},
                      {"samples", plan.calibration.samples},
                      {"seed", plan.calibration.seed}};
  return j.dump(2);
}

std::vector<SyntheticSample> generate(const ExperimentPlan& plan, const NoiseCondition& noise) {
  validate(plan);
  std::mt19937_64 rng(plan.seed);
  std::uniform_real_distribution<double> ux(plan.margin, plan.width - 1 - plan.margin);
  std::uniform_real_distribution<double> uy(plan.margin, plan.height - 1 - plan.margin);
  std::bernoulli_distribution occluded(plan.occlusion_rate);

  std::vector<SyntheticSample> out(plan.samples);
  for (std::size_t s = 0; s < plan.samples; ++s) {
    SyntheticSample& sample = out[s];
    sample.norm_length = plan.norm_length;
    for (std::size_t j = 0; j < plan.joints; ++j) {
      const double hx = ux(rng);
      const double hy = uy(rng);
      const bool visible = !occluded(rng);
      const Coord center{hx * plan.stride, hy * plan.stride, Space::Image};
      Heatmap hm = encode(center, plan.width, plan.height, plan.stride, plan.sigma);
      for (NoiseSpec spec : noise.specs) {
        spec.seed = splitmix64(spec.seed ^ splitmix64(s * plan.joints + j));
        hm = inject_noise(hm, spec);
      }
      sample.heatmaps.push_back(std::move(hm));
      sample.truth.push_back(center);
      sample.visible.push_back(visible);
    }
  }
  return out;
}

std::vector<Heatmap> flatten_heatmaps(std::span<const SyntheticSample> samples) {
  std::vector<Heatmap> out;
  for (const auto& s : samples) out.insert(out.end(), s.heatmaps.begin(), s.heatmaps.end());
  return out;
}

std::string truth_to_json(std::span<const SyntheticSample> samples) {
  const std::size_t joints = samples.empty() ? 0 : samples.front().heatmaps.size();
  ordered_json keypoints = ordered_json::array();
  for (const auto& s : samples) {
    if (s.heatmaps.size() != joints || s.norm_length != samples.front().norm_length) {
      throw ContractError("truth dump needs a uniform joint count and norm_length");
    }
    for (std::size_t j = 0; j < joints; ++j) {
      const Coord c = s.truth[j].to_image(s.heatmaps[j].stride());
      keypoints.push_back({c.x, c.y, s.visible[j] ? 1 : 0});
    }
  }
  ordered_json doc{{"joints", joints},
                   {"norm_length", samples.empty() ? 1.0 : samples.front().norm_length},
                   {"keypoints", keypoints}};
  return doc.dump();
}

std::vector<SyntheticSample> attach_truth(std::vector<Heatmap> heatmaps, const std::string& truth_json) {
  std::vector<SyntheticSample> out;
  try {
    const auto doc = ordered_json::parse(truth_json);
    const auto joints = doc.at("joints").get<std::size_t>();
    const auto norm = doc.at("norm_length").get<double>();
    const auto& kps = doc.at("keypoints");
    if (joints == 0) throw FormatError("truth: joints must be positive");
    if (!(norm > 0.0)) throw FormatError("truth: norm_length must be positive");
    if (kps.size() != heatmaps.size()) {
      throw FormatError("truth has " + std::to_string(kps.size()) + " keypoints for " +
                        std::to_string(heatmaps.size()) + " heatmaps");
    }
    if (heatmaps.size() % joints != 0) throw FormatError("heatmap count is not a multiple of joints");
    out.resize(heatmaps.size() / joints);
    for (std::size_t k = 0; k < heatmaps.size(); ++k) {
      SyntheticSample& s = out[k / joints];
      const auto& kp = kps.at(k);
      if (kp.size() != 3) throw FormatError("truth keypoint " + std::to_string(k) + " is not [x, y, visible]");
      s.norm_length = norm;
      s.truth.push_back({kp.at(0).get<double>(), kp.at(1).get<double>(), Space::Image});
      s.visible.push_back(kp.at(2).get<int>() != 0);
      s.heatmaps.push_back(std::move(heatmaps[k]));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("truth JSON: ") + e.what());
  }
  for (const auto& s : out) {
    try {
      validate(s);
    } catch (const ContractError& e) {
      throw FormatError(std::string("truth JSON: ") + e.what());
    }
  }
  return out;
}

DecodeRun decode_dataset(std::span<const SyntheticSample> samples, const DecoderConfig& config) {
  DecodeRun run;
  run.predictions.reserve(count_visible(samples));
  for (const auto& s : samples) {
    for (std::size_t j = 0; j < s.heatmaps.size(); ++j) {
      if (!s.visible[j]) continue;
      const Decoded d = decode(s.heatmaps[j], config);
      run.predictions.push_back(d.coord);
      if (d.status == DecodeStatus::Fallback) ++run.fallbacks;
    }
  }
  return run;
}

ExperimentResult run_experiment(const ExperimentPlan& plan) {
  validate(plan);
  if (plan.decoders.empty()) throw ConfigError("experiment plan has no decoders");

  std::vector<NoiseCondition> conditions = plan.noise;
  if (conditions.empty()) conditions.push_back({"clean", {}});

  ExperimentResult result;
  for (const auto& cond : conditions) {
    const auto eval_set = generate(plan, cond);
    std::vector<SyntheticSample> train_storage;
    std::span<const SyntheticSample> train_set = eval_set;
    if (plan.calibration.samples > 0) {
      ExperimentPlan train_plan = plan;
      train_plan.samples = plan.calibration.samples;
      train_plan.seed = plan.calibration.seed;
      train_storage = generate(train_plan, cond);
      train_set = train_storage;
    }

    auto spec_for = [&](Pattern pattern, std::optional<double> presmooth) {
      CalibrationSpec spec;
      spec.candidates =
          plan.calibration.candidates.empty() ? default_candidates(plan.sigma) : plan.calibration.candidates;
      spec.pattern = pattern;
      spec.presmooth = presmooth;
      spec.objective = plan.calibration.objective;
      return spec;
    };

    for (Pattern pattern : plan.calibration.patterns) {
      const auto report = calibrate(train_set, spec_for(pattern, plan.calibration.presmooth));
      for (const auto& p : report.curve) result.curves.push_back({p.delta, pattern, cond.id, p.score, p.rejected});
      result.delta_opt[cond.id][pattern] = report.delta_opt;
    }

    const auto& learned = result.delta_opt[cond.id];
    std::vector<CellResult> cells(plan.decoders.size());
    parallel_for(plan.decoders.size(), [&](std::size_t d) {
      const DecoderEntry& entry = plan.decoders[d];
      CellResult& cell = cells[d];
      cell.noise_id = cond.id;
      cell.config = entry.config;
      try {
        switch (entry.delta_source) {
          case DeltaSource::Fixed:
            break;
          case DeltaSource::AutoPaper:
            cell.config.delta = paper_default_delta(plan.sigma, entry.config.presmooth.has_value());
            break;
          case DeltaSource::Calibrated:
            if (entry.config.presmooth == plan.calibration.presmooth && learned.contains(entry.config.pattern)) {
              cell.config.delta = learned.at(entry.config.pattern);
            } else {
              cell.config.delta =
                  calibrate(train_set, spec_for(entry.config.pattern, entry.config.presmooth)).delta_opt;
            }
            break;
        }
        cell.label = entry.label.empty() ? describe(cell.config) : entry.label;
        const DecodeRun run = decode_dataset(eval_set, cell.config);
        cell.fallbacks = run.fallbacks;
        cell.report = evaluate(eval_set, run.predictions, plan.pck_thresholds);
      } catch (const std::exception& e) {
        if (cell.label.empty()) cell.label = entry.label.empty() ? describe(cell.config) : entry.label;
        cell.error = e.what();
      }
    });
    for (auto& c : cells) result.cells.push_back(std::move(c));
  }
  return result;
}

namespace {

std::string presmooth_field(const DecoderConfig& c) { return c.presmooth ? format_number(*c.presmooth) : ""; }

std::string delta_field(const DecoderConfig& c) { return c.method == Method::Daec ? std::to_string(c.delta) : ""; }

std::string pattern_field(const DecoderConfig& c) {
  return c.method == Method::Daec ? std::string(to_string(c.pattern)) : "";
}

}  // namespace

std::string results_csv(const ExperimentResult& result, const std::vector<double>& thresholds) {
  std::string out = "noise_id,decoder,method,delta,pattern,presmooth," + csv_header(thresholds) + ",fallbacks,status\n";
  for (const auto& c : result.cells) {
    out += csv_field(c.noise_id) + "," + csv_field(c.label) + "," + std::string(to_string(c.config.method)) + "," +
           delta_field(c.config) + "," + pattern_field(c.config) + "," + presmooth_field(c.config) + ",";
    if (c.error.empty()) {
      out += csv_row(c.report, thresholds) + "," + std::to_string(c.fallbacks) + ",ok\n";
    } else {
      out += std::string(4 + thresholds.size(), ',') + csv_field("error: " + c.error) + "\n";
    }
  }
  return out;
}

std::string curves_csv(const ExperimentResult& result) {
  std::string out = "delta,pattern,noise_id,score\n";
  for (const auto& r : result.curves) {
    out += std::to_string(r.delta) + "," + std::string(to_string(r.pattern)) + "," + csv_field(r.noise_id) + "," +
           (r.rejected ? std::string("") : format_number(r.score)) + "\n";
  }
  return out;
}

}  // namespace daec
