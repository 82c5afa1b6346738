#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <optional>
#include <string>
#include <vector>

#include "daec/calibration.hpp"
#include "daec/errors.hpp"
#include "daec/hmz.hpp"
#include "daec/parallel.hpp"

namespace py = pybind11;
using namespace daec;

namespace {

// Copies a (N, H, W) float32 C-contiguous buffer into heatmaps. Anything else
// is rejected rather than converted.
std::vector<Heatmap> heatmaps_from(const py::buffer& buffer, double stride, double sigma) {
  const py::buffer_info info = buffer.request();
  if (info.format != py::format_descriptor<float>::format() || info.itemsize != 4) {
    throw py::type_error("heatmaps must be float32, got format '" + info.format + "'");
  }
  if (info.ndim != 3) throw py::value_error("heatmaps must have shape (N, H, W)");
  const auto n = static_cast<std::size_t>(info.shape[0]);
  const auto h = static_cast<int>(info.shape[1]);
  const auto w = static_cast<int>(info.shape[2]);
  if (info.strides[2] != 4 || info.strides[1] != 4 * w || info.strides[0] != 4 * static_cast<py::ssize_t>(w) * h) {
    throw py::value_error("heatmaps must be C-contiguous");
  }
  const auto* data = static_cast<const float*>(info.ptr);
  const std::size_t plane = static_cast<std::size_t>(w) * h;
  std::vector<Heatmap> maps;
  maps.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    maps.emplace_back(w, h, stride, sigma, std::vector<float>(data + i * plane, data + (i + 1) * plane));
  }
  return maps;
}

Pattern pattern_from(const std::string& name) {
  const auto p = parse_pattern(name);
  if (!p) throw py::value_error("unknown pattern '" + name + "'");
  return *p;
}

py::array_t<double> decode_batch(const py::buffer& buffer, double stride, double sigma, const std::string& method,
                                 const py::object& delta, const std::string& pattern,
                                 std::optional<double> presmooth) {
  const auto maps = heatmaps_from(buffer, stride, sigma);
  DecoderConfig config;
  const auto m = parse_method(method);
  if (!m) throw py::value_error("unknown method '" + method + "'");
  config.method = *m;
  config.pattern = pattern_from(pattern);
  config.presmooth = presmooth;
  if (py::isinstance<py::str>(delta)) {
    if (delta.cast<std::string>() != "auto-paper") throw py::value_error("delta must be an int or 'auto-paper'");
    config.delta = paper_default_delta(sigma, presmooth.has_value());
  } else {
    config.delta = delta.cast<int>();
  }

  py::array_t<double> out({static_cast<py::ssize_t>(maps.size()), py::ssize_t{2}});
  std::vector<Coord> coords(maps.size());
  {
    py::gil_scoped_release release;
    parallel_for(maps.size(), [&](std::size_t i) { coords[i] = decode(maps[i], config).coord; });
  }
  auto view = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < coords.size(); ++i) {
    view(i, 0) = coords[i].x;
    view(i, 1) = coords[i].y;
  }
  return out;
}

// Truth rows are (x, y) or (x, y, visible) in image px, one per heatmap;
// consecutive groups of `joints` heatmaps form one sample.
std::string calibrate_batch(const py::buffer& buffer, const py::array_t<double, py::array::c_style>& truths,
                            double stride, double sigma, std::size_t joints, double norm_length,
                            std::optional<std::vector<int>> candidates, const std::string& pattern,
                            std::optional<double> presmooth, const std::string& objective) {
  auto maps = heatmaps_from(buffer, stride, sigma);
  if (truths.ndim() != 2 || (truths.shape(1) != 2 && truths.shape(1) != 3)) {
    throw py::value_error("truths must have shape (N, 2) or (N, 3)");
  }
  if (static_cast<std::size_t>(truths.shape(0)) != maps.size()) {
    throw py::value_error("truths has " + std::to_string(truths.shape(0)) + " rows for " +
                          std::to_string(maps.size()) + " heatmaps");
  }
  if (joints == 0 || maps.size() % joints != 0) throw py::value_error("heatmap count is not a multiple of joints");

  const auto t = truths.unchecked<2>();
  std::vector<SyntheticSample> samples(maps.size() / joints);
  for (std::size_t i = 0; i < maps.size(); ++i) {
    auto& s = samples[i / joints];
    s.norm_length = norm_length;
    s.heatmaps.push_back(std::move(maps[i]));
    s.truth.push_back({t(i, 0), t(i, 1)});
    s.visible.push_back(truths.shape(1) == 2 || t(i, 2) != 0.0);
  }

  CalibrationSpec spec;
  spec.candidates = candidates ? *candidates : default_candidates(sigma);
  spec.pattern = pattern_from(pattern);
  spec.presmooth = presmooth;
  spec.objective = parse_objective(objective);
  py::gil_scoped_release release;
  return to_json(calibrate(samples, spec));
}

py::tuple read_hmz(const std::string& path) {
  const auto maps = hmz::read_file(path);
  const py::ssize_t n = static_cast<py::ssize_t>(maps.size());
  const py::ssize_t h = maps.empty() ? 0 : maps[0].height();
  const py::ssize_t w = maps.empty() ? 0 : maps[0].width();
  py::array_t<float> out({n, h, w});
  float* dst = out.mutable_data();
  for (const auto& m : maps) {
    std::memcpy(dst, m.values().data(), m.size() * sizeof(float));
    dst += m.size();
  }
  const double stride = maps.empty() ? 0.0 : maps[0].stride();
  const double sigma = maps.empty() ? 0.0 : maps[0].sigma();
  return py::make_tuple(out, stride, sigma);
}

void write_hmz(const std::string& path, const py::buffer& buffer, double stride, double sigma) {
  hmz::write_file(path, heatmaps_from(buffer, stride, sigma));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Native heatmap decoding and calibration";

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const FormatError& e) {
      PyErr_SetString(PyExc_OSError, e.what());
    } catch (const CalibrationError& e) {
      PyErr_SetString(PyExc_RuntimeError, e.what());
    } catch (const DomainError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const ContractError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const ConfigError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  m.def("decode_batch", &decode_batch, py::arg("heatmaps"), py::kw_only(), py::arg("stride"), py::arg("sigma"),
        py::arg("method") = "daec", py::arg("delta") = 0, py::arg("pattern") = "br",
        py::arg("presmooth") = py::none());
  m.def("calibrate_batch", &calibrate_batch, py::arg("heatmaps"), py::arg("truths"), py::kw_only(),
        py::arg("stride"), py::arg("sigma"), py::arg("joints") = 1, py::arg("norm_length") = 1.0,
        py::arg("candidates") = py::none(), py::arg("pattern") = "br", py::arg("presmooth") = py::none(),
        py::arg("objective") = "mean-error");
  m.def("read_hmz", &read_hmz, py::arg("path"));
  m.def("write_hmz", &write_hmz, py::arg("path"), py::arg("heatmaps"), py::kw_only(), py::arg("stride"),
        py::arg("sigma"));
}
