#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "paofed/cli.hpp"
#include "paofed/config.hpp"
#include "paofed/error.hpp"

namespace py = pybind11;
using namespace paofed;
using nlohmann::json;

namespace {

ExperimentPlan plan_from(const std::string& config_json, bool check_mu = true) {
  return parse_config(json::parse(config_json), check_mu);
}

py::dict curve_dict(const SuiteResult& r) {
  std::vector<std::size_t> it;
  std::vector<double> mean, sd, up, down;
  for (const AveragedPoint& p : r.curve) {
    it.push_back(p.iteration);
    mean.push_back(p.mse_db_mean);
    sd.push_back(p.mse_db_std);
    up.push_back(p.uploads);
    down.push_back(p.downloads);
  }
  py::dict d;
  d["iteration"] = it;
  d["mse_db_mean"] = mean;
  d["mse_db_std"] = sd;
  d["uploads"] = up;
  d["downloads"] = down;
  return d;
}

std::vector<std::size_t> indices(const Mask& m) { return m.indices; }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Partial-sharing asynchronous online federated learning simulator";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);

  m.attr("DEFAULT_MU") = kDefaultMu;
  m.attr("CSV_HEADER") = std::string(cli::kCsvHeader);

  m.def(
      "resolve_config", [](const std::string& cfg) { return to_json(plan_from(cfg)).dump(); },
      py::arg("config_json"), "Validates a JSON config and returns its fully resolved form.");

  m.def(
      "preset_config",
      [](const std::string& name) {
        ExperimentPlan plan = preset_plan(name);
        plan.algorithms = cli::default_algorithms(plan.base.async.l_max);
        plan.base.algo = plan.algorithms.front();
        return to_json(plan).dump();
      },
      py::arg("name"));

  m.def(
      "simulate",
      [](const std::string& cfg, std::optional<std::string> seeds, unsigned threads) {
        ExperimentPlan plan = plan_from(cfg);
        if (seeds) plan.seeds = parse_seed_spec(*seeds);
        std::vector<SuiteResult> results;
        {
          py::gil_scoped_release release;
          results = run_suite(plan.expand(), plan.seeds, threads);
        }
        py::dict out;
        for (const SuiteResult& r : results) out[py::str(r.name)] = curve_dict(r);
        return out;
      },
      py::arg("config_json"), py::arg("seeds") = py::none(), py::arg("threads") = 0u);

  m.def(
      "run_to_dir",
      [](const std::string& cfg, const std::filesystem::path& out_dir, const std::string& title,
         std::optional<std::string> seeds) {
        ExperimentPlan plan = plan_from(cfg);
        if (seeds) plan.seeds = parse_seed_spec(*seeds);
        std::ostringstream log;
        cli::RunOutputs outputs;
        {
          py::gil_scoped_release release;
          outputs = cli::run_plan(plan, out_dir, title, log);
        }
        std::vector<std::string> files;
        for (const auto& p : outputs.csv_files) files.push_back(p.string());
        return files;
      },
      py::arg("config_json"), py::arg("out_dir"), py::arg("title") = "run", py::arg("seeds") = py::none());

  m.def(
      "mu_bound",
      [](const std::string& cfg, std::size_t samples) {
        const cli::BoundReport r = cli::check_bound(plan_from(cfg, false), samples);
        return py::make_tuple(r.bound, r.lines);
      },
      py::arg("config_json"), py::arg("samples_per_client") = 500);

  py::class_<RffMap>(m, "RffMap")
      .def(py::init<std::size_t, std::size_t, double, std::uint64_t>(), py::arg("input_dim"),
           py::arg("dim"), py::arg("bandwidth"), py::arg("seed"))
      .def_property_readonly("input_dim", &RffMap::input_dim)
      .def_property_readonly("dim", &RffMap::dim)
      .def_property_readonly("bandwidth", &RffMap::bandwidth)
      .def_property_readonly("phases",
                             [](const RffMap& r) { return std::vector<double>(r.phases().begin(), r.phases().end()); })
      .def("map", [](const RffMap& r, const std::vector<double>& x) { return r.map(x); }, py::arg("x"));

  py::enum_<SharingMode>(m, "SharingMode")
      .value("COORDINATED", SharingMode::kCoordinated)
      .value("UNCOORDINATED", SharingMode::kUncoordinated);

  py::class_<MaskScheduler>(m, "MaskScheduler")
      .def(py::init<std::size_t, std::size_t, std::size_t, SharingMode, bool>(), py::arg("dim"),
           py::arg("m"), py::arg("num_clients"), py::arg("mode"), py::arg("reuse_local") = false)
      .def("server_mask", [](const MaskScheduler& s, std::size_t k, std::size_t n) { return indices(s.server_mask(k, n)); },
           py::arg("k"), py::arg("n"))
      .def("client_mask", [](const MaskScheduler& s, std::size_t k, std::size_t n) { return indices(s.client_mask(k, n)); },
           py::arg("k"), py::arg("n"));

  m.def(
      "sample_delays",
      [](const std::string& preset, std::size_t count, std::uint64_t seed) {
        const AsyncConfig cfg = async_preset(preset);
        Rng rng = make_stream(seed, StreamKind::kChannel);
        std::vector<std::size_t> out(count);
        for (auto& d : out) d = sample_delay(cfg, rng);
        return out;
      },
      py::arg("preset"), py::arg("count"), py::arg("seed") = 1);

  m.def("mse_db_from_errors", [](const std::vector<double>& e) { return mse_db_from_errors(e); }, py::arg("errors"));
}
