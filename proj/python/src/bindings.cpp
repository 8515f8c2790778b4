#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "clo/channel.hpp"
#include "clo/errors.hpp"
#include "clo/harness.hpp"
#include "clo/io.hpp"
#include "clo/scenario.hpp"

namespace py = pybind11;

namespace {

clo::ScenarioConfig parse(const std::string& text) {
  return text.empty() ? clo::default_scenario() : clo::parse_scenario(nlohmann::json::parse(text));
}

py::dict frames_of(const clo::RunMetrics& m) {
  std::vector<long long> frame, user, decisions;
  std::vector<double> theta, avg, cum, lower, upper;
  for (const auto& r : m.frames) {
    frame.push_back(r.frame);
    user.push_back(static_cast<long long>(r.user));
    decisions.push_back(r.decisions);
    theta.push_back(r.theta);
    avg.push_back(r.avg_loss);
    cum.push_back(r.cum_avg_active);
    lower.push_back(r.lower);
    upper.push_back(r.upper);
  }
  py::dict d;
  d["frame"] = frame;
  d["user"] = user;
  d["decisions"] = decisions;
  d["theta"] = theta;
  d["avg_loss"] = avg;
  d["cum_avg_active"] = cum;
  d["lower"] = lower;
  d["upper"] = upper;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Conformal Lyapunov optimization simulator (C++ core).";

  py::register_exception<clo::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<clo::ContractViolation>(m, "ContractViolation", PyExc_RuntimeError);

  m.def("default_scenario", [] { return clo::to_json(clo::default_scenario()).dump(); },
        "Default single-hop scenario as a JSON string.");
  m.def("normalize_scenario", [](const std::string& text) { return clo::to_json(parse(text)).dump(); },
        py::arg("config_json"), "Validate a scenario and return it with every field explicit.");

  m.def(
      "run",
      [](const std::string& text, std::uint64_t seed) {
        const auto cfg = parse(text);
        clo::RunMetrics metrics;
        {
          py::gil_scoped_release release;
          clo::RunOptions o;
          o.record_decisions = false;
          metrics = clo::run_scenario(cfg, seed, o);
        }
        py::dict out;
        out["summary"] = clo::run_summary(metrics, cfg.run.converged_window).dump();
        out["certificate"] = clo::certificate_check(metrics).pass;
        out["frames"] = frames_of(metrics);
        std::vector<double> energy;
        for (const auto& s : metrics.slots) energy.push_back(s.energy_j);
        out["energy"] = energy;
        return out;
      },
      py::arg("config_json"), py::arg("seed"), "Run one seed; returns summary JSON, certificate flag and series.");

  m.def("capacity", &clo::capacity, py::arg("power_w"), py::arg("gain"), py::arg("bandwidth_hz"),
        py::arg("noise_w_per_hz"));
  m.def("min_power_for_slot", &clo::min_power_for_slot, py::arg("bits"), py::arg("gain"), py::arg("bandwidth_hz"),
        py::arg("noise_w_per_hz"), py::arg("slot_s"), py::arg("p_max_w"));
}
