#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "etsmc/config.hpp"
#include "etsmc/csv.hpp"
#include "etsmc/report.hpp"

namespace py = pybind11;
using namespace etsmc;

namespace {

Matrix stack_rows(const TrajectoryLog& log, const Vector StepRecord::*field) {
    const Eigen::Index rows = static_cast<Eigen::Index>(log.steps.size());
    if (rows == 0) return Matrix(0, 0);
    const Eigen::Index cols = (log.steps.front().*field).size();
    Matrix out(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        out.row(r) = (log.steps[static_cast<std::size_t>(r)].*field).transpose();
    }
    return out;
}

Vector scalar_column(const TrajectoryLog& log, const double StepRecord::*field) {
    Vector out(static_cast<Eigen::Index>(log.steps.size()));
    for (Eigen::Index r = 0; r < out.size(); ++r) {
        out(r) = log.steps[static_cast<std::size_t>(r)].*field;
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Event-triggered sliding-mode consensus simulator";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<ConfigFileError>(m, "ConfigFileError", PyExc_FileNotFoundError);
    py::register_exception<ConfigParseError>(m, "ConfigParseError", PyExc_ValueError);
    py::register_exception<SingularMatrixError>(m, "SingularMatrixError", PyExc_ArithmeticError);
    py::register_exception<InsufficientDataError>(m, "InsufficientDataError", PyExc_ValueError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

    py::class_<TopologyMatrices>(m, "TopologyMatrices")
        .def_readonly("n_followers", &TopologyMatrices::n_followers)
        .def_readonly("adjacency", &TopologyMatrices::adjacency)
        .def_readonly("pinning", &TopologyMatrices::pinning)
        .def_readonly("degree", &TopologyMatrices::degree)
        .def_readonly("laplacian", &TopologyMatrices::laplacian)
        .def_readonly("grounded", &TopologyMatrices::grounded);

    m.def("build_topology", &build_topology, py::arg("adjacency"), py::arg("pinning"));
    m.def("has_leader_rooted_spanning_tree", &has_leader_rooted_spanning_tree);
    m.def("is_balanced", &is_balanced, py::arg("topology"), py::arg("tol") = 1e-12);
    m.def("topology_report", &topology_report);

    m.def("invert", &invert);
    m.def("eigenvalues", &eigenvalues);
    m.def("infinity_norm", &infinity_norm);
    m.def(
        "rk4_step",
        [](const std::function<Vector(double, const Vector&)>& f, double t, const Vector& x,
           double dt) { return rk4_step(f, t, x, dt); },
        py::arg("deriv"), py::arg("t"), py::arg("x"), py::arg("dt"));

    py::enum_<DisturbanceKind>(m, "DisturbanceKind")
        .value("none", DisturbanceKind::none)
        .value("matched", DisturbanceKind::matched)
        .value("mismatched", DisturbanceKind::mismatched);

    py::class_<DisturbanceSpec>(m, "DisturbanceSpec")
        .def(py::init<>())
        .def(py::init([](double amplitude, DisturbanceKind kind) {
                 return DisturbanceSpec{amplitude, kind};
             }),
             py::arg("amplitude"), py::arg("kind") = DisturbanceKind::none)
        .def_readwrite("amplitude", &DisturbanceSpec::amplitude)
        .def_readwrite("kind", &DisturbanceSpec::kind);

    m.def("disturbance_signal", &disturbance_signal, py::arg("spec"), py::arg("t"));
    m.def("leader_u0", &leader_u0, py::arg("t"));

    py::class_<AgentModel>(m, "AgentModel")
        .def_readonly("id", &AgentModel::id)
        .def_readonly("name", &AgentModel::name)
        .def_readwrite("disturbance", &AgentModel::disturbance);

    m.def("make_agent_model", &make_agent_model, py::arg("name"), py::arg("id"));
    m.def("known_model_names", &known_model_names);
    m.def("eval_dynamics", &eval_dynamics, py::arg("model"), py::arg("t"), py::arg("x"),
          py::arg("u"), py::arg("disturb_on"));
    m.def("lipschitz_probe", &lipschitz_probe, py::arg("model"), py::arg("x_lo"), py::arg("x_hi"),
          py::arg("t_lo"), py::arg("t_hi"), py::arg("samples"), py::arg("seed"));

    py::class_<ControllerParams>(m, "ControllerParams")
        .def(py::init<>())
        .def_readwrite("K", &ControllerParams::K)
        .def_readwrite("tau", &ControllerParams::tau)
        .def_readwrite("gamma1", &ControllerParams::gamma1)
        .def_readwrite("gamma2", &ControllerParams::gamma2)
        .def_readwrite("c0", &ControllerParams::c0)
        .def_readwrite("c1", &ControllerParams::c1)
        .def_readwrite("beta", &ControllerParams::beta)
        .def_readwrite("assumed_disturbance", &ControllerParams::assumed_disturbance)
        .def("validate", &ControllerParams::validate, py::arg("n_followers"));

    py::class_<FormationSpec>(m, "FormationSpec")
        .def(py::init<>())
        .def(py::init([](const Vector& offsets) { return FormationSpec{offsets}; }),
             py::arg("offsets"))
        .def_readwrite("offsets", &FormationSpec::offsets);

    m.def("tracking_error", &tracking_error, py::arg("x"), py::arg("x0"), py::arg("formation"));
    m.def("sliding_surface", &sliding_surface, py::arg("grounded"), py::arg("e"));
    m.def("trigger_value", &trigger_value, py::arg("e_i"), py::arg("edot_i"), py::arg("t"),
          py::arg("params"));
    m.def("should_trigger", &should_trigger, py::arg("g"));

    py::class_<Snapshot>(m, "Snapshot")
        .def(py::init<>())
        .def_readwrite("t", &Snapshot::t)
        .def_readwrite("sigma", &Snapshot::sigma)
        .def_readwrite("x", &Snapshot::x)
        .def_readwrite("x0", &Snapshot::x0)
        .def_readwrite("u0", &Snapshot::u0)
        .def_readwrite("assumed_disturbance", &Snapshot::assumed_disturbance);

    m.def("control_update", &control_update, py::arg("agent"), py::arg("snapshot"),
          py::arg("h_inv"), py::arg("followers"), py::arg("leader"), py::arg("params"),
          py::arg("coupled_feedforward") = false);

    py::class_<ReachingReport>(m, "ReachingReport")
        .def_readonly("eta_measured", &ReachingReport::eta_measured)
        .def_readonly("violations", &ReachingReport::violations)
        .def_readonly("samples_checked", &ReachingReport::samples_checked)
        .def_readonly("band", &ReachingReport::band);

    m.def("reaching_check", &reaching_check, py::arg("sigma_trace"), py::arg("v_trace"),
          py::arg("dt"), py::arg("band"));

    py::class_<GainReport>(m, "GainReport")
        .def_readonly("K", &GainReport::K)
        .def_readonly("S", &GainReport::S)
        .def_readonly("adequate", &GainReport::adequate)
        .def_readonly("samples", &GainReport::samples);

    py::class_<SimConfig>(m, "SimConfig")
        .def(py::init<>())
        .def_readwrite("adjacency", &SimConfig::adjacency)
        .def_readwrite("pinning", &SimConfig::pinning)
        .def_readwrite("leader_model", &SimConfig::leader_model)
        .def_readwrite("follower_models", &SimConfig::follower_models)
        .def_readwrite("params", &SimConfig::params)
        .def_readwrite("formation", &SimConfig::formation)
        .def_readwrite("disturbances", &SimConfig::disturbances)
        .def_readwrite("leader_disturbance", &SimConfig::leader_disturbance)
        .def_readwrite("leader_initial", &SimConfig::leader_initial)
        .def_readwrite("follower_initial", &SimConfig::follower_initial)
        .def_readwrite("dt", &SimConfig::dt)
        .def_readwrite("t_end", &SimConfig::t_end)
        .def_readwrite("seed", &SimConfig::seed)
        .def_readwrite("oracle_disturbance", &SimConfig::oracle_disturbance)
        .def_readwrite("force_trigger_every_step", &SimConfig::force_trigger_every_step)
        .def_readwrite("edot_backward_difference", &SimConfig::edot_backward_difference)
        .def_readwrite("coupled_feedforward", &SimConfig::coupled_feedforward)
        .def_readwrite("reaching_band", &SimConfig::reaching_band)
        .def("validate", &SimConfig::validate);

    py::class_<AgentEventStats>(m, "AgentEventStats")
        .def_readonly("count", &AgentEventStats::count)
        .def_readonly("has_intervals", &AgentEventStats::has_intervals)
        .def_readonly("min_gap", &AgentEventStats::min_gap)
        .def_readonly("mean_gap", &AgentEventStats::mean_gap)
        .def_readonly("max_gap", &AgentEventStats::max_gap);

    py::class_<InterEventStats>(m, "InterEventStats")
        .def_readonly("per_agent", &InterEventStats::per_agent)
        .def_readonly("total_events", &InterEventStats::total_events)
        .def_readonly("total_steps", &InterEventStats::total_steps)
        .def_readonly("events_to_steps_ratio", &InterEventStats::events_to_steps_ratio)
        .def_readonly("min_gap_at_least_dt", &InterEventStats::min_gap_at_least_dt);

    py::class_<Diagnostics>(m, "Diagnostics")
        .def_readonly("lambda2", &Diagnostics::lambda2)
        .def_readonly("beta_in_range", &Diagnostics::beta_in_range)
        .def_readonly("warnings", &Diagnostics::warnings)
        .def_readonly("lipschitz_estimate", &Diagnostics::lipschitz_estimate)
        .def_readonly("f_tilde", &Diagnostics::f_tilde)
        .def_readonly("reaching", &Diagnostics::reaching)
        .def_readonly("gain", &Diagnostics::gain)
        .def_readonly("events", &Diagnostics::events)
        .def_readonly("max_events_per_second_late", &Diagnostics::max_events_per_second_late)
        .def_readonly("trigger_quantization", &Diagnostics::trigger_quantization)
        .def_readonly("max_hold_error", &Diagnostics::max_hold_error);

    py::class_<EventLog>(m, "EventLog").def_readonly("instants", &EventLog::instants);

    py::class_<TrajectoryLog>(m, "TrajectoryLog")
        .def("__len__", [](const TrajectoryLog& log) { return log.steps.size(); })
        .def("times", [](const TrajectoryLog& log) { return scalar_column(log, &StepRecord::t); })
        .def("leader_states",
             [](const TrajectoryLog& log) { return scalar_column(log, &StepRecord::x0); })
        .def("states", [](const TrajectoryLog& log) { return stack_rows(log, &StepRecord::x); })
        .def("controls", [](const TrajectoryLog& log) { return stack_rows(log, &StepRecord::u); })
        .def("sigmas", [](const TrajectoryLog& log) { return stack_rows(log, &StepRecord::sigma); })
        .def("errors", [](const TrajectoryLog& log) { return stack_rows(log, &StepRecord::e); })
        .def("lyapunov",
             [](const TrajectoryLog& log) { return scalar_column(log, &StepRecord::v); })
        .def("disturbances",
             [](const TrajectoryLog& log) { return stack_rows(log, &StepRecord::disturbance); });

    py::class_<RunResult>(m, "RunResult")
        .def_readonly("topology", &RunResult::topology)
        .def_readonly("trajectory", &RunResult::trajectory)
        .def_readonly("events", &RunResult::events)
        .def_readonly("diagnostics", &RunResult::diagnostics);

    m.def("run", &run, py::arg("config"), py::call_guard<py::gil_scoped_release>());
    m.def("inter_event_stats", &inter_event_stats, py::arg("events"), py::arg("dt"),
          py::arg("total_steps"));
    m.def("formation_error_trace", &formation_error_trace, py::arg("log"), py::arg("formation"));

    m.def("preset_names", [] { return preset_names(); });
    m.def("is_preset", &is_preset);
    m.def("preset", &preset, py::arg("name"));
    m.def("parse_config", &parse_config, py::arg("path"));
    m.def("parse_config_text", &parse_config_text, py::arg("text"));
    m.def("config_to_json", &config_to_json, py::arg("config"));
    m.def("emit_csv", &emit_csv, py::arg("result"), py::arg("out_dir"));
    m.def("csv_precision", &csv_precision);
}
