// Python bindings: load instances, run strategies, verify and print plans.

#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "percplan/bench.hpp"
#include "percplan/instance_io.hpp"
#include "percplan/strategies.hpp"

namespace py = pybind11;
using namespace percplan;

namespace {

Strategy strategy_arg(const std::string& name) {
  const auto s = parse_strategy(name);
  if (!s) throw py::value_error("unknown strategy '" + name + "'");
  return *s;
}

PlanTask task_arg(const std::string& text) {
  const auto t = parse_task(text);
  if (!t) throw py::value_error("bad task '" + text + "'");
  return *t;
}

std::chrono::milliseconds budget_arg(double seconds) {
  if (!(seconds > 0.0)) throw py::value_error("budget must be positive");
  return std::chrono::milliseconds(static_cast<long long>(seconds * 1000.0));
}

using StepTuple = std::tuple<std::string, std::string, std::string>;

std::vector<StepTuple> steps_of(const Plan& plan) {
  std::vector<StepTuple> out;
  for (const MoveAction& a : plan.steps) {
    out.emplace_back(a.obj.name, entity_name(a.dest), std::string(to_string(a.orient)));
  }
  return out;
}

Plan plan_from(const std::vector<StepTuple>& steps) {
  Plan plan;
  for (const auto& [obj, dest, orient] : steps) {
    const auto r = parse_orientation(orient);
    if (!r) throw py::value_error("unknown orientation '" + orient + "'");
    plan.steps.push_back({ObjectId{obj}, parse_entity(dest), *r});
  }
  return plan;
}

}  // namespace

PYBIND11_MODULE(_percplan, m) {
  m.doc() = "Task planning with lazily queried perception";

  static py::exception<ParseError> parse_error(m, "ParseError", PyExc_ValueError);
  static py::exception<DomainError> domain_error(m, "DomainError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ParseError& e) {
      py::set_error(parse_error, e.what());
    } catch (const DomainError& e) {
      py::set_error(domain_error, e.what());
    }
  });

  py::class_<Plan>(m, "Plan")
      .def(py::init(&plan_from), py::arg("steps"))
      .def_property_readonly("steps", &steps_of)
      .def("__len__", &Plan::length)
      .def("__str__", &render_plan)
      .def("__repr__", [](const Plan& p) {
        return "<Plan with " + std::to_string(p.length()) + " steps>";
      })
      .def(py::self == py::self);

  py::class_<LoadedInstance>(m, "Instance")
      .def_readonly("id", &LoadedInstance::id)
      .def_property(
          "maxstep", [](const LoadedInstance& i) { return i.horizon.maxstep; },
          [](LoadedInstance& i, int n) {
            if (n < 0 || n > Horizon::kCap) throw py::value_error("maxstep out of range");
            i.horizon.maxstep = n;
          })
      .def_property_readonly("object_count",
                             [](const LoadedInstance& i) { return i.scene.objects.size(); })
      .def_property_readonly("object_names", [](const LoadedInstance& i) {
        std::vector<std::string> names;
        for (const ObjectId& o : bottom_up(i.scene, i.task).objects()) {
          names.push_back(o.name);
        }
        return names;
      });

  py::class_<RunOutcome>(m, "RunOutcome")
      .def_readonly("feasible_plans", &RunOutcome::feasible_plans)
      .def_readonly("infeasible_count", &RunOutcome::infeasible_count)
      .def_readonly("query_count", &RunOutcome::query_count)
      .def_readonly("timed_out", &RunOutcome::timed_out)
      .def_readonly("horizon_exhausted", &RunOutcome::horizon_exhausted)
      .def_property_readonly("wall_ms", [](const RunOutcome& o) {
        return o.wall_time.count() / 1000.0;
      });

  py::class_<RunMetrics>(m, "RunMetrics")
      .def_readonly("instance", &RunMetrics::instance)
      .def_property_readonly("strategy",
                             [](const RunMetrics& r) { return std::string(to_string(r.strategy)); })
      .def_property_readonly("task", [](const RunMetrics& r) { return to_string(r.task); })
      .def_property_readonly("timed_out", &RunMetrics::timed_out)
      .def_property_readonly("mean_queries", &RunMetrics::mean_queries)
      .def_property_readonly("mean_feasible", &RunMetrics::mean_feasible)
      .def_property_readonly("mean_infeasible", &RunMetrics::mean_infeasible)
      .def_property_readonly("mean_wall_ms", &RunMetrics::mean_wall_ms);

  m.def("load_instance", &load_instance, py::arg("instance_path"), py::arg("catalog_path"),
        "Reads an instance file and a shape catalog.");
  m.def("make_instance", &make_instance, py::arg("id"), py::arg("instance_text"),
        py::arg("catalog_text"), "Same as load_instance, from text.");

  m.def(
      "run_strategy",
      [](const LoadedInstance& inst, const std::string& strategy, const std::string& task,
         double budget_secs) {
        RunOptions options;
        options.task = task_arg(task);
        options.budget = budget_arg(budget_secs);
        const Strategy s = strategy_arg(strategy);
        py::gil_scoped_release release;
        return run_strategy(s, inst, options);
      },
      py::arg("instance"), py::arg("strategy"), py::arg("task") = "first",
      py::arg("budget_secs") = 2000.0,
      "Runs none, pre, filt or repl for task 'first' or 'count:N'.");

  m.def(
      "run_experiment",
      [](const LoadedInstance& inst, const std::string& strategy, const std::string& task,
         double budget_secs, std::size_t runs) {
        const Strategy s = strategy_arg(strategy);
        const PlanTask t = task_arg(task);
        py::gil_scoped_release release;
        return run_experiment(inst, s, t, budget_arg(budget_secs), runs);
      },
      py::arg("instance"), py::arg("strategy"), py::arg("task") = "first",
      py::arg("budget_secs") = 2000.0, py::arg("runs") = 5);

  m.def(
      "emit_report",
      [](const std::vector<RunMetrics>& rows, const std::string& format) {
        const auto f = parse_report_format(format);
        if (!f) throw py::value_error("unknown report format '" + format + "'");
        return emit_report(rows, *f);
      },
      py::arg("rows"), py::arg("format") = "table");

  m.def(
      "verify_plan",
      [](const LoadedInstance& inst, const Plan& plan) {
        PerceptView view = bottom_up(inst.scene, inst.task);
        const OcclusionRelation occl = occlusion_of(inst.scene);
        const FeasibilityVerdict v =
            verify_plan(plan, view.initial_state(), view, inst.catalog, occl, inst.config);
        std::vector<std::string> reasons;
        for (const FailureReason& r : v.reasons) {
          reasons.push_back(std::to_string(r.step) + ": " +
                            (r.query ? to_string(*r.query) : r.detail));
        }
        return py::make_tuple(v.feasible(), reasons, view.ledger().count());
      },
      py::arg("instance"), py::arg("plan"),
      "Returns (feasible, reasons, query_count) for a fresh perception view.");

  m.def("render_plan", &render_plan, py::arg("plan"));
  m.def("parse_plan", &parse_plan, py::arg("text"));
}
