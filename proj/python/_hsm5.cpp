#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "hsm5/job.hpp"

namespace py = pybind11;
using namespace hsm5;

namespace {

std::string cl_text(const ToolPath& tp) {
  std::ostringstream os;
  write_cl(os, tp);
  return os.str();
}

std::vector<std::vector<JointPose>> nc_joints(const std::string& text) {
  std::istringstream in(text);
  return read_nc(in);
}

ToolPath build_toolpath(const ParametricSurface& s, const MachiningStrategy& st, const CutterGeometry& tool,
                        std::size_t workers) {
  return generate(s, st, tool, initial_field(s, st), workers);
}

}  // namespace

PYBIND11_MODULE(_hsm5, m) {
  m.doc() = "Five-axis HSM toolpath engine";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", error.ptr());
  py::register_exception<GeometryError>(m, "GeometryError", error.ptr());
  py::register_exception<UnreachablePoseError>(m, "UnreachablePoseError", error.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", error.ptr());

  py::class_<SurfacePoint>(m, "SurfacePoint")
      .def_readonly("p", &SurfacePoint::p)
      .def_readonly("su", &SurfacePoint::su)
      .def_readonly("sv", &SurfacePoint::sv)
      .def_readonly("suu", &SurfacePoint::suu)
      .def_readonly("suv", &SurfacePoint::suv)
      .def_readonly("svv", &SurfacePoint::svv);

  py::class_<ParametricSurface>(m, "Surface")
      .def_static("saddle", &ParametricSurface::saddle, py::arg("a"), py::arg("b"), py::arg("c"))
      .def_static("patch", &ParametricSurface::patch, py::arg("degree_u"), py::arg("degree_v"),
                  py::arg("control_net"))
      .def("evaluate", &ParametricSurface::evaluate, py::arg("u"), py::arg("v"))
      .def("normal", py::overload_cast<double, double>(&ParametricSurface::normal, py::const_), py::arg("u"),
           py::arg("v"))
      .def("domain", [](const ParametricSurface& s) {
        const Domain& d = s.domain();
        return py::make_tuple(d.u_min, d.u_max, d.v_min, d.v_max);
      });

  m.def("normal_curvature", py::overload_cast<const ParametricSurface&, double, double, const Vec3&>(&normal_curvature),
        py::arg("surface"), py::arg("u"), py::arg("v"), py::arg("direction"));

  py::class_<CurveSample>(m, "CurveSample")
      .def_readonly("u", &CurveSample::u)
      .def_readonly("v", &CurveSample::v)
      .def_readonly("p", &CurveSample::p);
  py::class_<PlaneCurve>(m, "PlaneCurve")
      .def_readonly("samples", &PlaneCurve::samples)
      .def("length", &PlaneCurve::length);
  py::class_<IntersectionResult>(m, "IntersectionResult")
      .def_readonly("branches", &IntersectionResult::branches)
      .def_readonly("degenerate", &IntersectionResult::degenerate);
  m.def(
      "plane_intersection",
      [](const ParametricSurface& s, const Vec3& point, const Vec3& normal, double chord_tol, double max_step) {
        MarchOptions opt;
        opt.chord_tol = chord_tol;
        opt.max_step = max_step;
        return plane_intersection(s, Plane{point, normal.normalized()}, opt);
      },
      py::arg("surface"), py::arg("point"), py::arg("normal"), py::arg("chord_tol") = 0.005,
      py::arg("max_step") = 1.0);

  py::class_<CutterGeometry>(m, "Cutter")
      .def(py::init([](double R, double r) { return CutterGeometry{R, r}; }), py::arg("R") = 9.0, py::arg("r") = 1.0)
      .def_readwrite("R", &CutterGeometry::R)
      .def_readwrite("r", &CutterGeometry::r);

  m.def("effective_radius", &effective_radius, py::arg("tool"), py::arg("tilt_deg"), py::arg("yaw_deg") = 0.0);
  m.def("scallop_height", &scallop_height, py::arg("r_left"), py::arg("r_right"), py::arg("stepover"));

  py::class_<MachiningStrategy>(m, "Strategy")
      .def(py::init<>())
      .def_readwrite("plane_angle", &MachiningStrategy::plane_angle)
      .def_readwrite("stepover", &MachiningStrategy::stepover)
      .def_readwrite("chord_tol", &MachiningStrategy::chord_tol)
      .def_readwrite("max_sample_spacing", &MachiningStrategy::max_sample_spacing)
      .def_readwrite("base_tilt", &MachiningStrategy::base_tilt)
      .def_readwrite("base_yaw", &MachiningStrategy::base_yaw)
      .def_readwrite("scallop_tol", &MachiningStrategy::scallop_tol)
      .def_readwrite("tilt_min", &MachiningStrategy::tilt_min)
      .def_readwrite("tilt_max", &MachiningStrategy::tilt_max)
      .def_readwrite("zigzag", &MachiningStrategy::zigzag);

  py::class_<CutterLocation>(m, "CutterLocation")
      .def_readonly("cc", &CutterLocation::cc)
      .def_readonly("cl", &CutterLocation::cl)
      .def_readonly("axis", &CutterLocation::axis)
      .def_readonly("tilt", &CutterLocation::tilt)
      .def_readonly("yaw", &CutterLocation::yaw);
  py::class_<Path>(m, "Path")
      .def_readonly("offset", &Path::offset)
      .def_readonly("row", &Path::row)
      .def_readonly("level", &Path::level)
      .def_readonly("postures", &Path::postures);
  py::class_<ToolPath>(m, "ToolPath")
      .def_readonly("paths", &ToolPath::paths)
      .def("to_cl", &cl_text)
      .def("max_scallop", [](const ToolPath& tp) { return max_scallop(tp); });
  m.def("generate", &build_toolpath, py::arg("surface"), py::arg("strategy") = MachiningStrategy{},
        py::arg("tool") = CutterGeometry{}, py::arg("workers") = 1);

  py::class_<JointPose>(m, "JointPose")
      .def(py::init([](double x, double y, double z, double a, double c) { return JointPose{x, y, z, a, c}; }),
           py::arg("x") = 0.0, py::arg("y") = 0.0, py::arg("z") = 0.0, py::arg("a") = 0.0, py::arg("c") = 0.0)
      .def_readwrite("x", &JointPose::x)
      .def_readwrite("y", &JointPose::y)
      .def_readwrite("z", &JointPose::z)
      .def_readwrite("a", &JointPose::a)
      .def_readwrite("c", &JointPose::c)
      .def("__repr__", [](const JointPose& q) {
        std::ostringstream os;
        os << "JointPose(x=" << q.x << ", y=" << q.y << ", z=" << q.z << ", a=" << q.a << ", c=" << q.c << ")";
        return os.str();
      });

  py::class_<MachineModel>(m, "Machine")
      .def(py::init<>())
      .def_readwrite("va", &MachineModel::va)
      .def_readwrite("vc", &MachineModel::vc)
      .def_readwrite("o_ca", &MachineModel::o_ca)
      .def_readwrite("o_am", &MachineModel::o_am)
      .def_readwrite("singularity_threshold", &MachineModel::singularity_threshold);

  m.def(
      "forward",
      [](const JointPose& q, const MachineModel& machine) {
        const PartPose p = forward(q, machine);
        return py::make_tuple(p.p, p.u);
      },
      py::arg("joints"), py::arg("machine"));
  m.def(
      "inverse",
      [](const Vec3& p, const Vec3& u, const MachineModel& machine, std::optional<JointPose> prev) {
        return inverse(PartPose{p, u.normalized()}, machine, prev).pose;
      },
      py::arg("point"), py::arg("axis"), py::arg("machine"), py::arg("prev") = py::none());
  m.def("relative_path_length",
        py::overload_cast<const JointPose&, const JointPose&, const MachineModel&>(&relative_path_length),
        py::arg("q0"), py::arg("q1"), py::arg("machine"));

  py::class_<KinematicProfile>(m, "KinematicProfile")
      .def_readonly("time_programmed", &KinematicProfile::time_programmed)
      .def_readonly("time_effective", &KinematicProfile::time_effective)
      .def("block_count", &KinematicProfile::block_count)
      .def("saturated_blocks", [](const KinematicProfile& p, const std::string& axis) {
        for (Axis a : kAllAxes) {
          if (axis == axis_name(a)) return p.saturated_blocks(a);
        }
        throw DomainError("unknown axis '" + axis + "'");
      });
  m.def("simulate", &simulate, py::arg("toolpath"), py::arg("machine"), py::arg("feedrate"), py::arg("workers") = 1);
  m.def("read_nc", &nc_joints, py::arg("text"));

  py::class_<JobConfig>(m, "JobConfig")
      .def_readwrite("feedrate", &JobConfig::feedrate)
      .def_readwrite("strategy", &JobConfig::strategy)
      .def_readwrite("tool", &JobConfig::tool)
      .def_readwrite("machine", &JobConfig::machine)
      .def("surface", [](const JobConfig& j) { return j.surface.build(); });
  m.def("parse_config", &parse_config, py::arg("text"));
  m.def("load_config", &load_config, py::arg("path"));

  py::class_<RunSummary>(m, "RunSummary")
      .def_readonly("paths", &RunSummary::paths)
      .def_readonly("postures", &RunSummary::postures)
      .def_readonly("time_programmed", &RunSummary::time_programmed)
      .def_readonly("time_effective", &RunSummary::time_effective)
      .def_readonly("max_scallop", &RunSummary::max_scallop)
      .def_readonly("violations", &RunSummary::violations)
      .def_readonly("deformed_rows", &RunSummary::deformed_rows)
      .def_property_readonly("saturated_before", [](const RunSummary& s) { return s.before.saturated_blocks; })
      .def_property_readonly("saturated_after", [](const RunSummary& s) { return s.after.saturated_blocks; })
      .def_readonly("text", &RunSummary::text);
  m.def(
      "run",
      [](const JobConfig& job, const std::string& out_dir, bool optimize, std::size_t workers) {
        RunOptions opt;
        opt.out_dir = out_dir;
        opt.optimize = optimize;
        opt.workers = workers;
        py::gil_scoped_release release;
        return run(job, opt);
      },
      py::arg("job"), py::arg("out_dir"), py::arg("optimize") = true, py::arg("workers") = 1);
}
