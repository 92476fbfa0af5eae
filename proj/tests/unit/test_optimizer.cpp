#include <doctest.h>

#include <set>

#include "hsm5/optimizer.hpp"

using namespace hsm5;

namespace {

struct Scenario {
  ParametricSurface surface = ParametricSurface::saddle(50, 50, 20);
  MachiningStrategy strategy;
  MachineModel machine;
  ToolPath toolpath;
  Scenario() { toolpath = generate(surface, strategy, CutterGeometry{}, initial_field(surface, strategy)); }
};

const Scenario& saddle() {
  static const Scenario s;
  return s;
}

}  // namespace

TEST_CASE("unsaturated input is returned unchanged") {
  const ParametricSurface flat =
      ParametricSurface::patch(1, 1, {{-50, -50, 0}, {-50, 50, 0}, {50, -50, 0}, {50, 50, 0}});
  MachiningStrategy st;
  st.plane_angle = 0;
  const ToolPath tp = generate(flat, st, CutterGeometry{}, initial_field(flat, st));
  const OptimizationResult r = optimize_tilt(flat, tp, MachineModel{}, 5000, OptimizeOptions{});
  CHECK(r.iterations == 0);
  CHECK(r.deformations.empty());
  CHECK(r.toolpath.field == tp.field);
  CHECK(r.toolpath.paths.size() == tp.paths.size());
  CHECK(r.after.saturated_blocks == 0);
}

TEST_CASE("base-only candidate list cannot change anything") {
  const Scenario& s = saddle();
  OptimizeOptions opt;
  opt.candidates = {1.0};
  opt.max_iterations = 5;
  const OptimizationResult r = optimize_tilt(s.surface, s.toolpath, s.machine, 5000, opt);
  CHECK(r.deformations.empty());
  CHECK(r.toolpath.field == s.toolpath.field);
  CHECK(r.after.saturated_blocks == r.before.saturated_blocks);
  CHECK(r.after[Axis::C].blocks > 0);
}

TEST_CASE("candidates must be sorted") {
  const Scenario& s = saddle();
  OptimizeOptions opt;
  opt.candidates = {5.0, 1.0};
  CHECK_THROWS(optimize_tilt(s.surface, s.toolpath, s.machine, 5000, opt));
}

TEST_CASE("5 degree deformation loop on the saddle") {
  const Scenario& s = saddle();
  OptimizeOptions opt;
  opt.candidates = {1.0, 5.0};
  opt.tighten = false;
  const OptimizationResult r = optimize_tilt(s.surface, s.toolpath, s.machine, 5000, opt);
  CHECK(r.before[Axis::C].blocks > 0);
  CHECK(r.after[Axis::C].blocks < r.before[Axis::C].blocks);
  CHECK(r.after[Axis::A].max_abs <= 15.0);
  CHECK(r.gouges_after <= r.gouges_before);
  REQUIRE(!r.deformations.empty());
  // Accepted steps strictly improve.
  for (const Deformation& d : r.deformations) CHECK(d.saturated_after < d.saturated_before);
  // The first deformation is blended onto its neighbours.
  const FieldRegion& first = r.deformations.front().region;
  std::set<int> band;
  for (int row : r.deformed_rows(s.toolpath.field)) band.insert(row);
  CHECK(band.count(first.path_first - 1));
  CHECK(band.count(first.path_first));
  CHECK(band.count(first.path_last + 1));
}

TEST_CASE("default optimization never ends worse than it started") {
  const Scenario& s = saddle();
  OptimizeOptions opt;
  opt.max_iterations = 8;
  const OptimizationResult r = optimize_tilt(s.surface, s.toolpath, s.machine, 5000, opt);
  CHECK(r.after.saturated_blocks < r.before.saturated_blocks);
  CHECK(r.after[Axis::A].max_abs <= 15.0);
  CHECK(r.gouges_after <= r.gouges_before);
  CHECK(r.tightening.residual <= opt.scallop_tol);
}
