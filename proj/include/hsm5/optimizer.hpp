#pragma once

#include <vector>

#include "hsm5/scallop.hpp"
#include "hsm5/simulator.hpp"

namespace hsm5 {

struct OptimizeOptions {
  std::vector<double> candidates{1.0, 2.0, 3.0, 5.0, 8.0};  // deg, ascending; [0] is the base tilt
  double scallop_tol = 0.002;                               // mm
  BlendHalfwidth halfwidth{1, 8};
  int max_iterations = 30;
  bool tighten = true;
  // Score trials including the saturated blocks on the passes tightening
  // will insert, so the finished toolpath never saturates more than the input.
  bool account_tightening = true;
  std::size_t workers = 1;
};

struct Deformation {
  FieldRegion region;
  double tilt = 0.0;
  int saturated_before = 0;  // total saturated records before this step
  int saturated_after = 0;
};

struct OptimizationResult {
  ToolPath toolpath;             // final (tightened when enabled)
  KinematicProfile profile;      // of the final toolpath
  SaturationReport before;
  SaturationReport after;
  std::vector<Deformation> deformations;
  int iterations = 0;
  TightenResult tightening;      // levels/inserted/residual; its toolpath is moved into `toolpath`
  int gouges_before = 0;
  int gouges_after = 0;

  /// Distinct field rows whose nodes differ from the input field.
  std::vector<int> deformed_rows(const OrientationField& original) const;
};

/// Scans candidate tilts over the worst saturated region, deforming the
/// orientation field there and accepting only a strict decrease of the total
/// saturated record count without new gouge flags. Regions with no improving
/// candidate are left as they are. Finishes with scallop tightening.
OptimizationResult optimize_tilt(const ParametricSurface& surface, const ToolPath& toolpath,
                                 const MachineModel& machine, double feedrate, const OptimizeOptions& options);

}  // namespace hsm5
