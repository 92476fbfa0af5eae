#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hsm5/simulator.hpp"

namespace hsm5 {

// CL file: `$$` comment header with tool and strategy parameters, a
// `$$ PATH` marker per path and one `GOTO/ x,y,z, i,j,k` record per posture
// (C_L position, unit tool axis).
void write_cl(std::ostream& os, const ToolPath& toolpath);

struct ClFile {
  std::optional<CutterGeometry> tool;
  std::vector<std::vector<PartPose>> paths;
};

/// Throws Error(Io) with the line number on a malformed GOTO record.
ClFile read_cl(std::istream& is);

enum class FeedMode {
  InverseTime,     // G93, F = 1/block minutes
  UnitsPerMinute,  // G94, F = programmed feedrate
};

// One path of joint targets with the inverse-time value of each record
// (record i moves from pose i-1 to pose i; record 0 is the start).
struct JointBlockPath {
  std::vector<JointPose> poses;
  std::vector<double> lengths;  // mm, relative path length per record
};

/// ISO 6983 program: header (mm, absolute, inverse time on), a rapid to each
/// path start, one `N<k> G01 X.. Y.. Z.. A.. C.. F..` block per segment, and a
/// footer restoring units-per-minute feed. Zero-length records are merged
/// into the following block (or the preceding one at a path end).
std::string emit_gcode(const std::vector<JointBlockPath>& paths, double feedrate,
                       FeedMode mode = FeedMode::InverseTime);

/// Joint paths from an NC program written by emit_gcode: every G00 starts a
/// path, G01 blocks extend it.
std::vector<std::vector<JointPose>> read_nc(std::istream& is);

/// `path,sample,block_len_mm,dt_s,vx,vy,vz,vA_rpm,vC_rpm,sat_A,sat_C,F_eff`
void write_report_csv(std::ostream& os, const KinematicProfile& profile);

/// Fixed-point formatting with negative zero folded to zero.
std::string fixed(double value, int decimals);

}  // namespace hsm5
