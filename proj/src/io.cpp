#include "hsm5/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace hsm5 {

std::string fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  std::string s(buf);
  if (s[0] == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

void write_cl(std::ostream& os, const ToolPath& tp) {
  const MachiningStrategy& s = tp.strategy;
  os << "$$ hsm5 cutter location file\n";
  os << "$$ TOOL R=" << fixed(tp.tool.R, 6) << " r=" << fixed(tp.tool.r, 6) << "\n";
  os << "$$ STRATEGY plane_angle=" << fixed(s.plane_angle, 6) << " stepover=" << fixed(s.stepover, 6)
     << " chord_tol=" << fixed(s.chord_tol, 6) << " max_sample_spacing=" << fixed(s.max_sample_spacing, 6)
     << " base_tilt=" << fixed(s.base_tilt, 6) << " base_yaw=" << fixed(s.base_yaw, 6)
     << " scallop_tol=" << fixed(s.scallop_tol, 6) << " zigzag=" << (s.zigzag ? 1 : 0) << "\n";
  for (std::size_t p = 0; p < tp.paths.size(); ++p) {
    const Path& path = tp.paths[p];
    os << "$$ PATH " << p << " OFFSET " << fixed(path.offset, 6) << " ROW " << fixed(path.row, 6) << " LEVEL "
       << path.level << "\n";
    for (const CutterLocation& loc : path.postures) {
      os << "GOTO/ " << fixed(loc.cl.x(), 6) << "," << fixed(loc.cl.y(), 6) << "," << fixed(loc.cl.z(), 6) << ", "
         << fixed(loc.axis.x(), 9) << "," << fixed(loc.axis.y(), 9) << "," << fixed(loc.axis.z(), 9) << "\n";
    }
  }
}

ClFile read_cl(std::istream& is) {
  ClFile out;
  std::string line;
  int line_no = 0;
  bool open_path = false;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.rfind("$$", 0) == 0) {
      std::istringstream ls(line.substr(2));
      std::string word;
      ls >> word;
      if (word == "PATH") {
        out.paths.emplace_back();
        open_path = true;
      } else if (word == "TOOL") {
        CutterGeometry tool;
        std::string kv;
        while (ls >> kv) {
          if (kv.rfind("R=", 0) == 0) tool.R = std::stod(kv.substr(2));
          else if (kv.rfind("r=", 0) == 0) tool.r = std::stod(kv.substr(2));
        }
        out.tool = tool;
      }
      continue;
    }
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (line.rfind("GOTO/", 0) != 0) {
      throw Error(ErrorKind::Io, "CL line " + std::to_string(line_no) + ": unsupported record");
    }
    std::string body = line.substr(5);
    for (char& ch : body) if (ch == ',') ch = ' ';
    std::istringstream ls(body);
    double v[6];
    for (double& x : v) {
      if (!(ls >> x)) throw Error(ErrorKind::Io, "CL line " + std::to_string(line_no) + ": expected 6 numbers");
    }
    if (!open_path) {
      out.paths.emplace_back();
      open_path = true;
    }
    Vec3 u(v[3], v[4], v[5]);
    out.paths.back().push_back(PartPose{Vec3(v[0], v[1], v[2]), u.normalized()});
  }
  return out;
}

namespace {

std::string joints_words(const JointPose& q) {
  return "X" + fixed(q.x, 4) + " Y" + fixed(q.y, 4) + " Z" + fixed(q.z, 4) + " A" + fixed(q.a, 4) + " C" +
         fixed(q.c, 4);
}

constexpr double kZeroLength = 1e-9;

}  // namespace

std::string emit_gcode(const std::vector<JointBlockPath>& paths, double feedrate, FeedMode mode) {
  std::ostringstream os;
  int n = 0;
  auto block = [&](const std::string& words) { os << "N" << ++n << " " << words << "\n"; };
  os << "%\n(hsm5 five-axis program, inverse-time feed)\n";
  block("G21 G90 G17");
  block(mode == FeedMode::InverseTime ? "G93" : "G94");
  for (const JointBlockPath& path : paths) {
    if (path.poses.empty()) continue;
    block("G00 " + joints_words(path.poses.front()));
    // Segments as (target pose index, accumulated length); zero-length records
    // are folded into the next segment, trailing ones into the previous.
    std::vector<std::pair<std::size_t, double>> segments;
    double pending = 0.0;
    for (std::size_t i = 1; i < path.poses.size(); ++i) {
      pending += path.lengths[i];
      if (path.lengths[i] > kZeroLength) {
        segments.emplace_back(i, pending);
        pending = 0.0;
      }
    }
    if (path.poses.size() > 1 && (segments.empty() || segments.back().first != path.poses.size() - 1)) {
      if (!segments.empty()) segments.back().first = path.poses.size() - 1;
    }
    for (const auto& [target, length] : segments) {
      const double f = mode == FeedMode::InverseTime ? feedrate / length : feedrate;
      block("G01 " + joints_words(path.poses[target]) + " F" + fixed(f, 4));
    }
  }
  block("G94");
  block("M30");
  os << "%\n";
  return os.str();
}

std::vector<std::vector<JointPose>> read_nc(std::istream& is) {
  std::vector<std::vector<JointPose>> out;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line[0] == '%' || line[0] == '(') continue;
    std::map<char, double> words;
    std::vector<int> g_codes;
    std::istringstream ls(line);
    std::string word;
    while (ls >> word) {
      const char letter = static_cast<char>(std::toupper(static_cast<unsigned char>(word[0])));
      try {
        const double value = std::stod(word.substr(1));
        if (letter == 'G') g_codes.push_back(static_cast<int>(value));
        else words[letter] = value;
      } catch (const std::exception&) {
        throw Error(ErrorKind::Io, "NC line " + std::to_string(line_no) + ": bad word '" + word + "'");
      }
    }
    const bool rapid = std::find(g_codes.begin(), g_codes.end(), 0) != g_codes.end();
    const bool linear = std::find(g_codes.begin(), g_codes.end(), 1) != g_codes.end();
    if (!rapid && !linear) continue;
    if (!words.count('X') || !words.count('Y') || !words.count('Z') || !words.count('A') || !words.count('C')) {
      throw Error(ErrorKind::Io, "NC line " + std::to_string(line_no) + ": motion block needs X Y Z A C");
    }
    JointPose q{words['X'], words['Y'], words['Z'], words['A'], words['C']};
    if (rapid || out.empty()) out.emplace_back();
    out.back().push_back(q);
  }
  return out;
}

void write_report_csv(std::ostream& os, const KinematicProfile& profile) {
  os << "path,sample,block_len_mm,dt_s,vx,vy,vz,vA_rpm,vC_rpm,sat_A,sat_C,F_eff\n";
  for (std::size_t p = 0; p < profile.paths.size(); ++p) {
    const auto& blocks = profile.paths[p].blocks;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      const BlockRecord& b = blocks[i];
      os << p << "," << i << "," << fixed(b.length, 6) << "," << fixed(b.dt, 6) << "," << fixed(b.velocity[0], 4)
         << "," << fixed(b.velocity[1], 4) << "," << fixed(b.velocity[2], 4) << "," << fixed(b.velocity[3], 6)
         << "," << fixed(b.velocity[4], 6) << "," << (b.saturated[3] ? 1 : 0) << "," << (b.saturated[4] ? 1 : 0)
         << "," << fixed(b.f_eff, 4) << "\n";
    }
  }
}

}  // namespace hsm5
