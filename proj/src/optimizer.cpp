#include "hsm5/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include "hsm5/parallel.hpp"

namespace hsm5 {
namespace {

int saturated_in(const PathProfile& p) {
  int n = 0;
  for (const BlockRecord& b : p.blocks) n += b.any_saturated() ? 1 : 0;
  return n;
}

int gouges_in(const ToolPath& tp, const ParametricSurface& surface, const std::vector<std::size_t>& paths) {
  ToolPath subset;
  subset.tool = tp.tool;
  for (std::size_t i : paths) subset.paths.push_back(tp.paths[i]);
  return static_cast<int>(gouge_check(subset, surface).size());
}

// Inserted passes are free to run either way and the lead follows the feed,
// so each keeps the direction that saturates less. Returns the saturated
// block count over the inserted passes.
int orient_inserted(const ParametricSurface& surface, ToolPath& tp, const MachineModel& machine, double feedrate,
                    std::size_t workers) {
  std::vector<std::size_t> inserted;
  for (std::size_t i = 0; i < tp.paths.size(); ++i) {
    if (tp.paths[i].level > 0) inserted.push_back(i);
  }
  if (inserted.empty()) return 0;
  ToolPath flipped = tp;
  for (std::size_t i : inserted) flipped.paths[i].reversed = !flipped.paths[i].reversed;
  regenerate_paths(surface, flipped, inserted, workers);
  std::vector<int> count(inserted.size(), 0);
  std::vector<char> use_flipped(inserted.size(), 0);
  parallel_for(inserted.size(), workers, [&](std::size_t k) {
    const std::size_t i = inserted[k];
    const int keep = saturated_in(simulate_path(tp.paths[i], machine, feedrate));
    const int flip = saturated_in(simulate_path(flipped.paths[i], machine, feedrate));
    count[k] = keep;
    if (flip < keep && gouges_in(flipped, surface, {i}) <= gouges_in(tp, surface, {i})) {
      use_flipped[k] = 1;
      count[k] = flip;
    }
  });
  int total = 0;
  for (std::size_t k = 0; k < inserted.size(); ++k) {
    if (use_flipped[k]) tp.paths[inserted[k]] = std::move(flipped.paths[inserted[k]]);
    total += count[k];
  }
  return total;
}

// Saturated blocks on the passes the final tightening would insert between
// the given paths.
int insertion_saturation(const ParametricSurface& surface, const ToolPath& tp, const std::vector<std::size_t>& paths,
                         const MachineModel& machine, double feedrate, double scallop_tol) {
  ToolPath sub = tp;
  sub.paths.clear();
  for (std::size_t i : paths) sub.paths.push_back(tp.paths[i]);
  TightenResult t = tighten(surface, sub, scallop_tol, 3, 1);
  return orient_inserted(surface, t.toolpath, machine, feedrate, 1);
}

struct Trial {
  FieldRegion region{};
  double tilt = 0.0;
  bool valid = false;
  int total = 0;
  ToolPath toolpath;
  std::vector<PathProfile> profiles;  // for `affected`
};

// Deformation placements for one saturated region. Besides the region itself,
// plateaus that start at or just past the velocity peak and run to the end of
// the path in the travel direction: their blend ramp raises the lead along
// the feed across the peak, which slows the rotation of the tool axis there.
std::vector<FieldRegion> placements_for(const SaturatedRegion& r, const ToolPath& tp, const KinematicProfile& profile,
                                        const MachineModel& machine, const FieldRegion& base) {
  const Path& path = tp.paths[r.path];
  const PathProfile& prof = profile.paths[r.path];
  const AxisValues limits = velocity_limits(machine);
  int peak = r.first;
  double peak_ratio = -1.0;
  for (int i = r.first; i <= r.last; ++i) {
    double ratio = 0.0;
    for (Axis a : kAllAxes) ratio = std::max(ratio, std::abs(at(prof.blocks[i].velocity, a)) / at(limits, a));
    if (ratio > peak_ratio) {
      peak_ratio = ratio;
      peak = i;
    }
  }
  const int last_col = tp.field.columns() - 1;
  const bool forward = path.columns.back() >= path.columns.front();
  const double c_peak = path.columns[peak];

  std::vector<FieldRegion> out{base};
  for (int shift : {-4, -2, 0, 2, 4, 6, 8}) {
    FieldRegion fr = base;
    if (forward) {
      fr.sample_first = std::clamp(static_cast<int>(std::ceil(c_peak)) + shift, 0, last_col);
      fr.sample_last = last_col;
    } else {
      fr.sample_first = 0;
      fr.sample_last = std::clamp(static_cast<int>(std::floor(c_peak)) - shift, 0, last_col);
    }
    if (std::none_of(out.begin(), out.end(), [&](const FieldRegion& o) {
          return o.sample_first == fr.sample_first && o.sample_last == fr.sample_last;
        })) {
      out.push_back(fr);
    }
  }
  return out;
}

}  // namespace

std::vector<int> OptimizationResult::deformed_rows(const OrientationField& original) const {
  std::vector<int> rows;
  const OrientationField& f = toolpath.field;
  for (int i = 0; i < f.rows() && i < original.rows(); ++i) {
    for (int j = 0; j < f.columns(); ++j) {
      if (f.node(i, j) != original.node(i, j)) {
        rows.push_back(i);
        break;
      }
    }
  }
  return rows;
}

OptimizationResult optimize_tilt(const ParametricSurface& surface, const ToolPath& toolpath,
                                 const MachineModel& machine, double feedrate, const OptimizeOptions& options) {
  if (options.candidates.empty()) throw DomainError("optimization needs at least one candidate tilt");
  if (!std::is_sorted(options.candidates.begin(), options.candidates.end())) {
    throw DomainError("candidate tilts must be sorted ascending");
  }
  OptimizationResult result;
  ToolPath current = toolpath;
  KinematicProfile profile = simulate(current, machine, feedrate, options.workers);
  result.before = saturation(profile, machine);
  result.gouges_before = static_cast<int>(gouge_check(current, surface).size());
  std::vector<std::size_t> all(current.paths.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  // Totals count the passes tightening will add, so the finished toolpath
  // never saturates more than the input.
  int total = profile.saturated_blocks_any();
  const bool account = options.tighten && options.account_tightening;
  if (account) {
    total += insertion_saturation(surface, current, all, machine, feedrate, options.scallop_tol);
  }

  std::set<std::tuple<int, int, int>> exhausted;
  const int hp = options.halfwidth.paths;

  while (total > 0 && result.iterations < options.max_iterations) {
    // Worst untried region over all axes.
    const SaturationReport report = saturation(profile, machine);
    const SaturatedRegion* worst = nullptr;
    FieldRegion target{};
    for (const AxisSaturation& axis : report.axes) {
      for (const SaturatedRegion& r : axis.regions) {
        const Path& path = current.paths[r.path];
        const int row = static_cast<int>(std::lround(path.row));
        const auto [lo, hi] = std::minmax_element(path.columns.begin() + r.first, path.columns.begin() + r.last + 1);
        FieldRegion fr{row, row, static_cast<int>(std::floor(*lo)), static_cast<int>(std::ceil(*hi))};
        if (exhausted.count({fr.path_first, fr.sample_first, fr.sample_last})) continue;
        if (!worst || r.count > worst->count) {
          worst = &r;
          target = fr;
        }
      }
    }
    if (!worst) break;
    ++result.iterations;

    const std::vector<FieldRegion> placements = placements_for(*worst, current, profile, machine, target);

    std::vector<std::size_t> affected;
    for (std::size_t i = 0; i < current.paths.size(); ++i) {
      if (std::abs(current.paths[i].row - target.path_first) <= hp + 1e-9) affected.push_back(i);
    }
    std::vector<std::size_t> neighbourhood;
    for (std::size_t i = 0; i < current.paths.size(); ++i) {
      if (std::abs(current.paths[i].row - target.path_first) <= hp + 1 + 1e-9) neighbourhood.push_back(i);
    }
    int affected_saturated = 0;
    for (std::size_t i : affected) affected_saturated += saturated_in(profile.paths[i]);
    if (account) {
      affected_saturated +=
          insertion_saturation(surface, current, neighbourhood, machine, feedrate, options.scallop_tol);
    }
    const int gouges_now = gouges_in(current, surface, affected);

    const std::size_t n_tilt = options.candidates.size();
    std::vector<Trial> trials(placements.size() * n_tilt);
    parallel_for(trials.size(), options.workers, [&](std::size_t k) {
      Trial& t = trials[k];
      t.region = placements[k / n_tilt];
      t.tilt = options.candidates[k % n_tilt];
      t.toolpath = current;
      const FieldRegion regions[] = {t.region};
      t.toolpath.field = deform_field(current.field, regions, t.tilt, options.halfwidth);
      if (t.toolpath.field == current.field) return;
      try {
        regenerate_paths(surface, t.toolpath, affected);
        if (gouges_in(t.toolpath, surface, affected) > gouges_now) return;
        int sat = 0;
        for (std::size_t i : affected) {
          t.profiles.push_back(simulate_path(t.toolpath.paths[i], machine, feedrate));
          sat += saturated_in(t.profiles.back());
        }
        if (account) {
          sat += insertion_saturation(surface, t.toolpath, neighbourhood, machine, feedrate, options.scallop_tol);
        }
        t.total = total - affected_saturated + sat;
        t.valid = true;
      } catch (const Error&) {
        // Unreachable or singular candidate: not admissible.
      }
    });

    // Fewest saturated blocks; ties go to the smaller tilt, then the earlier placement.
    int best = -1;
    for (std::size_t c = 0; c < trials.size(); ++c) {
      if (!trials[c].valid || trials[c].total >= total) continue;
      if (best < 0 || trials[c].total < trials[best].total ||
          (trials[c].total == trials[best].total && trials[c].tilt < trials[best].tilt)) {
        best = static_cast<int>(c);
      }
    }
    if (best < 0) {
      exhausted.insert({target.path_first, target.sample_first, target.sample_last});
      continue;
    }
    Trial& chosen = trials[best];
    result.deformations.push_back(Deformation{chosen.region, chosen.tilt, total, chosen.total});
    current = std::move(chosen.toolpath);
    for (std::size_t k = 0; k < affected.size(); ++k) profile.paths[affected[k]] = std::move(chosen.profiles[k]);
    effective_feedrate(profile, machine);
    total = chosen.total;
    // The deformed area is considered settled.
    exhausted.insert({target.path_first, target.sample_first, target.sample_last});
  }

  if (options.tighten) {
    result.tightening = tighten(surface, current, options.scallop_tol, 3, options.workers);
    current = std::move(result.tightening.toolpath);
    result.tightening.toolpath = ToolPath{};
    orient_inserted(surface, current, machine, feedrate, options.workers);
    profile = simulate(current, machine, feedrate, options.workers);
  }
  result.after = saturation(profile, machine);
  result.gouges_after = static_cast<int>(gouge_check(current, surface).size());
  result.toolpath = std::move(current);
  result.profile = std::move(profile);
  return result;
}

}  // namespace hsm5
