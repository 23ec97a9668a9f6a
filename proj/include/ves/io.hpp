#pragma once

#include <map>
#include <string>
#include <vector>

#include "ves/dynamics.hpp"
#include "ves/geometry.hpp"

namespace ves {

/// Plain-text curve snapshot (knot vector + control points, full decimal
/// precision); round-trips exactly.
void write_curve(const std::string& path, const GeneratingCurve& curve);
GeneratingCurve read_curve(const std::string& path);

struct Checkpoint {
  GeneratingCurve curve;
  double t = 0.0;
  std::string spec_hash;
};

void write_checkpoint(const std::string& path, const Checkpoint& cp);
Checkpoint read_checkpoint(const std::string& path);

/// Key-value configuration text: `key = value` lines, `#` comments.
using Config = std::map<std::string, std::string>;
Config read_config(const std::string& path);

void write_frames_csv(const std::string& path, const Trajectory& traj);

struct SweepRow {
  double R0 = 0.0;
  double t_relax = 0.0;
  std::string regime;  // "membrane" or "bulk"
};
void write_sweep_csv(const std::string& path,
                     const std::vector<SweepRow>& rows);

}  // namespace ves
