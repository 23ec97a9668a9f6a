#pragma once

#include <string>

#include "ves/geometry.hpp"

namespace ves {

struct SeedParams {
  int n_ctrl = 40;
  double radius = 1.0;          // area radius sqrt(S / 4 pi) of the seed
  double reduced_volume = 1.0;  // target v (ignored by "sphere")
  double aspect = 0.0;          // spheroid: explicit axis ratio overrides v
  int lobes = 3;                // pearled/dumbbell modulation count
  double amplitude = 0.0;       // pearled: explicit modulation overrides v
  double invagination = 0.0;    // stomatocyte: explicit depth overrides v
};

/// Families: "sphere"; "prolate" / "spheroid"; "oblate"; "dumbbell" /
/// "pearled" (cosine-modulated radius); "stomatocyte" (invaginated
/// profile). Shape parameters are solved from the target reduced volume
/// unless given explicitly; throws std::invalid_argument when the target
/// is unattainable for the family.
GeneratingCurve make_seed(const std::string& family, const SeedParams& params);

}  // namespace ves
