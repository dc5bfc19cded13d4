#pragma once

#include "microlocal/lpdecomp.hpp"
#include "microlocal/seqspace.hpp"

namespace microlocal {

// |f * phi_i| on the grid, levels 0..D.
LevelField level_field(const BandStack& pieces);

double local_func_norm(const BandStack& pieces, const DyadicCube& p, const SpaceParams& params, int virtual_levels = 4);

struct FullNormOptions {
  int virtual_levels = 4;
  bool keep_table = false;
  // Re-runs at depth D-1 on the spectrally restricted signal and stores value(D) - value(D-1).
  bool truncation_delta = false;
};

NormReport full_norm(const SampledSignal& f, const SpaceParams& params, const FilterBank& bank,
                     const FullNormOptions& options = {});

}  // namespace microlocal
