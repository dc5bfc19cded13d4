#include "microlocal/funcnorm.hpp"

#include <cmath>

#include "microlocal/errors.hpp"

namespace microlocal {

LevelField level_field(const BandStack& pieces) {
  require(!pieces.pieces.empty(), "empty band stack");
  LevelField f;
  f.dim = pieces.pieces.front().dim();
  f.depth = pieces.pieces.front().depth();
  require(pieces.top() == f.depth, "band stack must hold levels 0..depth");
  f.g.reserve(pieces.pieces.size());
  for (const auto& piece : pieces.pieces) f.g.push_back(piece.magnitudes());
  return f;
}

double local_func_norm(const BandStack& pieces, const DyadicCube& p, const SpaceParams& params, int virtual_levels) {
  return local_norm_direct(level_field(pieces), p, params, virtual_levels);
}

NormReport full_norm(const SampledSignal& f, const SpaceParams& params, const FilterBank& bank,
                     const FullNormOptions& options) {
  const BandStack pieces = lp_pieces(f, bank);
  CubeTable table = local_norm_table(level_field(pieces), params, options.virtual_levels);
  NormReport r = outer_sup(table, params);
  if (options.keep_table) r.per_cube = std::move(table);
  if (options.truncation_delta && f.depth() > 2) {
    const SampledSignal coarse = restrict_signal(f, f.depth() - 1);
    const FilterBank coarse_bank = build_filter_bank(f.dim(), f.depth() - 1, bank.spec());
    FullNormOptions inner = options;
    inner.keep_table = false;
    inner.truncation_delta = false;
    r.truncation_delta = r.value - full_norm(coarse, params, coarse_bank, inner).value;
  }
  return r;
}

}  // namespace microlocal
