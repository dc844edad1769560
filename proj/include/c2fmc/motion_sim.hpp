#pragma once

#include "c2fmc/forward.hpp"
#include "c2fmc/rng.hpp"
#include "c2fmc/warp.hpp"

#include <vector>

namespace c2f {

// Gaussian noise per component, damped by exp(-damping * r) in centred
// k-space (r in bins from DC), real part taken, then rescaled so the largest
// displacement magnitude equals max_disp.
DisplacementField random_smooth_field(Shape shape, double max_disp, double damping, Rng &rng);

// Each parameter uniform in its symmetric range.
RigidParams random_rigid(double range_deg, double range_px, Rng &rng);

// Independent Bernoulli draws with probability proportional to
// (1 + r / r0)^-decay, r0 = min(H, W) / 16, scaled so the expected sampled
// fraction is 1 / R. The central 8x8 block is always kept.
SamplingMask variable_density_mask(Shape shape, double R, double decay, Rng &rng);

enum class AcsMode { disjoint, shared };

// Splits the sampled locations of `mask` into n_states near-equal random
// subsets. In shared mode the sampled part of the central acs_width square
// goes to every state and only the remainder is split.
std::vector<SamplingMask> partition_mask(const SamplingMask &mask, std::size_t n_states, AcsMode mode,
                                         int acs_width, Rng &rng);

}  // namespace c2f
