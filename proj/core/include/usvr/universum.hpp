#pragma once

#include <cstdint>

#include "usvr/dataset.hpp"
#include "usvr/usvr.hpp"

namespace usvr {

/// Mean and population standard deviation of the training targets.
struct YStats {
    double mean = 0.0;
    double std = 0.0;
};

YStats compute_y_stats(const Dataset& train);

/// Strategy 1: draw (x1,y1) with y1 >= mean(y) and (x2,y2) with y2 <= mean(y),
/// emit the swapped pairs (x1,y2) and (x2,y1). Draws are with replacement;
/// an odd m takes only the (x1,y2) member of the final pair. Marginals of x
/// and y are preserved, the conditional p(y|x) is not.
UniversumSet strategy1_swap(const Dataset& train, int m, std::uint64_t seed);

/// Strategy 2: copy a random training row, replace its target with a
/// Normal(mean(y), std(y)) draw (population std).
UniversumSet strategy2_resample_y(const Dataset& train, int m, std::uint64_t seed);

/// Strategy 3: copy a random training row, permute its feature coordinates
/// uniformly at random, keep the target.
UniversumSet strategy3_permute_x(const Dataset& train, int m, std::uint64_t seed);

/// Strategy 4: permute features and resample the target (2 and 3 combined).
UniversumSet strategy4_both(const Dataset& train, int m, std::uint64_t seed);

/// Hypercube-specific universum: x uniform on [0,1]^30 like the training
/// distribution, target the sign-flipped block sum -hypercube_target(x),
/// noise-free.
UniversumSet hypercube_universum1(int m, std::uint64_t seed);

}  // namespace usvr
