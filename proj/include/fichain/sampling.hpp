#pragma once

#include <random>

#include "fichain/chain.hpp"

namespace fichain {

/// Random observable f = exp(g) with g i.i.d. uniform[-3,3]. Every fifth
/// sample gets an adversarial spike (one coordinate multiplied by 1e3), the
/// shape that makes E(f, log f) blow up relative to E(sqrt f, sqrt f).
Observable random_observable(std::mt19937_64& rng, int n, long sample_index);

/// Random reversible chain from random symmetric conductances on a random
/// connected graph: Q(x,y) = C(x,y)/w(x) is reversible with pi proportional
/// to w. State count uniform in [min_states, max_states].
ReversibleChain random_reversible_chain(std::mt19937_64& rng, int min_states = 3,
                                        int max_states = 12);

}  // namespace fichain
