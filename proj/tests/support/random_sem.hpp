#pragma once

#include <random>

#include "cbpv/densem.hpp"
#include "cbpv/types.hpp"

namespace cbpv::testing {

/// Random representable element of a first-order type's domain, built
/// directly from the representation constructors.
densem::Sem random_sem(const Type& t, std::mt19937_64& rng, int size = 3);

/// Random first-order value type of at most `size` constructors.
Type random_first_order_type(std::mt19937_64& rng, int size = 2);

/// Arbitrary (not necessarily monotone) map from points to valuations over
/// `target`, fixed by `seed` and the printed form of its argument.
densem::SemFn random_kernel(const Type& target, std::uint64_t seed);

}  // namespace cbpv::testing
