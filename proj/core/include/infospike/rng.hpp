#pragma once

#include <cstdint>
#include <string_view>

#include "infospike/neuron.hpp"

namespace infospike {

/// Independent stream for a named component of a seeded run.
Rng split_rng(std::uint64_t seed, std::string_view label);
std::uint64_t split_seed(std::uint64_t seed, std::string_view label);

}  // namespace infospike
