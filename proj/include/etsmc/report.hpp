#pragma once

#include <string>

#include "etsmc/topology.hpp"

namespace etsmc {

/// Human-readable summary of a topology: the five matrices, the Laplacian
/// spectrum in ascending order, lambda2, balancedness, the leader-rooted
/// spanning tree flag and whether H is invertible.
std::string topology_report(const TopologyMatrices& topology);

}  // namespace etsmc
