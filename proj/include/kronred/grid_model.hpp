// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "kronred/block_matrix.hpp"
#include "kronred/network.hpp"

namespace kronred {

/// Assemble the 3n x 3n block nodal admittance matrix: off-diagonal block
/// (i,j) is -y_series of the branch, the diagonal accumulates incident series
/// blocks plus shunts, and rows/cols of absent phases stay exactly zero.
///
/// Throws StructuralError on duplicate branches or on a present phase left
/// without any incident coupling (which would make the system singular).
BlockAdmittance assemble_admittance(const Network& net);

/// Branch-list adjacency: symmetric boolean, zero diagonal.
Adjacency adjacency(const Network& net);

/// Phase mask per node, indexed by node id.
std::vector<PhaseMask> phase_masks(const Network& net);

}  // namespace kronred
