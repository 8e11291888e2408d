// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>

namespace kronred {

/// Run fn(begin, end) over a static contiguous split of [0, count) across
/// `workers` threads (the calling thread takes the first chunk). Results must
/// be written to disjoint, pre-sized storage; the split never affects values,
/// only wall time. workers <= 1 or small counts run inline.
void parallel_chunks(std::size_t count, int workers,
                     const std::function<void(std::size_t, std::size_t)>& fn);

/// Default worker count: KRONRED_WORKERS env var when set, else 1.
int default_workers();

}  // namespace kronred
