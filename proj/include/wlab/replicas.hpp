#pragma once

#include <cstddef>
#include <exception>
#include <vector>

#include "wlab/ensemble.hpp"

namespace wlab {

// Replicas are grouped in fixed blocks; each block fills its own copy of the prototype state
// and the blocks are merged in index order, so results do not depend on the thread count.
inline constexpr std::size_t kReplicaBlock = 32;

template <class State, class Body>
State run_replicas(std::size_t replicas, Exec exec, const State& proto, Body&& body) {
  const std::size_t nblocks = (replicas + kReplicaBlock - 1) / kReplicaBlock;
  std::vector<State> blocks(nblocks, proto);
  std::vector<std::exception_ptr> errors(nblocks);
  auto run_block = [&](std::size_t b) {
    try {
      const std::size_t r1 = std::min(replicas, (b + 1) * kReplicaBlock);
      for (std::size_t r = b * kReplicaBlock; r < r1; ++r) body(r, blocks[b]);
    } catch (...) {
      errors[b] = std::current_exception();
    }
  };
  if (exec == Exec::Parallel) {
    const auto nb = static_cast<std::ptrdiff_t>(nblocks);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t b = 0; b < nb; ++b) run_block(static_cast<std::size_t>(b));
  } else {
    for (std::size_t b = 0; b < nblocks; ++b) run_block(b);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  State out = proto;
  for (const auto& s : blocks) out.merge(s);
  return out;
}

}  // namespace wlab
