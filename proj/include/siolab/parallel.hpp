#pragma once

#include <cstddef>
#include <functional>

namespace siolab {

/// Worker count used by the batch operators. 0 means "use the OpenMP default".
void set_worker_count(int workers);
int worker_count();

/// Runs body(i) for i in [0, count). Each index writes only its own output slot;
/// any reduction happens afterwards in index order, so results are identical
/// for every worker count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace siolab
