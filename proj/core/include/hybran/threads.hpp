#pragma once

namespace hybran {

/// Worker count for parallel sections: HYBRAN_THREADS when set (clamped to
/// >= 1), otherwise std::thread::hardware_concurrency().
unsigned worker_threads();

}  // namespace hybran
