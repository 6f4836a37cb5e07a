#include "hybran/threads.hpp"

#include <cstdlib>
#include <string>
#include <thread>

namespace hybran {

unsigned worker_threads() {
    if (const char* env = std::getenv("HYBRAN_THREADS")) {
        try {
            const long n = std::stol(env);
            if (n >= 1) return static_cast<unsigned>(n);
        } catch (...) {
            // fall through to hardware default
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

}  // namespace hybran
