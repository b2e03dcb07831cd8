#include "reticulate/parallel.hpp"

#include <cstdlib>
#include <string>

namespace reticulate {

int default_thread_count() {
    if (const char* env = std::getenv("RETICULATE_THREADS")) {
        try {
            int n = std::stoi(env);
            if (n > 0) return n;
        } catch (...) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace reticulate
