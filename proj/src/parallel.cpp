#include "prnu/parallel.hpp"

#include <thread>

namespace prnu {

unsigned default_thread_count() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

}  // namespace prnu
