#pragma once

#include <condition_variable>
#include <cstddef>
#include <exception>
#include <map>
#include <mutex>
#include <thread>
#include <vector>

namespace prnu {

// Runs produce(i) for i in [0, n) on `threads` workers and feeds the
// results to consume(i, value) in strictly increasing index order, so a
// reduction over the results is deterministic no matter how the workers
// are scheduled. Pending results are capped at 2*threads to bound memory
// on long sequences.
template <typename T, typename Produce, typename Consume>
void ordered_parallel_for(std::size_t n, unsigned threads, Produce produce,
                          Consume consume) {
    if (n == 0) return;
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) consume(i, produce(i));
        return;
    }

    std::mutex mu;
    std::condition_variable cv;
    std::map<std::size_t, T> ready;
    std::size_t next_to_produce = 0;
    std::size_t next_to_consume = 0;
    std::exception_ptr failure;
    const std::size_t cap = static_cast<std::size_t>(threads) * 2;

    auto worker = [&] {
        for (;;) {
            std::size_t idx;
            {
                std::unique_lock lock(mu);
                if (failure || next_to_produce >= n) return;
                idx = next_to_produce++;
            }
            T value;
            try {
                value = produce(idx);
            } catch (...) {
                std::lock_guard lock(mu);
                if (!failure) failure = std::current_exception();
                cv.notify_all();
                return;
            }
            std::unique_lock lock(mu);
            cv.wait(lock, [&] { return failure || idx < next_to_consume + cap; });
            if (failure) return;
            ready.emplace(idx, std::move(value));
            cv.notify_all();
        }
    };

    std::vector<std::thread> pool;
    const unsigned nworkers = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    pool.reserve(nworkers);
    for (unsigned t = 0; t < nworkers; ++t) pool.emplace_back(worker);

    {
        std::unique_lock lock(mu);
        while (next_to_consume < n && !failure) {
            cv.wait(lock, [&] {
                return failure || ready.count(next_to_consume) > 0;
            });
            if (failure) break;
            auto node = ready.extract(next_to_consume);
            T value = std::move(node.mapped());
            lock.unlock();
            consume(next_to_consume, value);
            lock.lock();
            ++next_to_consume;
            cv.notify_all();
        }
        if (failure) cv.notify_all();
    }

    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

unsigned default_thread_count();

}  // namespace prnu
