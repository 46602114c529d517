#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace dcorr {

/// Runs body(block) for block in [0, blocks) on up to `threads` workers.
/// Blocks are assigned round-robin; callers write per-block results into
/// their own slots and reduce them in block order afterwards, so results
/// never depend on scheduling. threads == 0 means hardware concurrency.
template <class Body>
void for_each_block(std::size_t blocks, unsigned threads, Body&& body)
{
    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t workers = std::min<std::size_t>(threads, blocks);
    if (workers <= 1) {
        for (std::size_t b = 0; b < blocks; ++b)
            body(b);
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t b = w; b < blocks; b += workers)
                body(b);
        });
    }
}

} // namespace dcorr
