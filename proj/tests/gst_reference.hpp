#pragma once

// Plain Greedy String Tiling without hashing, plus an exhaustive search over
// all tile sets. Both serve as oracles for the matcher.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <vector>

namespace testgen {

struct RefTile {
    std::size_t a, b, len;
};

inline std::size_t gst_reference(const std::vector<int>& a, const std::vector<int>& b, std::size_t mml,
                                 std::vector<RefTile>* tiles = nullptr) {
    std::vector<bool> ma(a.size()), mb(b.size());
    std::size_t matched = 0;
    std::size_t maxmatch;
    do {
        maxmatch = mml;
        std::vector<RefTile> matches;
        for (std::size_t p = 0; p < a.size(); ++p) {
            for (std::size_t t = 0; t < b.size(); ++t) {
                std::size_t j = 0;
                while (p + j < a.size() && t + j < b.size() && a[p + j] == b[t + j] && !ma[p + j] && !mb[t + j]) ++j;
                if (j == maxmatch) {
                    matches.push_back({p, t, j});
                } else if (j > maxmatch) {
                    matches.assign(1, {p, t, j});
                    maxmatch = j;
                }
            }
        }
        for (const auto& m : matches) {
            bool free = true;
            for (std::size_t k = 0; k < m.len; ++k) free = free && !ma[m.a + k] && !mb[m.b + k];
            if (!free) continue;
            for (std::size_t k = 0; k < m.len; ++k) ma[m.a + k] = mb[m.b + k] = true;
            matched += m.len;
            if (tiles) tiles->push_back(m);
        }
    } while (maxmatch > mml);
    return matched;
}

// Largest coverage reachable by any set of disjoint tiles of length >= mml.
inline std::size_t best_tiling(const std::vector<int>& a, const std::vector<int>& b, std::size_t mml) {
    std::vector<bool> ma(a.size()), mb(b.size());
    std::size_t best = 0;
    std::function<void(std::size_t, std::size_t)> search = [&](std::size_t from, std::size_t covered) {
        best = std::max(best, covered);
        for (std::size_t p = from; p < a.size(); ++p) {
            for (std::size_t t = 0; t < b.size(); ++t) {
                for (std::size_t len = mml; p + len <= a.size() && t + len <= b.size(); ++len) {
                    bool ok = true;
                    for (std::size_t k = 0; k < len && ok; ++k)
                        ok = a[p + k] == b[t + k] && !ma[p + k] && !mb[t + k];
                    if (!ok) break;
                    for (std::size_t k = 0; k < len; ++k) ma[p + k] = mb[t + k] = true;
                    search(p + len, covered + len);
                    for (std::size_t k = 0; k < len; ++k) ma[p + k] = mb[t + k] = false;
                }
            }
        }
    };
    search(0, 0);
    return best;
}

}  // namespace testgen
