#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "codesim/frontend.hpp"
#include "codesim/pipeline.hpp"
#include "json.hpp"

namespace codesim {

struct Tile {
    std::size_t start_a = 0;
    std::size_t start_b = 0;
    std::size_t length = 0;

    friend bool operator==(const Tile&, const Tile&) = default;
};

struct TilingResult {
    std::vector<Tile> tiles;  // in marking order
    std::size_t matched = 0;
};

inline constexpr int kInitialSearchLength = 20;

/// Running-Karp-Rabin Greedy String Tiling over interned token ids. Each scan
/// at search length s hashes every unmarked window of length s, extends the
/// verified hits as far as they go, and marks the longest of them (ties by
/// start_a, then start_b). s is lowered (halved, then clamped to mml) only
/// when a scan finds nothing.
TilingResult rkr_gst(std::span<const int> a, std::span<const int> b, int mml,
                     int initial_search = kInitialSearchLength);

/// Same, over comparison keys.
TilingResult rkr_gst(const TokenSequence& a, const TokenSequence& b, int mml);

struct UnitPair {
    int index_a = -1;  // into the sequence list; -1 when unmatched
    int index_b = -1;
    std::string unit_a;
    std::string unit_b;
    std::size_t len_a = 0;
    std::size_t len_b = 0;
    std::size_t matched = 0;
    std::vector<Tile> tiles;
};

/// Greedy maximum-weight pairing: all cross pairs are tiled, the pair with the
/// most matched tokens is taken first (ties by unit names), both units leave
/// the pool, repeat. Leftover units come last as one-sided entries. A unit
/// shorter than mml matches only a key-identical unit, as one whole tile.
std::vector<UnitPair> pair_units(const std::vector<TokenSequence>& a, const std::vector<TokenSequence>& b, int mml);

struct ComparisonResult {
    Approach approach = Approach::EXT_LLA;
    int min_match_length = 3;
    std::vector<UnitPair> pairs;
    std::size_t matched_total = 0;
    std::size_t len_a = 0;
    std::size_t len_b = 0;
    long long mt = 0;
    long long rmt = 0;
    double similarity = 1.0;
};

/// Pairs the units and fills the metrics. Arguments are normalized (shorter
/// total first, ties by dump text) so the result is symmetric; the returned
/// fields are then mapped back to the caller's order.
ComparisonResult compare_sequences(const std::vector<TokenSequence>& a, const std::vector<TokenSequence>& b,
                                   const ApproachConfig& config);

ComparisonResult compare(const SourceUnit& a, const SourceUnit& b, const ApproachConfig& config);

nlohmann::json to_json(const ComparisonResult& result);
std::string render_text(const ComparisonResult& result);

}  // namespace codesim
