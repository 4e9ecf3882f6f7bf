#include "codesim/matcher.hpp"

#include <algorithm>
#include <cstdint>
#include <sstream>
#include <iomanip>
#include <tuple>
#include <unordered_map>

namespace codesim {

namespace {

constexpr std::uint64_t kBase = 1000003ULL;

class Tiler {
public:
    Tiler(std::span<const int> a, std::span<const int> b) : a_(a), b_(b), mark_a_(a.size()), mark_b_(b.size()) {}

    TilingResult run(int mml, int initial_search) {
        TilingResult result;
        if (mml < 1) mml = 1;
        std::size_t s = static_cast<std::size_t>(std::max(initial_search, mml));
        const std::size_t min_len = static_cast<std::size_t>(mml);
        while (true) {
            std::vector<Tile> longest = scan(s);
            if (longest.empty()) {
                if (s > 2 * min_len)
                    s /= 2;
                else if (s > min_len)
                    s = min_len;
                else
                    break;
                continue;
            }
            for (const Tile& t : longest) {
                if (occluded(t)) continue;
                for (std::size_t k = 0; k < t.length; ++k) {
                    mark_a_[t.start_a + k] = true;
                    mark_b_[t.start_b + k] = true;
                }
                result.tiles.push_back(t);
                result.matched += t.length;
            }
        }
        return result;
    }

private:
    bool occluded(const Tile& t) const {
        for (std::size_t k = 0; k < t.length; ++k)
            if (mark_a_[t.start_a + k] || mark_b_[t.start_b + k]) return true;
        return false;
    }

    // Hashes of every window of length s lying wholly in unmarked tokens,
    // as (start, hash) pairs.
    static std::vector<std::pair<std::size_t, std::uint64_t>> windows(std::span<const int> seq,
                                                                     const std::vector<bool>& marked, std::size_t s) {
        std::vector<std::pair<std::size_t, std::uint64_t>> out;
        if (seq.size() < s) return out;
        std::uint64_t top = 1;
        for (std::size_t k = 1; k < s; ++k) top *= kBase;
        std::uint64_t h = 0;
        std::size_t run = 0;
        for (std::size_t i = 0; i < seq.size(); ++i) {
            if (marked[i]) {
                run = 0;
                h = 0;
                continue;
            }
            if (run == s) {
                h -= static_cast<std::uint64_t>(seq[i - s] + 1) * top;
                --run;
            }
            h = h * kBase + static_cast<std::uint64_t>(seq[i] + 1);
            ++run;
            if (run == s) out.emplace_back(i + 1 - s, h);
        }
        return out;
    }

    std::vector<Tile> scan(std::size_t s) {
        std::vector<Tile> best;
        std::size_t best_len = 0;
        auto wb = windows(b_, mark_b_, s);
        if (wb.empty()) return best;
        std::unordered_map<std::uint64_t, std::vector<std::size_t>> table;
        for (const auto& [start, h] : wb) table[h].push_back(start);

        for (const auto& [p, h] : windows(a_, mark_a_, s)) {
            auto it = table.find(h);
            if (it == table.end()) continue;
            for (std::size_t t : it->second) {
                // Verify the window, so a hash collision never yields a tile.
                if (!std::equal(a_.begin() + p, a_.begin() + p + s, b_.begin() + t)) continue;
                std::size_t k = s;
                while (p + k < a_.size() && t + k < b_.size() && !mark_a_[p + k] && !mark_b_[t + k] &&
                       a_[p + k] == b_[t + k])
                    ++k;
                if (k > best_len) {
                    best_len = k;
                    best.clear();
                }
                if (k == best_len) best.push_back({p, t, k});
            }
        }
        std::sort(best.begin(), best.end(), [](const Tile& x, const Tile& y) {
            return std::tie(x.start_a, x.start_b) < std::tie(y.start_a, y.start_b);
        });
        return best;
    }

    std::span<const int> a_, b_;
    std::vector<bool> mark_a_, mark_b_;
};

std::pair<std::vector<int>, std::vector<int>> intern(const TokenSequence& a, const TokenSequence& b) {
    std::unordered_map<std::string, int> ids;
    auto map = [&](const TokenSequence& seq) {
        std::vector<int> out;
        out.reserve(seq.items.size());
        for (const auto& item : seq.items) out.push_back(ids.emplace(item.key, static_cast<int>(ids.size())).first->second);
        return out;
    };
    auto ia = map(a);
    auto ib = map(b);
    return {std::move(ia), std::move(ib)};
}

std::size_t total_length(const std::vector<TokenSequence>& seqs) {
    std::size_t n = 0;
    for (const auto& s : seqs) n += s.items.size();
    return n;
}

}  // namespace

TilingResult rkr_gst(std::span<const int> a, std::span<const int> b, int mml, int initial_search) {
    return Tiler(a, b).run(mml, initial_search);
}

TilingResult rkr_gst(const TokenSequence& a, const TokenSequence& b, int mml) {
    auto [ia, ib] = intern(a, b);
    return rkr_gst(ia, ib, mml);
}

namespace {

// Units shorter than mml can never hold a tile, so an identical short unit
// (a bare RETURN, say) would otherwise count as mismatched against itself.
TilingResult tile_units(const TokenSequence& a, const TokenSequence& b, int mml) {
    TilingResult r = rkr_gst(a, b, mml);
    const std::size_t n = a.items.size();
    if (r.matched == 0 && n > 0 && n < static_cast<std::size_t>(mml) && n == b.items.size() &&
        std::equal(a.items.begin(), a.items.end(), b.items.begin(),
                   [](const ComparableToken& x, const ComparableToken& y) { return x.key == y.key; })) {
        r.tiles.push_back({0, 0, n});
        r.matched = n;
    }
    return r;
}

}  // namespace

std::vector<UnitPair> pair_units(const std::vector<TokenSequence>& a, const std::vector<TokenSequence>& b, int mml) {
    struct Candidate {
        int i, j;
        TilingResult tiling;
    };
    std::vector<Candidate> candidates;
    for (int i = 0; i < static_cast<int>(a.size()); ++i)
        for (int j = 0; j < static_cast<int>(b.size()); ++j) candidates.push_back({i, j, tile_units(a[i], b[j], mml)});
    std::stable_sort(candidates.begin(), candidates.end(), [&](const Candidate& x, const Candidate& y) {
        if (x.tiling.matched != y.tiling.matched) return x.tiling.matched > y.tiling.matched;
        return std::tie(a[x.i].unit_name, b[x.j].unit_name, x.i, x.j) <
               std::tie(a[y.i].unit_name, b[y.j].unit_name, y.i, y.j);
    });

    std::vector<bool> used_a(a.size()), used_b(b.size());
    std::vector<UnitPair> pairs;
    for (auto& c : candidates) {
        if (used_a[c.i] || used_b[c.j]) continue;
        used_a[c.i] = used_b[c.j] = true;
        pairs.push_back({c.i, c.j, a[c.i].unit_name, b[c.j].unit_name, a[c.i].items.size(), b[c.j].items.size(),
                         c.tiling.matched, std::move(c.tiling.tiles)});
    }
    for (int i = 0; i < static_cast<int>(a.size()); ++i)
        if (!used_a[i]) pairs.push_back({i, -1, a[i].unit_name, {}, a[i].items.size(), 0, 0, {}});
    for (int j = 0; j < static_cast<int>(b.size()); ++j)
        if (!used_b[j]) pairs.push_back({-1, j, {}, b[j].unit_name, 0, b[j].items.size(), 0, {}});
    return pairs;
}

ComparisonResult compare_sequences(const std::vector<TokenSequence>& a, const std::vector<TokenSequence>& b,
                                   const ApproachConfig& config) {
    const std::size_t la = total_length(a), lb = total_length(b);
    bool swapped = false;
    if (la != lb)
        swapped = la > lb;
    else
        swapped = dump_sequences(a) > dump_sequences(b);

    ComparisonResult r;
    r.approach = config.approach;
    r.min_match_length = config.min_match_length;
    r.pairs = swapped ? pair_units(b, a, config.min_match_length) : pair_units(a, b, config.min_match_length);
    if (swapped) {
        for (auto& p : r.pairs) {
            std::swap(p.index_a, p.index_b);
            std::swap(p.unit_a, p.unit_b);
            std::swap(p.len_a, p.len_b);
            for (auto& t : p.tiles) std::swap(t.start_a, t.start_b);
        }
    }
    for (const auto& p : r.pairs) r.matched_total += p.matched;
    r.len_a = la;
    r.len_b = lb;
    r.mt = static_cast<long long>(la + lb) - 2 * static_cast<long long>(r.matched_total);
    r.rmt = -r.mt;
    r.similarity = la + lb == 0 ? 1.0 : 2.0 * static_cast<double>(r.matched_total) / static_cast<double>(la + lb);
    return r;
}

ComparisonResult compare(const SourceUnit& a, const SourceUnit& b, const ApproachConfig& config) {
    return compare_sequences(build_sequences(a, config), build_sequences(b, config), config);
}

nlohmann::json to_json(const ComparisonResult& r) {
    nlohmann::json pairs = nlohmann::json::array();
    for (const auto& p : r.pairs) {
        nlohmann::json tiles = nlohmann::json::array();
        for (const auto& t : p.tiles) tiles.push_back({{"start_a", t.start_a}, {"start_b", t.start_b}, {"length", t.length}});
        pairs.push_back({
            {"unit_a", p.index_a < 0 ? nlohmann::json(nullptr) : nlohmann::json(p.unit_a)},
            {"unit_b", p.index_b < 0 ? nlohmann::json(nullptr) : nlohmann::json(p.unit_b)},
            {"len_a", p.len_a},
            {"len_b", p.len_b},
            {"matched", p.matched},
            {"tiles", tiles},
        });
    }
    return {
        {"approach", approach_name(r.approach)},
        {"min_match_length", r.min_match_length},
        {"unit_pairing", pairs},
        {"matched_total", r.matched_total},
        {"len_a", r.len_a},
        {"len_b", r.len_b},
        {"mt", r.mt},
        {"rmt", r.rmt},
        {"similarity", r.similarity},
    };
}

std::string render_text(const ComparisonResult& r) {
    std::ostringstream out;
    out << "approach: " << approach_name(r.approach) << "\n";
    out << "min_match_length: " << r.min_match_length << "\n";
    out << "len_a: " << r.len_a << "\n";
    out << "len_b: " << r.len_b << "\n";
    out << "matched_total: " << r.matched_total << "\n";
    out << "mt: " << r.mt << "\n";
    out << "rmt: " << r.rmt << "\n";
    out << "similarity: " << std::fixed << std::setprecision(4) << r.similarity << "\n";
    out << "unit_pairing:\n";
    for (const auto& p : r.pairs) {
        out << "  " << (p.index_a < 0 ? "-" : p.unit_a) << " <-> " << (p.index_b < 0 ? "-" : p.unit_b) << ": matched "
            << p.matched << " of " << p.len_a << "/" << p.len_b;
        if (!p.tiles.empty()) {
            out << ", tiles";
            for (const auto& t : p.tiles) out << " (" << t.start_a << "," << t.start_b << "," << t.length << ")";
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace codesim
