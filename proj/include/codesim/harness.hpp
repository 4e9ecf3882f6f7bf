#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "codesim/attacks.hpp"
#include "codesim/pipeline.hpp"
#include "json.hpp"

namespace codesim {

inline constexpr std::size_t kApproachCount = 3;

/// Index of an approach in per-case arrays (sta, lla, ext-lla).
std::size_t approach_index(Approach approach);

/// Reduced fraction with a positive denominator.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    static Rational of(std::int64_t num, std::int64_t den);
    std::string exact() const;   // "-61/10", or "-3" when whole
    std::string fixed2() const;  // "-6.10", rounded half away from zero

    friend bool operator==(const Rational&, const Rational&) = default;
};

struct CaseResult {
    std::string case_id;
    int level = 0;
    std::array<std::int64_t, kApproachCount> rmt{};
    std::array<Rational, kApproachCount> similarity{};
    std::array<int, kApproachCount> rank{};
};

struct ApproachStats {
    std::size_t case_count = 0;
    Rational mean_rmt;
    std::size_t zero_rmt_count = 0;
    std::int64_t min_rmt = 0;
    std::int64_t max_rmt = 0;
};

/// How often `first` beat, tied with, or lost to `second` on rmt.
struct PairwiseRecord {
    Approach first = Approach::EXT_LLA;
    Approach second = Approach::STA;
    std::size_t wins = 0;
    std::size_t ties = 0;
    std::size_t losses = 0;
};

struct LevelReport {
    int level = 0;
    std::size_t case_count = 0;
    std::array<ApproachStats, kApproachCount> stats{};
    std::vector<PairwiseRecord> pairwise;  // (lla, sta), (ext-lla, sta), (ext-lla, lla)
};

struct RankingTable {
    std::vector<CaseResult> cases;  // by level, then case id
    // histogram[approach][rank - 1]: cases where the approach holds that
    // rank; a shared rank counts once for each approach holding it.
    std::array<std::array<std::size_t, kApproachCount>, kApproachCount> histogram{};
};

struct InvalidCase {
    std::string case_id;
    int level = 0;
    std::string reason;
};

struct EvaluationReport {
    int min_match_length = 3;
    std::vector<LevelReport> levels;  // one per level present, ascending
    RankingTable ranking;
    std::vector<InvalidCase> invalid_cases;
};

/// Dense ranking on descending rmt: the highest value is rank 1 and equal
/// values share a rank.
std::vector<int> rank_case(std::span<const std::int64_t> rmts);

/// Runs all three approaches on one pair. Ranks are filled in.
CaseResult compare_case(const std::string& case_id, int level, const SourceUnit& original,
                        const SourceUnit& plagiarized, int mml);

/// Statistics over the cases of one level. Requires at least one case.
LevelReport summarize(int level, std::span<const CaseResult> cases);

/// Sorts the cases, recomputes their ranks and builds the histogram.
RankingTable rank_cases(std::vector<CaseResult> cases);

/// Compares every case under `<root>/level-<n>/<case-id>/` (original.mj,
/// plagiarized.mj). Cases that fail to parse or compile are listed, not
/// scored. Throws CorpusFormatError on a malformed layout.
EvaluationReport evaluate_corpus(const std::filesystem::path& root, int mml = 3);

/// Builds the report from already compared cases.
EvaluationReport build_report(std::vector<CaseResult> cases, std::vector<InvalidCase> invalid, int mml);

nlohmann::json to_json(const EvaluationReport& report);
std::string ranking_csv(const RankingTable& ranking);
std::string render_text(const EvaluationReport& report);

/// Writes report.json and ranking.csv into `out_dir`.
void write_report(const EvaluationReport& report, const std::filesystem::path& out_dir);

}  // namespace codesim
