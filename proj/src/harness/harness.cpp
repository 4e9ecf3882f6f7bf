#include "codesim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <future>
#include <numeric>
#include <regex>
#include <sstream>
#include <thread>
#include <variant>

#include "codesim/lowering.hpp"
#include "codesim/matcher.hpp"

namespace codesim {

namespace {

namespace fs = std::filesystem;

constexpr std::array<std::pair<Approach, Approach>, 3> kPairings{{
    {Approach::LLA, Approach::STA},
    {Approach::EXT_LLA, Approach::STA},
    {Approach::EXT_LLA, Approach::LLA},
}};

bool case_order(const CaseResult& a, const CaseResult& b) {
    return a.level != b.level ? a.level < b.level : a.case_id < b.case_id;
}

std::string fixed2_text(std::int64_t hundredths) {
    const bool negative = hundredths < 0;
    const std::uint64_t mag = negative ? 0 - static_cast<std::uint64_t>(hundredths) : static_cast<std::uint64_t>(hundredths);
    std::string frac = std::to_string(mag % 100);
    if (frac.size() < 2) frac = "0" + frac;
    return (negative ? "-" : "") + std::to_string(mag / 100) + "." + frac;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
}

// One-line reason without directory names, so reports do not depend on
// where the corpus lives.
std::string failure_reason(const std::string& file, const std::exception& e) { return file + ": " + e.what(); }

struct PendingCase {
    std::string case_id;
    int level = 0;
    fs::path dir;
};

std::variant<CaseResult, InvalidCase> run_case(const PendingCase& pending, int mml) {
    SourceUnit units[2];
    const char* files[2] = {"original.mj", "plagiarized.mj"};
    for (int i = 0; i < 2; ++i) {
        try {
            units[i] = parse_source(read_file(pending.dir / files[i]), files[i]);
            compile(units[i].ast);
        } catch (const Error& e) {
            return InvalidCase{pending.case_id, pending.level, failure_reason(files[i], e)};
        }
    }
    try {
        return compare_case(pending.case_id, pending.level, units[0], units[1], mml);
    } catch (const Error& e) {
        return InvalidCase{pending.case_id, pending.level, failure_reason("comparison", e)};
    }
}

std::vector<PendingCase> scan_layout(const fs::path& root) {
    if (!fs::is_directory(root)) throw CorpusFormatError("corpus root " + root.string() + " is not a directory");
    static const std::regex level_dir("level-([1-6])");
    std::vector<PendingCase> pending;
    bool any_level = false;
    for (const auto& entry : fs::directory_iterator(root)) {
        const std::string name = entry.path().filename().string();
        std::smatch m;
        if (entry.is_regular_file() && name == "manifest.json") continue;
        if (!entry.is_directory() || !std::regex_match(name, m, level_dir))
            throw CorpusFormatError("unexpected entry '" + name + "' in corpus root");
        any_level = true;
        const int level = std::stoi(m[1].str());
        for (const auto& case_entry : fs::directory_iterator(entry.path())) {
            const std::string case_id = case_entry.path().filename().string();
            if (!case_entry.is_directory())
                throw CorpusFormatError("unexpected file '" + name + "/" + case_id + "'; expected case directories");
            for (const char* required : {"original.mj", "plagiarized.mj"})
                if (!fs::is_regular_file(case_entry.path() / required))
                    throw CorpusFormatError("case '" + name + "/" + case_id + "' has no " + required);
            pending.push_back({case_id, level, case_entry.path()});
        }
    }
    if (!any_level) throw CorpusFormatError("no level-<n> directories in " + root.string());
    std::sort(pending.begin(), pending.end(), [](const PendingCase& a, const PendingCase& b) {
        return a.level != b.level ? a.level < b.level : a.case_id < b.case_id;
    });
    return pending;
}

}  // namespace

std::size_t approach_index(Approach approach) {
    switch (approach) {
        case Approach::STA:
            return 0;
        case Approach::LLA:
            return 1;
        case Approach::EXT_LLA:
            return 2;
    }
    return 0;
}

Rational Rational::of(std::int64_t num, std::int64_t den) {
    if (den == 0) throw Error("rational with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const std::int64_t g = std::gcd(num, den);
    return g > 1 ? Rational{num / g, den / g} : Rational{num, den};
}

std::string Rational::exact() const {
    return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

std::string Rational::fixed2() const {
    // round(num * 100 / den), halves away from zero
    const __int128 scaled = static_cast<__int128>(num) * 100;
    __int128 q = scaled / den;
    const __int128 r = scaled % den;
    if (2 * (r < 0 ? -r : r) >= den) q += scaled < 0 ? -1 : 1;
    return fixed2_text(static_cast<std::int64_t>(q));
}

std::vector<int> rank_case(std::span<const std::int64_t> rmts) {
    std::vector<std::int64_t> distinct(rmts.begin(), rmts.end());
    std::sort(distinct.begin(), distinct.end(), std::greater<>());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    std::vector<int> ranks;
    for (std::int64_t v : rmts)
        ranks.push_back(static_cast<int>(std::find(distinct.begin(), distinct.end(), v) - distinct.begin()) + 1);
    return ranks;
}

CaseResult compare_case(const std::string& case_id, int level, const SourceUnit& original,
                        const SourceUnit& plagiarized, int mml) {
    CaseResult out;
    out.case_id = case_id;
    out.level = level;
    for (Approach approach : kAllApproaches) {
        const ComparisonResult r = compare(original, plagiarized, ApproachConfig::of(approach, mml));
        const std::size_t i = approach_index(approach);
        out.rmt[i] = r.rmt;
        const auto total = static_cast<std::int64_t>(r.len_a + r.len_b);
        out.similarity[i] = total == 0 ? Rational{1, 1} : Rational::of(2 * static_cast<std::int64_t>(r.matched_total), total);
    }
    const auto ranks = rank_case(out.rmt);
    std::copy(ranks.begin(), ranks.end(), out.rank.begin());
    return out;
}

LevelReport summarize(int level, std::span<const CaseResult> cases) {
    if (cases.empty()) throw Error("level " + std::to_string(level) + " has no valid cases");
    LevelReport report;
    report.level = level;
    report.case_count = cases.size();
    for (std::size_t a = 0; a < kApproachCount; ++a) {
        ApproachStats& s = report.stats[a];
        s.case_count = cases.size();
        std::int64_t sum = 0;
        s.min_rmt = s.max_rmt = cases.front().rmt[a];
        for (const auto& c : cases) {
            sum += c.rmt[a];
            if (c.rmt[a] == 0) ++s.zero_rmt_count;
            s.min_rmt = std::min(s.min_rmt, c.rmt[a]);
            s.max_rmt = std::max(s.max_rmt, c.rmt[a]);
        }
        s.mean_rmt = Rational::of(sum, static_cast<std::int64_t>(cases.size()));
    }
    for (const auto& [first, second] : kPairings) {
        PairwiseRecord p{first, second};
        for (const auto& c : cases) {
            const auto x = c.rmt[approach_index(first)], y = c.rmt[approach_index(second)];
            if (x > y)
                ++p.wins;
            else if (x == y)
                ++p.ties;
            else
                ++p.losses;
        }
        report.pairwise.push_back(p);
    }
    return report;
}

RankingTable rank_cases(std::vector<CaseResult> cases) {
    RankingTable table;
    std::sort(cases.begin(), cases.end(), case_order);
    for (auto& c : cases) {
        const auto ranks = rank_case(c.rmt);
        for (std::size_t a = 0; a < kApproachCount; ++a) {
            c.rank[a] = ranks[a];
            ++table.histogram[a][static_cast<std::size_t>(ranks[a] - 1)];
        }
    }
    table.cases = std::move(cases);
    return table;
}

EvaluationReport build_report(std::vector<CaseResult> cases, std::vector<InvalidCase> invalid, int mml) {
    EvaluationReport report;
    report.min_match_length = mml;
    report.ranking = rank_cases(std::move(cases));
    const auto& sorted = report.ranking.cases;
    for (std::size_t begin = 0; begin < sorted.size();) {
        std::size_t end = begin;
        while (end < sorted.size() && sorted[end].level == sorted[begin].level) ++end;
        report.levels.push_back(
            summarize(sorted[begin].level, std::span<const CaseResult>(sorted.data() + begin, end - begin)));
        begin = end;
    }
    std::sort(invalid.begin(), invalid.end(), [](const InvalidCase& a, const InvalidCase& b) {
        return a.level != b.level ? a.level < b.level : a.case_id < b.case_id;
    });
    report.invalid_cases = std::move(invalid);
    return report;
}

EvaluationReport evaluate_corpus(const fs::path& root, int mml) {
    const std::vector<PendingCase> pending = scan_layout(root);

    // Cases are independent; results land in their own slots, so the merge
    // is deterministic whatever the scheduling.
    std::vector<std::optional<std::variant<CaseResult, InvalidCase>>> results(pending.size());
    const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), 8));
    std::atomic<std::size_t> next{0};
    std::vector<std::future<void>> jobs;
    for (std::size_t w = 0; w < workers; ++w)
        jobs.push_back(std::async(std::launch::async, [&] {
            for (std::size_t i; (i = next++) < pending.size();) results[i] = run_case(pending[i], mml);
        }));
    for (auto& j : jobs) j.get();

    std::vector<CaseResult> cases;
    std::vector<InvalidCase> invalid;
    for (auto& r : results) {
        if (auto* c = std::get_if<CaseResult>(&*r))
            cases.push_back(std::move(*c));
        else
            invalid.push_back(std::get<InvalidCase>(std::move(*r)));
    }
    return build_report(std::move(cases), std::move(invalid), mml);
}

nlohmann::json to_json(const EvaluationReport& report) {
    using nlohmann::json;
    json levels = json::array();
    for (const auto& level : report.levels) {
        json stats = json::object();
        for (Approach a : kAllApproaches) {
            const auto& s = level.stats[approach_index(a)];
            stats[approach_name(a)] = {{"case_count", s.case_count},
                                       {"mean_rmt", s.mean_rmt.exact()},
                                       {"zero_rmt_count", s.zero_rmt_count},
                                       {"min_rmt", s.min_rmt},
                                       {"max_rmt", s.max_rmt}};
        }
        json pairwise = json::array();
        for (const auto& p : level.pairwise)
            pairwise.push_back({{"first", approach_name(p.first)},
                                {"second", approach_name(p.second)},
                                {"wins", p.wins},
                                {"ties", p.ties},
                                {"losses", p.losses}});
        levels.push_back({{"level", level.level}, {"case_count", level.case_count}, {"approaches", stats},
                          {"pairwise", pairwise}});
    }

    json cases = json::array();
    for (const auto& c : report.ranking.cases) {
        json rmt = json::object(), rank = json::object(), similarity = json::object();
        for (Approach a : kAllApproaches) {
            const std::size_t i = approach_index(a);
            rmt[approach_name(a)] = c.rmt[i];
            rank[approach_name(a)] = c.rank[i];
            similarity[approach_name(a)] = c.similarity[i].exact();
        }
        cases.push_back({{"case_id", c.case_id}, {"level", c.level}, {"rmt", rmt}, {"rank", rank},
                         {"similarity", similarity}});
    }
    json histogram = json::object();
    for (Approach a : kAllApproaches) {
        json counts = json::object();
        for (std::size_t r = 0; r < kApproachCount; ++r)
            counts[std::to_string(r + 1)] = report.ranking.histogram[approach_index(a)][r];
        histogram[approach_name(a)] = counts;
    }

    json invalid = json::array();
    for (const auto& c : report.invalid_cases)
        invalid.push_back({{"case_id", c.case_id}, {"level", c.level}, {"reason", c.reason}});

    json approaches = json::array();
    for (Approach a : kAllApproaches) approaches.push_back(approach_name(a));
    return {{"levels", levels},
            {"ranking", {{"method", "dense"}, {"cases", cases}, {"histogram", histogram}}},
            {"config", {{"min_match_length", report.min_match_length}, {"approaches", approaches}}},
            {"invalid_cases", invalid}};
}

std::string ranking_csv(const RankingTable& ranking) {
    std::ostringstream out;
    out << "case_id,level,rmt_sta,rmt_lla,rmt_ext,rank_sta,rank_lla,rank_ext\n";
    for (const auto& c : ranking.cases) {
        out << c.case_id << ',' << c.level;
        for (auto v : c.rmt) out << ',' << v;
        for (auto v : c.rank) out << ',' << v;
        out << '\n';
    }
    return out.str();
}

std::string render_text(const EvaluationReport& report) {
    std::ostringstream out;
    out << "min-match " << report.min_match_length << ", " << report.ranking.cases.size() << " cases, "
        << report.invalid_cases.size() << " invalid\n";
    for (const auto& level : report.levels) {
        out << "\nlevel " << level.level << " (" << level.case_count << " cases)\n";
        for (Approach a : kAllApproaches) {
            const auto& s = level.stats[approach_index(a)];
            std::string name = approach_name(a);
            name.resize(8, ' ');
            out << "  " << name << "mean " << s.mean_rmt.fixed2() << "  zero " << s.zero_rmt_count << "  min "
                << s.min_rmt << "  max " << s.max_rmt << '\n';
        }
        for (const auto& p : level.pairwise)
            out << "  " << approach_name(p.first) << " vs " << approach_name(p.second) << ": " << p.wins << " win, "
                << p.ties << " tie, " << p.losses << " loss\n";
    }
    out << "\nrank distribution\n";
    for (Approach a : kAllApproaches) {
        std::string name = approach_name(a);
        name.resize(8, ' ');
        out << "  " << name;
        for (std::size_t r = 0; r < kApproachCount; ++r)
            out << "  rank " << r + 1 << ": " << report.ranking.histogram[approach_index(a)][r];
        out << '\n';
    }
    for (const auto& c : report.invalid_cases) out << "invalid " << c.case_id << ": " << c.reason << '\n';
    return out.str();
}

void write_report(const EvaluationReport& report, const fs::path& out_dir) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
    write_text(out_dir / "report.json", to_json(report).dump(2) + "\n");
    write_text(out_dir / "ranking.csv", ranking_csv(report.ranking));
}

}  // namespace codesim
