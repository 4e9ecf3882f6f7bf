#include <algorithm>
#include <fstream>
#include <random>

#include "codesim/attacks.hpp"
#include "codesim/lowering.hpp"
#include "json.hpp"

namespace codesim {

namespace {

namespace fs = std::filesystem;
using Rng = std::mt19937_64;
using K = AttackKind;

// One planned case: the signature kind plus lower-level kinds it always
// carries.
struct Slot {
    K signature;
    std::vector<K> forced{};
};

// Case slots per level, cycled to fill the per-level count. Level-3 and
// level-5 mixes are weighted toward the transformations the low-level view
// absorbs, with one case each of the ones it is meant to expose. Two inline
// cases also move a declaration to global scope, so level 4 carries some
// level-3 damage the way a real submission would.
const std::vector<Slot>& slot_plan(int level) {
    static const std::vector<std::vector<Slot>> plans{
        {{K::CommentStrip}, {K::WhitespaceReflow}},
        {{K::RenameLocals}, {K::RenameFunctions}},
        {{K::RelocateDeclInBlock}, {K::RelocateDeclInBlock}, {K::RelocateDeclInBlock}, {K::RelocateDeclToGlobal},
         {K::RelocateDeclInBlock}, {K::RelocateDeclInBlock}, {K::RelocateDeclInBlock}, {K::RelocateDeclOutOfLoop},
         {K::RelocateDeclInBlock}, {K::RelocateDeclInBlock}},
        {{K::InlineFunction}, {K::ExtractBlock}, {K::InlineFunction, {K::RelocateDeclToGlobal}},
         {K::InlineFunction}, {K::ExtractBlock}, {K::InlineFunction}, {K::ExtractBlock},
         {K::InlineFunction, {K::RelocateDeclToGlobal}}, {K::InlineFunction}, {K::ExtractBlock}},
        {{K::WhileToFor}, {K::ExpandCompoundAssign}, {K::SwitchToIfChain}, {K::WhileToFor}, {K::WhileToDoWhile},
         {K::SwitchToIfChain}, {K::WhileToFor}, {K::ExpandCompoundAssign}, {K::SwitchToIfChain}, {K::WhileToFor}},
        {{K::LogicRewrite}},
    };
    return plans[static_cast<std::size_t>(level - 1)];
}

// Lower-level kinds a case may add on top of its signature kind, each with
// the percentage chance of being drawn. Levels are inclusive, so higher
// levels lean on the renaming and relocation a plagiarist does anyway.
struct Extra {
    K kind;
    unsigned percent;
};

std::vector<Extra> extra_pool(K signature) {
    switch (signature) {
        case K::CommentStrip:
        case K::WhitespaceReflow:
            return {};
        case K::RenameLocals:
        case K::RenameFunctions:
            return {{K::WhitespaceReflow, 50}};
        case K::RelocateDeclInBlock:
        case K::RelocateDeclToGlobal:
        case K::RelocateDeclOutOfLoop:
        case K::WhileToFor:
        case K::WhileToDoWhile:
            return {{K::RenameLocals, 50}, {K::RenameFunctions, 50}, {K::WhitespaceReflow, 50}};
        case K::InlineFunction:
        case K::ExtractBlock:
            return {{K::RelocateDeclInBlock, 50}, {K::RenameLocals, 70},
                    {K::RenameFunctions, 40}, {K::WhitespaceReflow, 50}};
        case K::ExpandCompoundAssign:
        case K::SwitchToIfChain:
            return {{K::RelocateDeclInBlock, 50}, {K::RenameLocals, 50}, {K::RenameFunctions, 50},
                    {K::WhitespaceReflow, 50}};
        case K::LogicRewrite:
            return {{K::RelocateDeclInBlock, 50}, {K::RenameLocals, 100}, {K::RenameFunctions, 50},
                    {K::WhitespaceReflow, 50}};
        default:
            return {};
    }
}

bool same_behaviour(const SourceUnit& a, const SourceUnit& b, const std::string& input) {
    try {
        return evaluate_program(a, input) == evaluate_program(b, input);
    } catch (const Error&) {
        return false;
    }
}

struct Attempt {
    SourceUnit result;
    std::vector<AttackSpec> applied;
};

// The signature and forced kinds must apply; drawn extras that do not apply
// are left out.
std::optional<Attempt> compose(const SourceUnit& original, const SeedProgram& seed, const Slot& slot, Rng& rng) {
    std::vector<AttackSpec> planned{AttackSpec::of(slot.signature, rng())};
    for (K kind : slot.forced) planned.push_back(AttackSpec::of(kind, rng()));
    for (const Extra& extra : extra_pool(slot.signature))
        if (rng() % 100 < extra.percent) planned.push_back(AttackSpec::of(extra.kind, rng()));
    std::stable_sort(planned.begin(), planned.end(), [](const AttackSpec& x, const AttackSpec& y) {
        // Highest level first; text-level layout changes go last.
        const int lx = x.kind == K::WhitespaceReflow ? 0 : x.level;
        const int ly = y.kind == K::WhitespaceReflow ? 0 : y.level;
        return lx > ly;
    });

    Attempt out{original, {}};
    const std::string* variant = seed.logic_variant ? &*seed.logic_variant : nullptr;
    for (const auto& spec : planned) {
        try {
            out.result = apply_attack(out.result, spec, variant);
            out.applied.push_back(spec);
        } catch (const NotApplicable&) {
            if (spec.kind == slot.signature ||
                std::find(slot.forced.begin(), slot.forced.end(), spec.kind) != slot.forced.end())
                return std::nullopt;
        }
    }
    return out;
}

std::string two_digits(int n) { return (n < 10 ? "0" : "") + std::to_string(n); }

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
}

nlohmann::json specs_json(const std::vector<AttackSpec>& specs) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& s : specs) out.push_back({{"level", s.level}, {"kind", attack_kind_name(s.kind)}, {"seed", s.seed}});
    return out;
}

}  // namespace

std::vector<SeedProgram> load_seeds(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw IoError("seed directory " + dir.string() + " not found");
    std::vector<SeedProgram> seeds;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string file = entry.path().filename().string();
        if (!entry.is_regular_file() || file.size() <= 3 || !file.ends_with(".mj") || file.ends_with(".logic.mj")) continue;
        SeedProgram seed;
        seed.name = file.substr(0, file.size() - 3);
        seed.text = read_file(entry.path());
        const fs::path input = dir / (seed.name + ".in");
        seed.input = fs::exists(input) ? read_file(input) : "";
        const fs::path variant = dir / (seed.name + ".logic.mj");
        if (fs::exists(variant)) seed.logic_variant = read_file(variant);
        seeds.push_back(std::move(seed));
    }
    std::sort(seeds.begin(), seeds.end(), [](const SeedProgram& a, const SeedProgram& b) { return a.name < b.name; });
    if (seeds.empty()) throw IoError("no seed programs in " + dir.string());
    return seeds;
}

GeneratedCorpus generate_cases(const std::vector<SeedProgram>& seeds, int per_level_count, std::uint64_t seed) {
    if (seeds.empty()) throw GenerationExhausted("no seed programs");
    std::vector<SourceUnit> originals;
    for (const auto& s : seeds) {
        originals.push_back(parse_source(s.text, s.name + ".mj"));
        compile(originals.back().ast);
    }

    GeneratedCorpus corpus;
    corpus.seed = seed;
    corpus.per_level_count = per_level_count;
    const std::size_t n = seeds.size();
    for (int level = 1; level <= 6; ++level) {
        std::seed_seq sequence{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                               static_cast<std::uint32_t>(level)};
        Rng rng(sequence);
        const auto& plan = slot_plan(level);
        std::size_t next_seed = static_cast<std::size_t>(rng() % n);
        for (int index = 0; index < per_level_count; ++index) {
            const Slot& slot = plan[static_cast<std::size_t>(index) % plan.size()];
            std::optional<CaseRecord> record;
            const std::size_t budget = 3 * n;
            for (std::size_t attempt = 0; attempt < budget && !record; ++attempt) {
                const std::size_t pick = next_seed++ % n;
                const SeedProgram& program = seeds[pick];
                auto composed = compose(originals[pick], program, slot, rng);
                if (!composed) continue;
                try {
                    compile(composed->result.ast);
                } catch (const Error&) {
                    continue;
                }
                if (!same_behaviour(originals[pick], composed->result, program.input)) continue;
                CaseRecord c;
                c.case_id = "l" + std::to_string(level) + "-" + two_digits(index + 1) + "-" + program.name;
                c.level = level;
                c.seed_program = program.name;
                c.original = program.text;
                c.plagiarized = composed->result.text;
                c.input = program.input;
                c.attacks = std::move(composed->applied);
                record = std::move(c);
            }
            if (!record)
                throw GenerationExhausted("level " + std::to_string(level) + ": no seed program accepts " +
                                          attack_kind_name(slot.signature));
            corpus.cases.push_back(std::move(*record));
        }
    }
    return corpus;
}

void write_corpus(const GeneratedCorpus& corpus, const fs::path& out_dir) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

    nlohmann::json cases = nlohmann::json::array();
    nlohmann::json counts = nlohmann::json::object();
    for (int level = 1; level <= 6; ++level) counts["level-" + std::to_string(level)] = 0;
    for (const auto& c : corpus.cases) {
        const fs::path dir = out_dir / ("level-" + std::to_string(c.level)) / c.case_id;
        fs::create_directories(dir, ec);
        if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
        write_text(dir / "original.mj", c.original);
        write_text(dir / "plagiarized.mj", c.plagiarized);
        write_text(dir / "input.txt", c.input);
        nlohmann::json meta{{"case_id", c.case_id},
                            {"level", c.level},
                            {"seed_program", c.seed_program},
                            {"attacks", specs_json(c.attacks)}};
        write_text(dir / "attacks.json", meta.dump(2) + "\n");
        cases.push_back(std::move(meta));
        counts["level-" + std::to_string(c.level)] = counts["level-" + std::to_string(c.level)].get<int>() + 1;
    }
    nlohmann::json manifest{{"generator_seed", corpus.seed},
                            {"per_level_count", corpus.per_level_count},
                            {"counts", counts},
                            {"total", corpus.cases.size()},
                            {"cases", cases}};
    write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");
}

GeneratedCorpus generate_corpus(const fs::path& seeds_dir, const fs::path& out_dir, int per_level_count,
                                std::uint64_t seed) {
    GeneratedCorpus corpus = generate_cases(load_seeds(seeds_dir), per_level_count, seed);
    write_corpus(corpus, out_dir);
    return corpus;
}

}  // namespace codesim
