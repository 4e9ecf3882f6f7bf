#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "codesim/errors.hpp"
#include "codesim/frontend.hpp"

namespace codesim {

// ---------------------------------------------------------------------------
// Reference evaluator

class RuntimeFault : public Error {
public:
    using Error::Error;
};

class StepBudgetExceeded : public Error {
public:
    using Error::Error;
};

inline constexpr std::size_t kDefaultStepBudget = 2'000'000;

/// Whitespace-separated integers; anything else is an IoError.
std::vector<std::int64_t> parse_input_script(std::string_view text);

/// Runs global initializers then `main`, returning one entry per print().
/// read() past the end of the script is a RuntimeFault.
std::vector<std::string> evaluate_program(const Ast& ast, const std::vector<std::int64_t>& input,
                                          std::size_t step_budget = kDefaultStepBudget);
std::vector<std::string> evaluate_program(const SourceUnit& unit, std::string_view input_script,
                                          std::size_t step_budget = kDefaultStepBudget);

// ---------------------------------------------------------------------------
// Attacks

enum class AttackKind {
    CommentStrip,
    WhitespaceReflow,
    RenameLocals,
    RenameFunctions,
    RelocateDeclInBlock,
    RelocateDeclToGlobal,
    RelocateDeclOutOfLoop,
    InlineFunction,
    ExtractBlock,
    WhileToFor,
    WhileToDoWhile,
    SwapIfArms,
    ExpandCompoundAssign,
    SwitchToIfChain,
    LogicRewrite,
    RenameEntryArtifacts,  // outside the taxonomy; never scored
};

std::string attack_kind_name(AttackKind kind);
std::optional<AttackKind> parse_attack_kind(std::string_view name);
/// Taxonomy level a kind belongs to; 0 for RenameEntryArtifacts.
int attack_level(AttackKind kind);

struct AttackSpec {
    int level = 1;
    AttackKind kind = AttackKind::CommentStrip;
    std::uint64_t seed = 0;

    static AttackSpec of(AttackKind kind, std::uint64_t seed) { return {attack_level(kind), kind, seed}; }
};

class NotApplicable : public Error {
public:
    using Error::Error;
};

class GenerationExhausted : public Error {
public:
    using Error::Error;
};

class CorpusFormatError : public Error {
public:
    using Error::Error;
};

/// Applies one transformation and re-parses the result. Text-level kinds
/// (comment-strip, whitespace-reflow, rename-entry-artifacts) keep the rest
/// of the text as is; all others print the transformed AST. logic-rewrite
/// substitutes `logic_variant`. Throws NotApplicable when the program offers
/// nothing to transform.
SourceUnit apply_attack(const SourceUnit& unit, const AttackSpec& spec, const std::string* logic_variant = nullptr);

// ---------------------------------------------------------------------------
// Corpus

struct SeedProgram {
    std::string name;
    std::string text;
    std::string input;                        // pinned input script
    std::optional<std::string> logic_variant; // hand-authored level-6 rewrite
};

/// `<name>.mj` with `<name>.in` and optional `<name>.logic.mj`, sorted by name.
std::vector<SeedProgram> load_seeds(const std::filesystem::path& dir);

struct CaseRecord {
    std::string case_id;
    int level = 1;
    std::string seed_program;
    std::string original;
    std::string plagiarized;
    std::string input;
    std::vector<AttackSpec> attacks;  // in application order
};

struct GeneratedCorpus {
    std::uint64_t seed = 0;
    int per_level_count = 0;
    std::vector<CaseRecord> cases;
};

inline constexpr std::uint64_t kDefaultCorpusSeed = 20240917;

/// Builds per_level_count cases for each of the six levels. Levels 1-5 must
/// keep the evaluator trace on the pinned input; a failing candidate is
/// retried with the next seed program and a fresh attack seed.
GeneratedCorpus generate_cases(const std::vector<SeedProgram>& seeds, int per_level_count, std::uint64_t seed);

/// generate_cases + write_corpus.
GeneratedCorpus generate_corpus(const std::filesystem::path& seeds_dir, const std::filesystem::path& out_dir,
                                int per_level_count, std::uint64_t seed);

/// `<root>/level-<n>/<case-id>/{original.mj, plagiarized.mj, input.txt, attacks.json}` plus `manifest.json`.
void write_corpus(const GeneratedCorpus& corpus, const std::filesystem::path& out_dir);

}  // namespace codesim
