#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "codesim/frontend.hpp"
#include "codesim/ir.hpp"

namespace codesim {

enum class Approach { STA, LLA, EXT_LLA };

std::string approach_name(Approach approach);  // "sta", "lla", "ext-lla"
std::optional<Approach> parse_approach(std::string_view name);

inline constexpr Approach kAllApproaches[] = {Approach::STA, Approach::LLA, Approach::EXT_LLA};

struct ApproachConfig {
    Approach approach = Approach::EXT_LLA;
    int min_match_length = 3;
    bool linearization_enabled = false;
    bool generalization_enabled = false;
    bool reinterpretation_enabled = false;
    bool weighting_enabled = false;
    bool argument_removal_enabled = false;
    bool invoked_removal_enabled = false;

    static ApproachConfig sta(int mml = 3);
    static ApproachConfig lla(int mml = 3);
    static ApproachConfig ext_lla(int mml = 3);
    static ApproachConfig of(Approach approach, int mml = 3);
};

struct ComparableToken {
    std::string key;   // the only thing matching looks at
    std::string text;  // human-readable rendering
    ScopePath scope;   // empty for STA
    int line = 0;
};

struct TokenSequence {
    std::string unit_name;
    std::vector<ComparableToken> items;
};

/// Replaces every SWITCH and its arms with the if/else-if chain the same
/// selector would compile to, scope paths included.
std::vector<LowToken> reinterpret(std::span<const LowToken> body);

/// Drops LABEL tokens and branch targets. The token after a dropped label or
/// after a branch is flagged as a basic-block leader.
std::vector<LowToken> generalize(std::span<const LowToken> body);

struct HeuristicFailure {
    std::string function;
    std::size_t position = 0;  // index of the INVOKE in the input body
    std::string message;
};

/// Removes the tokens that prepare each call's arguments: the shortest run
/// before the INVOKE, inside its basic block, that leaves exactly argc values.
/// When no such run exists the tokens are kept and a failure is recorded.
std::vector<LowToken> remove_arguments(std::span<const LowToken> body, std::vector<HeuristicFailure>* failures = nullptr,
                                       std::string_view function = {});

/// Strongly connected components of the call graph, indexed by function id.
std::vector<int> call_graph_components(const LowProgram& program);

/// Inlines every call whose callee lies outside the caller's call-graph
/// cycle. Callee slots move to fresh caller slots, bound by one STORE per
/// parameter; RETURN/RETVAL are dropped and scope paths are grafted onto the
/// call site. Slots are then renumbered by first occurrence. Keyed by id.
std::map<int, std::vector<LowToken>> linearize(const LowProgram& program);

/// Ids of functions whose call-graph component has no caller outside itself,
/// in program order.
std::vector<int> remove_invoked(const LowProgram& program);

/// Comparison key of a low-level token under the given configuration.
std::string token_key(const LowToken& token, const ApproachConfig& config);

std::vector<TokenSequence> build_sequences(const SourceUnit& unit, const ApproachConfig& config,
                                           std::vector<HeuristicFailure>* failures = nullptr);

/// `== unit ==` headers followed by one key per line.
std::string dump_sequences(const std::vector<TokenSequence>& sequences);

}  // namespace codesim
