#include "codesim/cli.hpp"

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <optional>

#include "CLI11.hpp"
#include "codesim/attacks.hpp"
#include "codesim/harness.hpp"
#include "codesim/lowering.hpp"
#include "codesim/matcher.hpp"

namespace codesim {

namespace {

namespace fs = std::filesystem;

const std::map<std::string, Approach> kApproachNames{
    {"sta", Approach::STA}, {"lla", Approach::LLA}, {"ext-lla", Approach::EXT_LLA}};

// Generator seed: --seed, else CODESIM_SEED, else the built-in default.
std::uint64_t generator_seed(const std::optional<std::uint64_t>& flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("CODESIM_SEED"); env && *env) {
        std::uint64_t value = 0;
        const std::string text(env);
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc() || ptr != text.data() + text.size())
            throw CLI::ValidationError("CODESIM_SEED", "not an unsigned integer: " + text);
        return value;
    }
    return kDefaultCorpusSeed;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Token-based source similarity for MiniJ programs", "codesim"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    Approach approach = Approach::EXT_LLA;
    int mml = 3;
    std::string format = "text";
    const auto mml_check = CLI::Range(1, 1000);

    auto* compare_cmd = app.add_subcommand("compare", "Compare two programs");
    std::string path_a, path_b;
    compare_cmd->add_option("a", path_a, "First program")->required();
    compare_cmd->add_option("b", path_b, "Second program")->required();
    compare_cmd->add_option("--approach", approach, "sta, lla or ext-lla")
        ->transform(CLI::CheckedTransformer(kApproachNames, CLI::ignore_case))
        ->default_str("ext-lla");
    compare_cmd->add_option("--min-match", mml, "Minimum match length")->check(mml_check)->capture_default_str();
    compare_cmd->add_option("--format", format, "text or json")
        ->check(CLI::IsMember({"text", "json"}))
        ->capture_default_str();

    auto* tokens_cmd = app.add_subcommand("tokens", "Print the comparable token sequences of a program");
    std::string tokens_path;
    tokens_cmd->add_option("file", tokens_path, "Program")->required();
    tokens_cmd->add_option("--approach", approach, "sta, lla or ext-lla")
        ->transform(CLI::CheckedTransformer(kApproachNames, CLI::ignore_case))
        ->default_str("ext-lla");

    auto* dump_cmd = app.add_subcommand("dump", "Print the syntax tree or the compiled low-level program");
    std::string dump_path, dump_what = "ir";
    dump_cmd->add_option("file", dump_path, "Program")->required();
    dump_cmd->add_option("--what", dump_what, "ast or ir")->check(CLI::IsMember({"ast", "ir"}))->capture_default_str();

    auto* corpus_cmd = app.add_subcommand("corpus", "Generate or evaluate a plagiarism corpus");
    corpus_cmd->require_subcommand(1);

    auto* generate_cmd = corpus_cmd->add_subcommand("generate", "Generate cases from seed programs");
    std::string seeds_dir, generate_out;
    int per_level = 10;
    std::optional<std::uint64_t> seed_flag;
    generate_cmd->add_option("--seeds", seeds_dir, "Seed program directory")->required();
    generate_cmd->add_option("--out", generate_out, "Output directory")->required();
    generate_cmd->add_option("--per-level", per_level, "Cases per level")
        ->check(CLI::Range(1, 10000))
        ->capture_default_str();
    generate_cmd->add_option("--seed", seed_flag, "Generator seed (overrides CODESIM_SEED)");

    auto* evaluate_cmd = corpus_cmd->add_subcommand("evaluate", "Compare every case under all approaches");
    std::string corpus_dir, evaluate_out;
    evaluate_cmd->add_option("--corpus", corpus_dir, "Corpus directory")->required();
    evaluate_cmd->add_option("--min-match", mml, "Minimum match length")->check(mml_check)->capture_default_str();
    evaluate_cmd->add_option("--out", evaluate_out, "Directory for report.json and ranking.csv");
    evaluate_cmd->add_option("--format", format, "Standard output rendering: text, json or csv")
        ->check(CLI::IsMember({"text", "json", "csv"}))
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // --help and --version come through here with a zero exit code.
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (compare_cmd->parsed()) {
            const auto result = compare(load(path_a), load(path_b), ApproachConfig::of(approach, mml));
            out << (format == "json" ? to_json(result).dump(2) + "\n" : render_text(result));
        } else if (tokens_cmd->parsed()) {
            out << dump_sequences(build_sequences(load(tokens_path), ApproachConfig::of(approach)));
        } else if (dump_cmd->parsed()) {
            const SourceUnit unit = load(dump_path);
            out << (dump_what == "ast" ? dump_ast(unit.ast) : dump_program(compile(unit.ast)));
        } else if (generate_cmd->parsed()) {
            const std::uint64_t seed = generator_seed(seed_flag);
            const auto corpus = generate_corpus(seeds_dir, generate_out, per_level, seed);
            out << "generated " << corpus.cases.size() << " cases (seed " << seed << ") in " << generate_out << "\n";
        } else if (evaluate_cmd->parsed()) {
            const auto report = evaluate_corpus(corpus_dir, mml);
            if (!evaluate_out.empty()) write_report(report, evaluate_out);
            if (format == "json")
                out << to_json(report).dump(2) << "\n";
            else if (format == "csv")
                out << ranking_csv(report.ranking);
            else
                out << render_text(report);
        }
    } catch (const CLI::ValidationError& e) {
        err << "codesim: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "codesim: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitOk;
}

}  // namespace codesim
