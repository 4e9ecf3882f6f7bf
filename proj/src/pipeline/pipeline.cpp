#include "codesim/pipeline.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "codesim/lowering.hpp"

namespace codesim {

std::string approach_name(Approach approach) {
    switch (approach) {
        case Approach::STA: return "sta";
        case Approach::LLA: return "lla";
        case Approach::EXT_LLA: return "ext-lla";
    }
    return "?";
}

std::optional<Approach> parse_approach(std::string_view name) {
    for (Approach a : kAllApproaches)
        if (approach_name(a) == name) return a;
    return std::nullopt;
}

ApproachConfig ApproachConfig::sta(int mml) {
    ApproachConfig c;
    c.approach = Approach::STA;
    c.min_match_length = mml;
    return c;
}

ApproachConfig ApproachConfig::lla(int mml) {
    ApproachConfig c;
    c.approach = Approach::LLA;
    c.min_match_length = mml;
    c.linearization_enabled = true;
    c.generalization_enabled = true;
    c.reinterpretation_enabled = true;
    return c;
}

ApproachConfig ApproachConfig::ext_lla(int mml) {
    ApproachConfig c = lla(mml);
    c.approach = Approach::EXT_LLA;
    c.weighting_enabled = true;
    c.argument_removal_enabled = true;
    c.invoked_removal_enabled = true;
    return c;
}

ApproachConfig ApproachConfig::of(Approach approach, int mml) {
    switch (approach) {
        case Approach::STA: return sta(mml);
        case Approach::LLA: return lla(mml);
        case Approach::EXT_LLA: return ext_lla(mml);
    }
    return ext_lla(mml);
}

namespace {

int pushes(const LowToken& t) { return stack_pops(t) + stack_effect(t); }

bool has_prefix(const ScopePath& path, const ScopePath& prefix) {
    return path.size() >= prefix.size() && std::equal(prefix.begin(), prefix.end(), path.begin());
}

class Reinterpreter {
public:
    explicit Reinterpreter(std::span<const LowToken> body) : body_(body) {
        for (const auto& t : body) {
            next_label_ = std::max(next_label_, t.label + 1);
            for (int l : t.switch_targets) next_label_ = std::max(next_label_, l + 1);
        }
    }

    std::vector<LowToken> run() {
        std::vector<LowToken> out;
        range(0, body_.size(), out);
        return out;
    }

private:
    void range(std::size_t begin, std::size_t end, std::vector<LowToken>& out) {
        std::size_t i = begin;
        while (i < end) {
            if (body_[i].op != Opcode::Switch) {
                out.push_back(body_[i++]);
                continue;
            }
            i = switch_region(i, end, out);
        }
    }

    // Rewrites the SWITCH at `at`; returns the index just past its region.
    std::size_t switch_region(std::size_t at, std::size_t end, std::vector<LowToken>& out) {
        const LowToken& sw = body_[at];
        const ScopePath& base = sw.scope;

        // The selector is the shortest suffix of `out` that leaves one value.
        std::size_t sel_begin = out.size();
        int need = 1;
        while (need > 0 && sel_begin > 0) {
            const LowToken& t = out[sel_begin - 1];
            if (t.op == Opcode::Label || t.ends_block() || t.scope != base) break;
            need -= pushes(t);
            need += stack_pops(t);
            --sel_begin;
        }
        if (need != 0) {
            // Not a plain selector; keep the switch as compiled.
            out.push_back(sw);
            return at + 1;
        }
        std::vector<LowToken> selector(out.begin() + static_cast<std::ptrdiff_t>(sel_begin), out.end());
        out.resize(sel_begin);

        const std::size_t cases = sw.switch_keys.size();
        const std::size_t arms = cases + (sw.switch_default ? 1 : 0);
        std::set<int> arm_labels(sw.switch_targets.begin(), sw.switch_targets.begin() + static_cast<std::ptrdiff_t>(arms));
        int done = sw.switch_default ? kNoLabel : sw.switch_targets.back();

        // Region: arm-tagged tokens plus the switch's own LABEL/GOTO tokens.
        std::vector<std::size_t> arm_start;
        std::size_t j = at + 1;
        for (; j < end; ++j) {
            const LowToken& t = body_[j];
            if (t.scope.size() > base.size() && has_prefix(t.scope, base) &&
                (t.scope[base.size()] == ScopeTag::CaseArm || t.scope[base.size()] == ScopeTag::DefaultArm))
                continue;
            if (t.scope != base) break;
            if (t.op == Opcode::Label && arm_labels.count(t.label)) {
                arm_start.push_back(j);
                continue;
            }
            if (t.op == Opcode::Goto && (done == kNoLabel || t.label == done)) {
                done = t.label;
                continue;
            }
            if (t.op == Opcode::Label && t.label == done) continue;
            break;
        }
        const std::size_t region_end = j;

        std::vector<std::vector<LowToken>> bodies;
        for (std::size_t k = 0; k < arm_start.size(); ++k) {
            std::size_t b = arm_start[k] + 1;
            std::size_t e = k + 1 < arm_start.size() ? arm_start[k + 1] : region_end;
            // Strip the switch's own trailing GOTO/LABEL tokens.
            while (e > b && body_[e - 1].scope == base &&
                   ((body_[e - 1].op == Opcode::Goto && body_[e - 1].label == done) ||
                    (body_[e - 1].op == Opcode::Label && body_[e - 1].label == done)))
                --e;
            std::vector<LowToken> arm;
            range(b, e, arm);
            bodies.push_back(std::move(arm));
        }
        if (bodies.size() != arms) {
            // Unexpected layout; leave it alone.
            out.insert(out.end(), selector.begin(), selector.end());
            out.insert(out.end(), body_.begin() + static_cast<std::ptrdiff_t>(at),
                       body_.begin() + static_cast<std::ptrdiff_t>(region_end));
            return region_end;
        }

        chain(0, cases, sw, selector, bodies, base, out);
        return region_end;
    }

    LowToken marker(Opcode op, int label, const ScopePath& scope, const LowToken& like) {
        LowToken t;
        t.op = op;
        t.label = label;
        t.scope = scope;
        t.first_line = like.first_line;
        t.last_line = like.last_line;
        return t;
    }

    // Emits arm k as `if (sel == key_k) { arm } else <rest>` nested at
    // base + else^k, mirroring how an else-if chain compiles.
    void chain(std::size_t k, std::size_t cases, const LowToken& sw, const std::vector<LowToken>& selector,
               std::vector<std::vector<LowToken>>& bodies, const ScopePath& base, std::vector<LowToken>& out) {
        ScopePath here = base;
        here.insert(here.end(), k, ScopeTag::Else);
        auto graft = [&](std::vector<LowToken>& arm, const ScopePath& prefix) {
            for (auto& t : arm) {
                ScopePath p = prefix;
                p.insert(p.end(), t.scope.begin() + static_cast<std::ptrdiff_t>(base.size()) + 1, t.scope.end());
                t.scope = std::move(p);
                out.push_back(std::move(t));
            }
        };
        if (k == cases) {
            if (sw.switch_default) graft(bodies[k], here);
            return;
        }
        for (auto t : selector) {
            t.scope = here;
            out.push_back(std::move(t));
        }
        LowToken key = marker(Opcode::Const, kNoLabel, here, sw);
        key.constant = std::to_string(sw.switch_keys[k]);
        out.push_back(std::move(key));
        const int on_false = next_label_++;
        LowToken test = marker(Opcode::IfCmp, on_false, here, sw);
        test.cmp = CmpOp::NE;
        out.push_back(std::move(test));

        ScopePath then = here;
        then.push_back(ScopeTag::Then);
        graft(bodies[k], then);

        const bool has_else = k + 1 < cases || sw.switch_default;
        if (has_else) {
            const int done = next_label_++;
            out.push_back(marker(Opcode::Goto, done, here, sw));
            out.push_back(marker(Opcode::Label, on_false, here, sw));
            chain(k + 1, cases, sw, selector, bodies, base, out);
            out.push_back(marker(Opcode::Label, done, here, sw));
        } else {
            out.push_back(marker(Opcode::Label, on_false, here, sw));
        }
    }

    std::span<const LowToken> body_;
    int next_label_ = 0;
};

}  // namespace

std::vector<LowToken> reinterpret(std::span<const LowToken> body) {
    std::vector<LowToken> out = Reinterpreter(body).run();
    renumber_labels(out);
    return out;
}

std::vector<LowToken> generalize(std::span<const LowToken> body) {
    std::vector<LowToken> out;
    out.reserve(body.size());
    bool leader = true;
    for (const auto& t : body) {
        if (t.op == Opcode::Label) {
            leader = true;
            continue;
        }
        LowToken g = t;
        g.label = kNoLabel;
        g.switch_targets.clear();
        g.leader = leader;
        leader = g.ends_block();
        out.push_back(std::move(g));
    }
    return out;
}

std::vector<LowToken> remove_arguments(std::span<const LowToken> body, std::vector<HeuristicFailure>* failures,
                                       std::string_view function) {
    std::vector<LowToken> out;
    out.reserve(body.size());
    for (std::size_t i = 0; i < body.size(); ++i) {
        const LowToken& t = body[i];
        if (t.op != Opcode::Invoke || t.argc == 0) {
            out.push_back(t);
            continue;
        }
        int need = t.argc;
        std::size_t j = out.size();
        bool ok = false;
        bool leader = false;
        while (j > 0) {
            const LowToken& p = out[j - 1];
            if (p.ends_block()) break;
            need -= pushes(p);
            if (need < 0) break;
            need += stack_pops(p);
            --j;
            leader = leader || p.leader;
            if (need == 0) {
                ok = true;
                break;
            }
            if (p.leader) break;
        }
        LowToken call = t;
        if (ok) {
            out.resize(j);
            call.leader = call.leader || leader;
        } else if (failures) {
            failures->push_back({std::string(function), i,
                                 "argument preparation for '" + t.callee_name + "' not found in its basic block"});
        }
        out.push_back(std::move(call));
    }
    return out;
}

std::vector<int> call_graph_components(const LowProgram& program) {
    const int n = static_cast<int>(program.functions.size());
    std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
    std::vector<bool> on_stack(n, false);
    std::vector<int> stack;
    int counter = 0, components = 0;

    std::function<void(int)> visit = [&](int v) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack[v] = true;
        for (int w : program.functions[v].invoked_ids) {
            if (index[w] < 0) {
                visit(w);
                low[v] = std::min(low[v], low[w]);
            } else if (on_stack[w]) {
                low[v] = std::min(low[v], index[w]);
            }
        }
        if (low[v] == index[v]) {
            int w;
            do {
                w = stack.back();
                stack.pop_back();
                on_stack[w] = false;
                comp[w] = components;
            } while (w != v);
            ++components;
        }
    };
    for (int v = 0; v < n; ++v)
        if (index[v] < 0) visit(v);
    return comp;
}

namespace {

int slot_bound(const LowFunction& fn, const std::vector<LowToken>& body) {
    int bound = fn.slot_count;
    for (const auto& t : body)
        if (t.op == Opcode::Load || t.op == Opcode::Store) bound = std::max(bound, t.slot + 1);
    return bound;
}

void renumber_slots(std::vector<LowToken>& body) {
    std::map<int, int> renamed;
    for (auto& t : body) {
        if (t.op != Opcode::Load && t.op != Opcode::Store) continue;
        auto [it, fresh] = renamed.emplace(t.slot, static_cast<int>(renamed.size()));
        t.slot = it->second;
    }
}

}  // namespace

std::map<int, std::vector<LowToken>> linearize(const LowProgram& program) {
    const std::vector<int> comp = call_graph_components(program);
    std::map<int, std::vector<LowToken>> memo;

    std::function<const std::vector<LowToken>&(int)> expand = [&](int id) -> const std::vector<LowToken>& {
        if (auto it = memo.find(id); it != memo.end()) return it->second;
        const LowFunction& fn = program.functions[id];
        std::vector<LowToken> out;
        int next_slot = slot_bound(fn, fn.body);
        for (const auto& t : fn.body) {
            if (t.op != Opcode::Invoke || comp[t.callee] == comp[id]) {
                out.push_back(t);
                continue;
            }
            const LowFunction& callee = program.functions[t.callee];
            const std::vector<LowToken>& inner = expand(t.callee);
            const int base = next_slot;
            next_slot += slot_bound(callee, inner);

            for (int p = 0; p < callee.param_count; ++p) {
                LowToken bind;
                bind.op = Opcode::Store;
                bind.slot = base + p;
                bind.scope = t.scope;
                bind.first_line = t.first_line;
                bind.last_line = t.last_line;
                bind.leader = p == 0 && t.leader;
                out.push_back(std::move(bind));
            }
            for (const auto& c : inner) {
                if (c.op == Opcode::Return || c.op == Opcode::RetVal) continue;
                LowToken copy = c;
                if (copy.op == Opcode::Load || copy.op == Opcode::Store) copy.slot += base;
                copy.scope = t.scope;
                copy.scope.insert(copy.scope.end(), c.scope.begin() + 1, c.scope.end());
                out.push_back(std::move(copy));
            }
        }
        return memo[id] = std::move(out);
    };

    std::map<int, std::vector<LowToken>> result;
    for (const auto& fn : program.functions) {
        std::vector<LowToken> body = expand(fn.id);
        renumber_slots(body);
        result[fn.id] = std::move(body);
    }
    return result;
}

std::vector<int> remove_invoked(const LowProgram& program) {
    const std::vector<int> comp = call_graph_components(program);
    std::set<int> called_from_outside;
    for (const auto& fn : program.functions)
        for (int callee : fn.invoked_ids)
            if (comp[callee] != comp[fn.id]) called_from_outside.insert(comp[callee]);
    std::vector<int> pool;
    for (const auto& fn : program.functions)
        if (!called_from_outside.count(comp[fn.id])) pool.push_back(fn.id);
    return pool;
}

std::string token_key(const LowToken& token, const ApproachConfig& config) {
    std::string key = token.op == Opcode::Invoke ? "INVOKE " + std::to_string(token.argc) : token.text();
    if (config.weighting_enabled) key += " @ " + scope_path_text(token.scope);
    return key;
}

std::vector<TokenSequence> build_sequences(const SourceUnit& unit, const ApproachConfig& config,
                                           std::vector<HeuristicFailure>* failures) {
    if (config.approach == Approach::STA) {
        TokenSequence seq;
        seq.unit_name = unit.origin;
        for (const auto& t : unit.tokens)
            seq.items.push_back({token_kind_name(t.kind) + " " + t.lexeme, t.lexeme, {}, t.pos.line});
        return {std::move(seq)};
    }

    LowProgram program = compile(unit.ast);
    for (auto& fn : program.functions) {
        if (config.reinterpretation_enabled) fn.body = reinterpret(fn.body);
        if (config.generalization_enabled) fn.body = generalize(fn.body);
        if (config.argument_removal_enabled) fn.body = remove_arguments(fn.body, failures, fn.name);
    }

    std::map<int, std::vector<LowToken>> bodies;
    if (config.linearization_enabled) {
        bodies = linearize(program);
    } else {
        for (const auto& fn : program.functions) bodies[fn.id] = fn.body;
    }

    std::vector<int> pool;
    if (config.invoked_removal_enabled) {
        pool = remove_invoked(program);
    } else {
        for (const auto& fn : program.functions) pool.push_back(fn.id);
    }

    std::vector<TokenSequence> out;
    for (int id : pool) {
        TokenSequence seq;
        seq.unit_name = program.functions[id].name;
        for (const auto& t : bodies[id]) {
            std::string text = t.text() + " @ " + scope_path_text(t.scope);
            seq.items.push_back({token_key(t, config), std::move(text), t.scope, t.first_line});
        }
        out.push_back(std::move(seq));
    }
    return out;
}

std::string dump_sequences(const std::vector<TokenSequence>& sequences) {
    std::string out;
    for (const auto& seq : sequences) {
        out += "== " + seq.unit_name + " ==\n";
        for (const auto& item : seq.items) out += item.key + "\n";
    }
    return out;
}

}  // namespace codesim
