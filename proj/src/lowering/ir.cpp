#include "codesim/ir.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>

namespace codesim {

std::string mnemonic(Opcode op) {
    switch (op) {
        case Opcode::Const: return "CONST";
        case Opcode::Load: return "LOAD";
        case Opcode::Store: return "STORE";
        case Opcode::GLoad: return "GLOAD";
        case Opcode::GStore: return "GSTORE";
        case Opcode::Add: return "ADD";
        case Opcode::Sub: return "SUB";
        case Opcode::Mul: return "MUL";
        case Opcode::Div: return "DIV";
        case Opcode::Rem: return "REM";
        case Opcode::Neg: return "NEG";
        case Opcode::Not: return "NOT";
        case Opcode::IfCmp: return "IFCMP";
        case Opcode::IfFalse: return "IFFALSE";
        case Opcode::Goto: return "GOTO";
        case Opcode::Switch: return "SWITCH";
        case Opcode::Label: return "LABEL";
        case Opcode::Invoke: return "INVOKE";
        case Opcode::Return: return "RETURN";
        case Opcode::RetVal: return "RETVAL";
        case Opcode::Print: return "PRINT";
        case Opcode::Read: return "READ";
        case Opcode::NewArray: return "NEWARRAY";
        case Opcode::ALoadIdx: return "ALOADIDX";
        case Opcode::AStoreIdx: return "ASTOREIDX";
    }
    return "?";
}

std::string cmp_name(CmpOp op) {
    switch (op) {
        case CmpOp::LT: return "LT";
        case CmpOp::LE: return "LE";
        case CmpOp::GT: return "GT";
        case CmpOp::GE: return "GE";
        case CmpOp::EQ: return "EQ";
        case CmpOp::NE: return "NE";
    }
    return "?";
}

CmpOp negate(CmpOp op) {
    switch (op) {
        case CmpOp::LT: return CmpOp::GE;
        case CmpOp::LE: return CmpOp::GT;
        case CmpOp::GT: return CmpOp::LE;
        case CmpOp::GE: return CmpOp::LT;
        case CmpOp::EQ: return CmpOp::NE;
        case CmpOp::NE: return CmpOp::EQ;
    }
    return op;
}

std::string scope_tag_name(ScopeTag tag) {
    switch (tag) {
        case ScopeTag::FunctionRoot: return "fn";
        case ScopeTag::WhileBody: return "while-body";
        case ScopeTag::DoWhileBody: return "dowhile-body";
        case ScopeTag::Then: return "then";
        case ScopeTag::Else: return "else";
        case ScopeTag::CaseArm: return "case-arm";
        case ScopeTag::DefaultArm: return "default-arm";
    }
    return "?";
}

std::string scope_path_text(const ScopePath& path) {
    std::string text;
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (i) text += '/';
        text += scope_tag_name(path[i]);
    }
    return text;
}

namespace {

std::string label_text(int label) { return "L" + std::to_string(label); }

}  // namespace

std::string LowToken::operand_text() const {
    switch (op) {
        case Opcode::Const: return constant;
        case Opcode::Load:
        case Opcode::Store: return std::to_string(slot);
        case Opcode::GLoad:
        case Opcode::GStore: return global_name;
        case Opcode::IfCmp:
            return label == kNoLabel ? cmp_name(cmp) : cmp_name(cmp) + " " + label_text(label);
        case Opcode::IfFalse:
        case Opcode::Goto:
        case Opcode::Label:
            return label == kNoLabel ? std::string() : label_text(label);
        case Opcode::Switch: {
            std::string text = std::to_string(switch_keys.size());
            text += " [";
            for (std::size_t i = 0; i < switch_keys.size(); ++i) {
                if (i) text += ',';
                text += std::to_string(switch_keys[i]);
            }
            text += switch_default ? "] default" : "]";
            for (int t : switch_targets) text += " " + label_text(t);
            return text;
        }
        case Opcode::Invoke: return callee_name + " " + std::to_string(argc);
        default: return {};
    }
}

std::string LowToken::text() const {
    std::string operand = operand_text();
    return operand.empty() ? mnemonic(op) : mnemonic(op) + " " + operand;
}

int stack_pops(const LowToken& t) {
    switch (t.op) {
        case Opcode::Store:
        case Opcode::GStore:
        case Opcode::IfFalse:
        case Opcode::Switch:
        case Opcode::RetVal:
        case Opcode::Print:
        case Opcode::Neg:
        case Opcode::Not:
        case Opcode::NewArray:
            return 1;
        case Opcode::Add:
        case Opcode::Sub:
        case Opcode::Mul:
        case Opcode::Div:
        case Opcode::Rem:
        case Opcode::IfCmp:
        case Opcode::ALoadIdx:
            return 2;
        case Opcode::AStoreIdx:
            return 3;
        case Opcode::Invoke:
            return t.argc;
        default:
            return 0;
    }
}

int stack_effect(const LowToken& t) {
    int pushes = 0;
    switch (t.op) {
        case Opcode::Const:
        case Opcode::Load:
        case Opcode::GLoad:
        case Opcode::Read:
        case Opcode::Add:
        case Opcode::Sub:
        case Opcode::Mul:
        case Opcode::Div:
        case Opcode::Rem:
        case Opcode::Neg:
        case Opcode::Not:
        case Opcode::NewArray:
        case Opcode::ALoadIdx:
            pushes = 1;
            break;
        case Opcode::Invoke:
            pushes = t.returns_value ? 1 : 0;
            break;
        default:
            break;
    }
    return pushes - stack_pops(t);
}

const LowFunction* LowProgram::find(const std::string& name) const {
    auto it = std::find_if(functions.begin(), functions.end(), [&](const LowFunction& f) { return f.name == name; });
    return it == functions.end() ? nullptr : &*it;
}

std::string dump_body(std::span<const LowToken> body) {
    std::string out;
    for (const auto& t : body) {
        out += t.text();
        out += " @ ";
        out += scope_path_text(t.scope);
        out += '\n';
    }
    return out;
}

std::string dump_program(const LowProgram& program) {
    std::string out;
    for (const auto& fn : program.functions) {
        out += "== " + fn.name + "/" + std::to_string(fn.param_count) + " ==\n";
        out += dump_body(fn.body);
    }
    return out;
}

StackCheck check_stack(const LowFunction& fn) {
    const auto& body = fn.body;
    std::map<int, std::size_t> label_at;
    for (std::size_t i = 0; i < body.size(); ++i)
        if (body[i].op == Opcode::Label) label_at[body[i].label] = i;

    std::vector<int> height(body.size() + 1, -1);
    std::deque<std::size_t> work;
    auto fail = [](std::size_t at, const std::string& why) {
        return StackCheck{false, "token " + std::to_string(at) + ": " + why};
    };
    auto flow = [&](std::size_t to, int h) -> bool {
        if (to > body.size()) return false;
        if (height[to] == -1) {
            height[to] = h;
            work.push_back(to);
            return true;
        }
        return height[to] == h;
    };
    auto target = [&](int label) -> std::size_t {
        auto it = label_at.find(label);
        return it == label_at.end() ? body.size() + 1 : it->second;
    };

    if (body.empty()) return {false, "empty body"};
    height[0] = 0;
    work.push_back(0);
    while (!work.empty()) {
        const std::size_t i = work.front();
        work.pop_front();
        if (i == body.size()) return fail(i, "control falls off the end of the body");
        const LowToken& t = body[i];
        const int h = height[i];
        if (h < stack_pops(t)) return fail(i, "stack underflow at " + t.text());
        const int after = h + stack_effect(t);
        switch (t.op) {
            case Opcode::Return:
                if (h != 0) return fail(i, "RETURN with non-empty stack");
                continue;
            case Opcode::RetVal:
                if (h != 1) return fail(i, "RETVAL needs exactly one value");
                continue;
            case Opcode::Goto:
                if (!flow(target(t.label), after)) return fail(i, "inconsistent stack at branch target");
                continue;
            case Opcode::IfCmp:
            case Opcode::IfFalse:
                if (!flow(target(t.label), after)) return fail(i, "inconsistent stack at branch target");
                break;
            case Opcode::Switch:
                for (int l : t.switch_targets)
                    if (!flow(target(l), after)) return fail(i, "inconsistent stack at switch target");
                continue;
            default:
                break;
        }
        if (!flow(i + 1, after)) return fail(i, "inconsistent stack height at join");
    }
    return {};
}

}  // namespace codesim
