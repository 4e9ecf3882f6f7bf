#pragma once

#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace codesim {

enum class Opcode {
    Const, Load, Store, GLoad, GStore,
    Add, Sub, Mul, Div, Rem, Neg, Not,
    IfCmp, IfFalse, Goto, Switch, Label,
    Invoke, Return, RetVal, Print, Read,
    NewArray, ALoadIdx, AStoreIdx,
};

enum class CmpOp { LT, LE, GT, GE, EQ, NE };

enum class ScopeTag { FunctionRoot, WhileBody, DoWhileBody, Then, Else, CaseArm, DefaultArm };

using ScopePath = std::vector<ScopeTag>;

std::string mnemonic(Opcode op);
std::string cmp_name(CmpOp op);
CmpOp negate(CmpOp op);
std::string scope_tag_name(ScopeTag tag);
std::string scope_path_text(const ScopePath& path);

constexpr int kNoLabel = -1;

struct LowToken {
    Opcode op = Opcode::Return;

    std::string constant;          // CONST: canonical text ("5", "true", "\"hi\"")
    int slot = -1;                 // LOAD / STORE
    int global = -1;               // GLOAD / GSTORE
    std::string global_name;
    CmpOp cmp = CmpOp::EQ;         // IFCMP
    int label = kNoLabel;          // branch target or LABEL id; kNoLabel once erased
    std::vector<std::int64_t> switch_keys;  // SWITCH case values, arm order
    std::vector<int> switch_targets;        // SWITCH arm labels, then default/end label
    bool switch_default = false;
    int callee = -1;               // INVOKE
    std::string callee_name;
    int argc = 0;
    bool returns_value = false;

    ScopePath scope;
    int first_line = 0;
    int last_line = 0;

    // Set on the first token of a basic block once LABEL tokens are erased.
    bool leader = false;

    /// Operand text as printed in dumps; empty when the token has none.
    std::string operand_text() const;
    /// `MNEMONIC[ operand]`
    std::string text() const;

    bool is_branch() const { return op == Opcode::IfCmp || op == Opcode::IfFalse || op == Opcode::Goto || op == Opcode::Switch; }
    bool ends_block() const { return is_branch() || op == Opcode::Return || op == Opcode::RetVal; }
};

/// Net operand-stack change of one token.
int stack_effect(const LowToken& t);
/// Values popped before the push, e.g. 2 for ADD.
int stack_pops(const LowToken& t);

struct LowFunction {
    int id = 0;
    std::string name;
    int param_count = 0;
    bool returns_value = false;
    int slot_count = 0;
    std::vector<LowToken> body;
    std::set<int> invoked_ids;
};

struct LowProgram {
    std::vector<LowFunction> functions;
    int entry = 0;

    const LowFunction* find(const std::string& name) const;
};

inline constexpr const char* kInitFunction = "<init>";

/// `MNEMONIC[ operand] @ scope/path`, one per line.
std::string dump_body(std::span<const LowToken> body);
/// Functions separated by `== name/argc ==` headers, LF endings.
std::string dump_program(const LowProgram& program);

struct StackCheck {
    bool ok = true;
    std::string message;
};

/// Path-sensitive operand stack simulation over a body that still carries
/// its LABEL tokens: never negative, consistent heights at joins, 0 at RETURN
/// and 1 before RETVAL.
StackCheck check_stack(const LowFunction& fn);

}  // namespace codesim
