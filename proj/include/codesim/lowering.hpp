#pragma once

#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "codesim/ast.hpp"
#include "codesim/ir.hpp"

namespace codesim {

/// Rewrites every `for (init; cond; update) body` into
/// `{ init; while (cond) { body update } }`. Blocks carry no scope tag, so the
/// result lowers exactly like the hand-written while form.
Stmt desugar_for(const Stmt& stmt);
Function desugar_for(const Function& fn);

/// Scope path of every statement of a desugared function body, keyed by
/// statement address. Tokens produced by a statement's own parts (conditions,
/// stores, back-edges) take the statement's path; nested statements extend it
/// with the tag of the construct that encloses them.
using ScopeMap = std::unordered_map<const Stmt*, ScopePath>;
ScopeMap assign_scope_paths(const Function& fn);

struct SlotMap {
    int count = 0;
    std::unordered_map<const Stmt*, int> locals;            // VarDecl -> slot
    std::vector<std::pair<std::string, int>> order;         // params then locals, by slot
};

/// Parameters take slots 0..n-1; each later declaration takes the next slot in
/// textual order. Slots are never reused, so a name redeclared in disjoint
/// blocks gets distinct slots.
SlotMap slot_allocate(const Function& fn);

/// Drops LABELs nothing branches to and renumbers the rest densely in order
/// of first appearance.
void renumber_labels(std::vector<LowToken>& body);

/// Lowers a resolved AST. Throws CompileError on type mismatches, statements
/// after a `return`, and non-void functions that do not end in `return`.
LowProgram compile(const Ast& ast);

}  // namespace codesim
