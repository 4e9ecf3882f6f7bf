#include "codesim/lowering.hpp"

namespace codesim {

Stmt desugar_for(const Stmt& stmt) {
    Stmt out = stmt;
    out.body.clear();
    out.for_init.clear();
    out.for_update.clear();
    out.arms.clear();
    for (const auto& s : stmt.body) out.body.push_back(desugar_for(s));
    for (const auto& arm : stmt.arms) {
        SwitchArm a = arm;
        a.block = desugar_for(arm.block);
        out.arms.push_back(std::move(a));
    }
    if (stmt.kind != StmtKind::For) return out;

    Stmt loop;
    loop.kind = StmtKind::While;
    loop.pos = stmt.pos;
    if (stmt.for_has_cond) loop.exprs.push_back(stmt.cond());
    Stmt body = Stmt::block({out.body.front()});
    body.pos = stmt.loop_body().pos;
    for (const auto& u : stmt.for_update) body.body.push_back(u);
    loop.body.push_back(std::move(body));

    Stmt wrapper = Stmt::block({});
    wrapper.pos = stmt.pos;
    for (const auto& i : stmt.for_init) wrapper.body.push_back(i);
    wrapper.body.push_back(std::move(loop));
    return wrapper;
}

Function desugar_for(const Function& fn) {
    Function out = fn;
    out.body = desugar_for(fn.body);
    return out;
}

namespace {

void assign(const Stmt& s, const ScopePath& path, ScopeMap& map) {
    map[&s] = path;
    auto nested = [&](const Stmt& child, ScopeTag tag) {
        ScopePath p = path;
        p.push_back(tag);
        assign(child, p, map);
    };
    switch (s.kind) {
        case StmtKind::If:
            nested(s.body[0], ScopeTag::Then);
            if (s.has_else()) nested(s.body[1], ScopeTag::Else);
            break;
        case StmtKind::While:
        case StmtKind::For:
            nested(s.loop_body(), ScopeTag::WhileBody);
            for (const auto& i : s.for_init) assign(i, path, map);
            for (const auto& u : s.for_update) {
                ScopePath p = path;
                p.push_back(ScopeTag::WhileBody);
                assign(u, p, map);
            }
            break;
        case StmtKind::DoWhile:
            nested(s.loop_body(), ScopeTag::DoWhileBody);
            break;
        case StmtKind::Switch:
            for (const auto& arm : s.arms) nested(arm.block, arm.is_default ? ScopeTag::DefaultArm : ScopeTag::CaseArm);
            break;
        case StmtKind::Block:
            for (const auto& child : s.body) assign(child, path, map);
            break;
        default:
            break;
    }
}

}  // namespace

ScopeMap assign_scope_paths(const Function& fn) {
    ScopeMap map;
    assign(fn.body, ScopePath{ScopeTag::FunctionRoot}, map);
    return map;
}

SlotMap slot_allocate(const Function& fn) {
    SlotMap slots;
    for (const auto& p : fn.params) slots.order.emplace_back(p.name, slots.count++);
    for_each_stmt(fn.body, [&](const Stmt& s) {
        if (s.kind != StmtKind::VarDecl) return;
        slots.locals[&s] = slots.count;
        slots.order.emplace_back(s.name, slots.count++);
    });
    return slots;
}

}  // namespace codesim
