#include <charconv>
#include <map>
#include <memory>

#include "codesim/attacks.hpp"

namespace codesim {

namespace {

struct Value {
    TypeKind type = TypeKind::Int;
    std::int64_t i = 0;
    bool b = false;
    std::string s;
    std::shared_ptr<std::vector<std::int64_t>> arr;

    static Value of_int(std::int64_t v) {
        Value x;
        x.i = v;
        return x;
    }
    static Value of_bool(bool v) {
        Value x;
        x.type = TypeKind::Bool;
        x.b = v;
        return x;
    }
};

Value default_value(TypeKind type) {
    Value v;
    v.type = type == TypeKind::Void ? TypeKind::Int : type;
    return v;
}

// Two's-complement wrapping, so overflow is defined behaviour.
std::int64_t wrap(std::uint64_t v) { return static_cast<std::int64_t>(v); }

std::string unquote(const std::string& lexeme) {
    if (lexeme.size() < 2) return lexeme;
    std::string out;
    for (std::size_t k = 1; k + 1 < lexeme.size(); ++k) {
        if (lexeme[k] == '\\' && k + 2 < lexeme.size()) {
            const char c = lexeme[++k];
            out += c == 'n' ? '\n' : c == 't' ? '\t' : c;
        } else {
            out += lexeme[k];
        }
    }
    return out;
}

std::string render(const Value& v) {
    switch (v.type) {
        case TypeKind::Bool: return v.b ? "true" : "false";
        case TypeKind::Str: return v.s;
        case TypeKind::IntArray: return v.arr ? "int[" + std::to_string(v.arr->size()) + "]" : "null";
        default: return std::to_string(v.i);
    }
}

enum class Flow { Normal, Return };

class Evaluator {
public:
    Evaluator(const Ast& ast, const std::vector<std::int64_t>& input, std::size_t budget)
        : ast_(ast), input_(input), budget_(budget) {}

    std::vector<std::string> run() {
        for (const auto& g : ast_.globals) {
            Value v = g.init.empty() ? default_value(g.type) : eval(g.init.front());
            globals_[g.name] = v;
        }
        call(*ast_.find_function("main"), {});
        return std::move(output_);
    }

private:
    using Scope = std::map<std::string, Value>;
    struct Frame {
        std::vector<Scope> scopes;
        Value ret;
    };

    void tick(SourcePos pos) {
        if (++steps_ > budget_) throw StepBudgetExceeded("step budget exceeded at " + to_string(pos));
    }

    [[noreturn]] static void fault(SourcePos pos, const std::string& what) {
        throw RuntimeFault("runtime fault at " + to_string(pos) + ": " + what);
    }

    Value* lookup(const std::string& name) {
        if (!frames_.empty()) {
            auto& scopes = frames_.back().scopes;
            for (auto it = scopes.rbegin(); it != scopes.rend(); ++it) {
                auto found = it->find(name);
                if (found != it->end()) return &found->second;
            }
        }
        auto g = globals_.find(name);
        return g == globals_.end() ? nullptr : &g->second;
    }

    Value& variable(const std::string& name, SourcePos pos) {
        Value* v = lookup(name);
        if (!v) fault(pos, "unknown variable '" + name + "'");
        return *v;
    }

    Value call(const Function& fn, std::vector<Value> args) {
        if (frames_.size() > 10'000) fault(fn.pos, "call depth exceeded");
        Frame frame;
        frame.scopes.emplace_back();
        for (std::size_t k = 0; k < fn.params.size(); ++k) frame.scopes.back()[fn.params[k].name] = std::move(args[k]);
        frame.ret = default_value(fn.return_type);
        frames_.push_back(std::move(frame));
        block(fn.body);
        Value result = std::move(frames_.back().ret);
        frames_.pop_back();
        return result;
    }

    Flow block(const Stmt& b) {
        frames_.back().scopes.emplace_back();
        Flow flow = Flow::Normal;
        for (const auto& s : b.body) {
            flow = stmt(s);
            if (flow == Flow::Return) break;
        }
        frames_.back().scopes.pop_back();
        return flow;
    }

    std::int64_t as_int(const Value& v, SourcePos pos) {
        if (v.type != TypeKind::Int) fault(pos, "integer expected");
        return v.i;
    }

    bool truth(const Value& v, SourcePos pos) {
        if (v.type != TypeKind::Bool) fault(pos, "boolean expected");
        return v.b;
    }

    std::vector<std::int64_t>& array(const Value& v, SourcePos pos) {
        if (v.type != TypeKind::IntArray || !v.arr) fault(pos, "array expected");
        return *v.arr;
    }

    std::size_t index(const std::vector<std::int64_t>& a, std::int64_t i, SourcePos pos) {
        if (i < 0 || static_cast<std::uint64_t>(i) >= a.size()) fault(pos, "index " + std::to_string(i) + " out of bounds");
        return static_cast<std::size_t>(i);
    }

    std::int64_t arith(const std::string& op, std::int64_t a, std::int64_t b, SourcePos pos) {
        const auto ua = static_cast<std::uint64_t>(a), ub = static_cast<std::uint64_t>(b);
        if (op == "+") return wrap(ua + ub);
        if (op == "-") return wrap(ua - ub);
        if (op == "*") return wrap(ua * ub);
        if (b == 0) fault(pos, "division by zero");
        if (b == -1) return op == "/" ? wrap(0 - ua) : 0;
        return op == "/" ? a / b : a % b;
    }

    Flow stmt(const Stmt& s) {
        tick(s.pos);
        switch (s.kind) {
            case StmtKind::VarDecl:
                frames_.back().scopes.back()[s.name] = s.has_init() ? eval(s.exprs.front()) : default_value(s.decl_type);
                return Flow::Normal;
            case StmtKind::Assign:
                assign(s);
                return Flow::Normal;
            case StmtKind::If:
                if (truth(eval(s.cond()), s.pos)) return block(s.body[0]);
                if (!s.has_else()) return Flow::Normal;
                return s.body[1].kind == StmtKind::Block ? block(s.body[1]) : stmt(s.body[1]);
            case StmtKind::While:
                while (truth(eval(s.cond()), s.pos)) {
                    tick(s.pos);
                    if (block(s.loop_body()) == Flow::Return) return Flow::Return;
                }
                return Flow::Normal;
            case StmtKind::DoWhile:
                do {
                    tick(s.pos);
                    if (block(s.loop_body()) == Flow::Return) return Flow::Return;
                } while (truth(eval(s.cond()), s.pos));
                return Flow::Normal;
            case StmtKind::For: {
                frames_.back().scopes.emplace_back();
                Flow flow = Flow::Normal;
                for (const auto& i : s.for_init) stmt(i);
                while (!s.for_has_cond || truth(eval(s.cond()), s.pos)) {
                    tick(s.pos);
                    if (block(s.loop_body()) == Flow::Return) {
                        flow = Flow::Return;
                        break;
                    }
                    for (const auto& u : s.for_update) stmt(u);
                }
                frames_.back().scopes.pop_back();
                return flow;
            }
            case StmtKind::Switch: {
                const std::int64_t selector = as_int(eval(s.cond()), s.pos);
                for (const auto& arm : s.arms)
                    if (arm.is_default || arm.value == selector) return block(arm.block);
                return Flow::Normal;
            }
            case StmtKind::Return:
                if (!s.exprs.empty()) frames_.back().ret = eval(s.exprs.front());
                return Flow::Return;
            case StmtKind::ExprStmt:
                eval(s.exprs.front());
                return Flow::Normal;
            case StmtKind::Block:
                return block(s);
        }
        return Flow::Normal;
    }

    void assign(const Stmt& s) {
        Value& target = variable(s.name, s.pos);
        if (s.indexed) {
            auto& a = array(target, s.pos);
            const std::size_t at = index(a, as_int(eval(s.exprs[0]), s.pos), s.pos);
            const std::int64_t rhs = as_int(eval(s.value()), s.pos);
            a[at] = s.op == "=" ? rhs : arith(s.op.substr(0, 1), a[at], rhs, s.pos);
            return;
        }
        Value rhs = eval(s.value());
        if (s.op == "=") {
            // Looked up again: a call on the right side may grow the frame stack.
            variable(s.name, s.pos) = std::move(rhs);
            return;
        }
        Value& t = variable(s.name, s.pos);
        t = Value::of_int(arith(s.op.substr(0, 1), as_int(t, s.pos), as_int(rhs, s.pos), s.pos));
    }

    Value eval(const Expr& e) {
        tick(e.pos);
        switch (e.kind) {
            case ExprKind::IntLit: {
                std::int64_t v = 0;
                auto [ptr, ec] = std::from_chars(e.text.data(), e.text.data() + e.text.size(), v);
                if (ec != std::errc()) {
                    // Only the magnitude of INT64_MIN lands here; negation wraps it back.
                    std::uint64_t u = 0;
                    std::from_chars(e.text.data(), e.text.data() + e.text.size(), u);
                    v = wrap(u);
                }
                return Value::of_int(v);
            }
            case ExprKind::BoolLit:
                return Value::of_bool(e.text == "true");
            case ExprKind::StrLit: {
                Value v;
                v.type = TypeKind::Str;
                v.s = unquote(e.text);
                return v;
            }
            case ExprKind::Var:
                return variable(e.text, e.pos);
            case ExprKind::Index: {
                Value a = eval(e.args[0]);
                auto& arr = array(a, e.pos);
                return Value::of_int(arr[index(arr, as_int(eval(e.args[1]), e.pos), e.pos)]);
            }
            case ExprKind::NewArray: {
                const std::int64_t n = as_int(eval(e.args[0]), e.pos);
                if (n < 0 || n > 10'000'000) fault(e.pos, "bad array size " + std::to_string(n));
                Value v;
                v.type = TypeKind::IntArray;
                v.arr = std::make_shared<std::vector<std::int64_t>>(static_cast<std::size_t>(n));
                return v;
            }
            case ExprKind::Unary: {
                Value v = eval(e.args[0]);
                if (e.text == "!") return Value::of_bool(!truth(v, e.pos));
                return Value::of_int(wrap(0 - static_cast<std::uint64_t>(as_int(v, e.pos))));
            }
            case ExprKind::Binary:
                return binary(e);
            case ExprKind::Call:
                return call_expr(e);
        }
        fault(e.pos, "unsupported expression");
    }

    Value binary(const Expr& e) {
        const std::string& op = e.text;
        if (op == "&&" || op == "||") {
            const bool lhs = truth(eval(e.args[0]), e.pos);
            if (op == "&&" ? !lhs : lhs) return Value::of_bool(lhs);
            return Value::of_bool(truth(eval(e.args[1]), e.pos));
        }
        Value a = eval(e.args[0]);
        Value b = eval(e.args[1]);
        if (op == "==" || op == "!=") {
            if (a.type != b.type) fault(e.pos, "comparison of different types");
            bool eq = false;
            switch (a.type) {
                case TypeKind::Bool: eq = a.b == b.b; break;
                case TypeKind::Str: eq = a.s == b.s; break;
                case TypeKind::IntArray: eq = a.arr == b.arr; break;
                default: eq = a.i == b.i; break;
            }
            return Value::of_bool(op == "==" ? eq : !eq);
        }
        const std::int64_t x = as_int(a, e.pos), y = as_int(b, e.pos);
        if (op == "<") return Value::of_bool(x < y);
        if (op == "<=") return Value::of_bool(x <= y);
        if (op == ">") return Value::of_bool(x > y);
        if (op == ">=") return Value::of_bool(x >= y);
        return Value::of_int(arith(op, x, y, e.pos));
    }

    Value call_expr(const Expr& e) {
        if (e.text == "print") {
            output_.push_back(render(eval(e.args[0])));
            return default_value(TypeKind::Int);
        }
        if (e.text == "read") {
            if (next_input_ >= input_.size()) fault(e.pos, "read past the end of the input");
            return Value::of_int(input_[next_input_++]);
        }
        const Function* fn = ast_.find_function(e.text);
        if (!fn) fault(e.pos, "unknown function '" + e.text + "'");
        std::vector<Value> args;
        for (const auto& a : e.args) args.push_back(eval(a));
        return call(*fn, std::move(args));
    }

    const Ast& ast_;
    const std::vector<std::int64_t>& input_;
    std::size_t budget_;
    std::size_t steps_ = 0;
    std::size_t next_input_ = 0;
    std::map<std::string, Value> globals_;
    std::vector<Frame> frames_;
    std::vector<std::string> output_;
};

}  // namespace

std::vector<std::int64_t> parse_input_script(std::string_view text) {
    std::vector<std::int64_t> out;
    std::size_t k = 0;
    auto space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; };
    while (k < text.size()) {
        if (space(text[k])) {
            ++k;
            continue;
        }
        std::size_t end = k;
        while (end < text.size() && !space(text[end])) ++end;
        std::int64_t v = 0;
        auto [ptr, ec] = std::from_chars(text.data() + k, text.data() + end, v);
        if (ec != std::errc() || ptr != text.data() + end)
            throw IoError("input script: '" + std::string(text.substr(k, end - k)) + "' is not an integer");
        out.push_back(v);
        k = end;
    }
    return out;
}

std::vector<std::string> evaluate_program(const Ast& ast, const std::vector<std::int64_t>& input,
                                          std::size_t step_budget) {
    return Evaluator(ast, input, step_budget).run();
}

std::vector<std::string> evaluate_program(const SourceUnit& unit, std::string_view input_script,
                                          std::size_t step_budget) {
    return evaluate_program(unit.ast, parse_input_script(input_script), step_budget);
}

}  // namespace codesim
