#pragma once

// Random well-typed MiniJ programs for property tests. Programs always
// terminate: loops run over fresh counters with constant bounds and calls only
// target earlier functions.

#include <random>
#include <string>
#include <vector>

namespace testgen {

class ProgramGen {
public:
    explicit ProgramGen(unsigned seed) : rng_(seed) {}

    std::string program() {
        out_.clear();
        int globals = pick(0, 2);
        for (int i = 0; i < globals; ++i) {
            std::string name = "g" + std::to_string(i);
            out_ += "int " + name;
            if (coin()) out_ += " = " + std::to_string(pick(0, 9));
            out_ += ";\n";
            globals_.push_back(name);
        }
        int helpers = pick(0, 2);
        for (int i = 0; i < helpers; ++i) function("h" + std::to_string(i), pick(0, 2), coin());
        function("main", 0, false);
        return out_;
    }

private:
    struct Fn {
        std::string name;
        int arity;
        bool returns;
    };

    int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    bool coin() { return pick(0, 1) == 1; }

    void function(const std::string& name, int arity, bool returns) {
        vars_.clear();
        scope_marks_.clear();
        counter_ = 0;
        out_ += "fn " + name + "(";
        for (int i = 0; i < arity; ++i) {
            std::string p = "p" + std::to_string(i);
            out_ += (i ? ", int " : "int ") + p;
            vars_.push_back(p);
        }
        out_ += ")";
        if (returns) out_ += ": int";
        out_ += " {\n";
        int n = pick(1, 5);
        for (int i = 0; i < n; ++i) stmt(1, 2);
        if (returns) out_ += "    return " + int_expr(2) + ";\n";
        out_ += "}\n";
        fns_.push_back({name, arity, returns});
    }

    std::string indent(int depth) { return std::string(depth * 4, ' '); }

    std::string fresh() { return "v" + std::to_string(counter_++); }

    std::string any_var() {
        std::vector<std::string> all = vars_;
        all.insert(all.end(), globals_.begin(), globals_.end());
        if (all.empty()) return {};
        return all[pick(0, static_cast<int>(all.size()) - 1)];
    }

    std::string int_expr(int depth) {
        int choice = pick(0, depth <= 0 ? 1 : 5);
        if (choice == 0) return std::to_string(pick(0, 20));
        if (choice == 1) {
            std::string v = any_var();
            return v.empty() ? std::to_string(pick(0, 5)) : v;
        }
        if (choice == 2) {
            for (const auto& f : fns_) {
                if (!f.returns || !coin()) continue;
                std::string call = f.name + "(";
                for (int i = 0; i < f.arity; ++i) call += (i ? ", " : "") + int_expr(depth - 1);
                return call + ")";
            }
        }
        if (choice == 3) return "(" + int_expr(depth - 1) + ")";
        if (choice == 4) return "-" + int_expr(0);
        static const char* ops[] = {"+", "-", "*"};
        return int_expr(depth - 1) + " " + ops[pick(0, 2)] + " " + int_expr(depth - 1);
    }

    std::string bool_expr(int depth) {
        static const char* cmps[] = {"<", "<=", ">", ">=", "==", "!="};
        int choice = pick(0, depth <= 0 ? 0 : 3);
        if (choice == 0) return int_expr(1) + " " + cmps[pick(0, 5)] + " " + int_expr(1);
        if (choice == 1) return bool_expr(depth - 1) + " && " + bool_expr(depth - 1);
        if (choice == 2) return bool_expr(depth - 1) + " || " + bool_expr(depth - 1);
        return "!(" + bool_expr(depth - 1) + ")";
    }

    void open_scope() { scope_marks_.push_back(vars_.size()); }
    void close_scope() {
        vars_.resize(scope_marks_.back());
        scope_marks_.pop_back();
    }

    void block(int depth, int budget) {
        out_ += "{\n";
        open_scope();
        int n = pick(1, 3);
        for (int i = 0; i < n; ++i) stmt(depth + 1, budget - 1);
        close_scope();
        out_ += indent(depth) + "}";
    }

    void stmt(int depth, int budget) {
        int choice = pick(0, budget <= 0 ? 3 : 9);
        out_ += indent(depth);
        switch (choice) {
            case 0: {
                std::string v = fresh();
                out_ += "int " + v;
                if (coin()) out_ += " = " + int_expr(2);
                out_ += ";  // " + v + "\n";
                vars_.push_back(v);
                return;
            }
            case 1: {
                std::string v = any_var();
                if (v.empty()) break;
                static const char* ops[] = {"=", "+=", "-=", "*="};
                out_ += v + " " + ops[pick(0, 3)] + " " + int_expr(2) + ";\n";
                return;
            }
            case 2:
                out_ += "print(" + int_expr(2) + ");\n";
                return;
            case 3:
                for (const auto& f : fns_) {
                    if (f.returns) continue;
                    out_ += f.name + "(";
                    for (int i = 0; i < f.arity; ++i) out_ += (i ? ", " : "") + int_expr(1);
                    out_ += ");\n";
                    return;
                }
                break;
            case 4:
            case 5:
                out_ += "if (" + bool_expr(1) + ") ";
                block(depth, budget);
                if (coin()) {
                    out_ += " else ";
                    block(depth, budget);
                }
                out_ += "\n";
                return;
            case 6: {
                std::string c = fresh();
                out_ += "int " + c + " = 0;\n" + indent(depth) + "while (" + c + " < " + std::to_string(pick(1, 4)) + ") {\n";
                open_scope();
                stmt(depth + 1, budget - 1);
                close_scope();
                out_ += indent(depth + 1) + c + " = " + c + " + 1;\n" + indent(depth) + "}\n";
                vars_.push_back(c);
                return;
            }
            case 7: {
                std::string c = fresh();
                out_ += "for (int " + c + " = 0; " + c + " < " + std::to_string(pick(1, 4)) + "; " + c + " += 1) ";
                open_scope();
                block(depth, budget);
                close_scope();
                out_ += "\n";
                return;
            }
            case 8: {
                out_ += "switch (" + int_expr(1) + ") {\n";
                int arms = pick(1, 3);
                for (int i = 0; i < arms; ++i) {
                    out_ += indent(depth + 1) + "case " + std::to_string(i) + ": ";
                    block(depth + 1, budget);
                    out_ += "\n";
                }
                if (coin()) {
                    out_ += indent(depth + 1) + "default: ";
                    block(depth + 1, budget);
                    out_ += "\n";
                }
                out_ += indent(depth) + "}\n";
                return;
            }
            case 9: {
                std::string c = fresh();
                out_ += "int " + c + " = 0;\n" + indent(depth) + "do {\n";
                out_ += indent(depth + 1) + c + " = " + c + " + 1;\n" + indent(depth) + "} while (" + c + " < 2);\n";
                vars_.push_back(c);
                return;
            }
        }
        out_ += "print(" + std::to_string(pick(0, 9)) + ");\n";
    }

    std::mt19937 rng_;
    std::string out_;
    std::vector<std::string> globals_;
    std::vector<std::string> vars_;
    std::vector<std::size_t> scope_marks_;
    std::vector<Fn> fns_;
    int counter_ = 0;
};

}  // namespace testgen
