#pragma once

#include <stdexcept>
#include <string>

namespace codesim {

struct SourcePos {
    int line = 0;
    int column = 0;
};

std::string to_string(SourcePos pos);

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error("io error: " + what) {}
};

class LexError : public Error {
public:
    LexError(SourcePos pos, const std::string& what)
        : Error("lex error at " + to_string(pos) + ": " + what), pos(pos) {}
    SourcePos pos;
};

class ParseError : public Error {
public:
    ParseError(SourcePos pos, const std::string& expected, const std::string& found)
        : Error("parse error at " + to_string(pos) + ": expected " + expected + ", found " + found),
          pos(pos), expected(expected) {}
    SourcePos pos;
    std::string expected;
};

class ResolveError : public Error {
public:
    ResolveError(SourcePos pos, const std::string& name, const std::string& what)
        : Error("resolve error at " + to_string(pos) + ": '" + name + "' " + what), pos(pos), name(name) {}
    SourcePos pos;
    std::string name;
};

class CompileError : public Error {
public:
    CompileError(SourcePos pos, const std::string& what)
        : Error("compile error at " + to_string(pos) + ": " + what), pos(pos) {}
    SourcePos pos;
};

}  // namespace codesim
