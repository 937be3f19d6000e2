#pragma once

#include <cctype>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wfav/diagnostics.hpp"

// Shared statement lexer for the .gqm / .wfa / .trace formats. Splits one
// line into tokens with 1-based column positions.

namespace wfav::detail {

enum class TokKind { Ident, Int, String, Punct, End };

struct Token {
    TokKind kind = TokKind::End;
    std::string text;   // identifier text, punct char, or decoded string body
    std::uint64_t ival = 0;
    int column = 1;
};

class LineLexer {
public:
    LineLexer(const std::string& line, const std::string& file, int lineno,
              std::vector<Diagnostic>* diags)
        : line_(line), file_(file), lineno_(lineno), diags_(diags) {
        advance();
    }

    const Token& peek() const { return cur_; }
    Token take() {
        Token t = cur_;
        advance();
        return t;
    }

    bool at_end() const { return cur_.kind == TokKind::End; }

    SourceSpan span_here() const { return {file_, lineno_, cur_.column}; }

    void error(const std::string& msg) { error_at(span_here(), msg); }

    void error_at(const SourceSpan& s, const std::string& msg) {
        diags_->push_back({s, Severity::Error, msg});
        ok_ = false;
    }

    bool ok() const { return ok_; }

    // Expect an identifier token and return its text; empty on failure.
    std::string expect_ident(const char* what) {
        if (cur_.kind != TokKind::Ident) {
            error(std::string("expected ") + what);
            return {};
        }
        return take().text;
    }

    bool expect_punct(char c) {
        if (cur_.kind != TokKind::Punct || cur_.text[0] != c) {
            error(std::string("expected '") + c + "'");
            return false;
        }
        take();
        return true;
    }

    bool at_punct(char c) const {
        return cur_.kind == TokKind::Punct && cur_.text[0] == c;
    }

private:
    void advance() {
        while (pos_ < line_.size() && (line_[pos_] == ' ' || line_[pos_] == '\t')) ++pos_;
        cur_ = {};
        cur_.column = static_cast<int>(pos_) + 1;
        if (pos_ >= line_.size() || line_[pos_] == '#') {
            cur_.kind = TokKind::End;
            return;
        }
        char c = line_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t start = pos_;
            while (pos_ < line_.size()) {
                char d = line_[pos_];
                if (std::isalnum(static_cast<unsigned char>(d)) || d == '_') {
                    ++pos_;
                    continue;
                }
                // '-' joins keyword words (atomic-no-info) but never '->'.
                if (d == '-' && pos_ + 1 < line_.size() &&
                    (std::isalnum(static_cast<unsigned char>(line_[pos_ + 1])) ||
                     line_[pos_ + 1] == '_')) {
                    ++pos_;
                    continue;
                }
                break;
            }
            cur_.kind = TokKind::Ident;
            cur_.text = line_.substr(start, pos_ - start);
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t start = pos_;
            std::uint64_t v = 0;
            while (pos_ < line_.size() && std::isdigit(static_cast<unsigned char>(line_[pos_]))) {
                v = v * 10 + static_cast<std::uint64_t>(line_[pos_] - '0');
                ++pos_;
            }
            cur_.kind = TokKind::Int;
            cur_.ival = v;
            cur_.text = line_.substr(start, pos_ - start);
            return;
        }
        if (c == '"') {
            ++pos_;
            std::string body;
            bool closed = false;
            while (pos_ < line_.size()) {
                char d = line_[pos_];
                if (d == '\\' && pos_ + 1 < line_.size()) {
                    body += line_[pos_ + 1];
                    pos_ += 2;
                    continue;
                }
                if (d == '"') {
                    closed = true;
                    ++pos_;
                    break;
                }
                body += d;
                ++pos_;
            }
            if (!closed) error_at({file_, lineno_, cur_.column}, "missing closing quote");
            cur_.kind = TokKind::String;
            cur_.text = body;
            return;
        }
        if (c == '-' && pos_ + 1 < line_.size() && line_[pos_ + 1] == '>') {
            cur_.kind = TokKind::Punct;
            cur_.text = "->";
            pos_ += 2;
            return;
        }
        cur_.kind = TokKind::Punct;
        cur_.text = std::string(1, c);
        ++pos_;
    }

    const std::string& line_;
    std::string file_;
    int lineno_;
    std::vector<Diagnostic>* diags_;
    size_t pos_ = 0;
    Token cur_;
    bool ok_ = true;
};

// Splits input into lines; keeps line numbers 1-based.
std::vector<std::string> split_lines(const std::string& text);

}  // namespace wfav::detail
