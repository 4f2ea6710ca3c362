#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "arat/ir.hpp"

namespace arat {

struct ParseError : std::runtime_error {
    ParseError(std::uint32_t line, std::uint32_t col, std::string code, const std::string& msg)
        : std::runtime_error(code + " at " + std::to_string(line) + ":" + std::to_string(col) +
                             ": " + msg),
          line(line), col(col), code(std::move(code)) {}
    std::uint32_t line;
    std::uint32_t col;
    std::string code;
};

// program text -> Program; throws ParseError on malformed input.
// Structural rules (dominance, types, phi coverage) are validate()'s job.
Program parse_program(const std::string& text);

struct Diagnostic {
    std::uint32_t static_id = 0;
    std::uint32_t line = 0;
    std::string code;
    std::string message;
};

// deterministic order: ascending static_id, then code
std::vector<Diagnostic> validate(const Program& p);

} // namespace arat
