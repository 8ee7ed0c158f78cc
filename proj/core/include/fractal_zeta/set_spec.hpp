#pragma once

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "fractal_zeta/sets.hpp"

namespace fzeta {

// Line-oriented set description. Each non-comment line is
//
//     [name:] kind=<family> key=value ...
//
// and the last line describes the result. Nested sets are referenced by a
// name defined on an earlier line or by a file path:
//
//     c: kind=cantor m=2 a=1/3
//     kind=union component=c@0 component=c@2
//
// A ';' separates lines like a newline; line numbers in errors count both.
// Numeric values accept arithmetic expressions such as 1/3 or 3^(-log2(3)).
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& message, std::size_t line, std::size_t column);
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

double parse_number(std::string_view expr);

FractalSet parse_set_spec(std::string_view text, const std::filesystem::path& base_dir = {});
FractalSet load_set_spec(const std::filesystem::path& file);

// Canonical text; parse_set_spec(to_spec(s)) rebuilds s exactly.
std::string to_spec(const FractalSet& set);

}  // namespace fzeta
