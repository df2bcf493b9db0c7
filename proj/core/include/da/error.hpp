#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace da {

// Base class for everything this library throws on bad input or
// exceeded resource guards.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Parse failure in one of the text formats. Positions are 1-based;
// column 0 means "whole line".
class ParseError : public Error {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& message)
        : Error(format(line, column, message)), line_(line), column_(column) {}

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    static std::string format(std::size_t line, std::size_t column, const std::string& message) {
        std::string out = "parse error at " + std::to_string(line);
        if (column > 0) out += ":" + std::to_string(column);
        out += ": " + message;
        return out;
    }

    std::size_t line_;
    std::size_t column_;
};

} // namespace da
