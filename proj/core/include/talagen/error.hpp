#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace talagen {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input document. `line` is 1-based, 0 when unknown.
class ParseError : public Error {
public:
    ParseError(std::string field, std::size_t line, const std::string& message)
        : Error(format(field, line, message)), field_(std::move(field)), line_(line), detail_(message) {}

    const std::string& field() const noexcept { return field_; }
    /// The message without the location prefix.
    const std::string& detail() const noexcept { return detail_; }
    std::size_t line() const noexcept { return line_; }

private:
    static std::string format(const std::string& field, std::size_t line, const std::string& message) {
        std::string out = "parse error";
        if (line > 0) {
            out += " at line " + std::to_string(line);
        }
        if (!field.empty()) {
            out += " in field '" + field + "'";
        }
        return out + ": " + message;
    }

    std::string field_;
    std::size_t line_;
    std::string detail_;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

/// The NW matching score needs at least as many strokes as the reference.
class NeedMoreStrokes : public Error {
public:
    explicit NeedMoreStrokes(std::size_t missing)
        : Error("need " + std::to_string(missing) + " more stroke(s) than provided"),
          missing_(missing) {}

    std::size_t missing() const noexcept { return missing_; }

private:
    std::size_t missing_;
};

/// A transducer that cannot be walked or combined as requested.
class StructuralError : public Error {
public:
    using Error::Error;
};

}  // namespace talagen
