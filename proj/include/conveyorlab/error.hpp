#pragma once

#include <stdexcept>
#include <string>

namespace cvl {

// Raised for malformed netlist text and bad value tokens. line() is 1-based,
// 0 when the error is not tied to a specific deck line.
class parse_error : public std::runtime_error {
public:
    explicit parse_error(const std::string& msg, int line = 0)
        : std::runtime_error(line > 0 ? msg + " (line " + std::to_string(line) + ")" : msg),
          line_(line) {}

    int line() const { return line_; }

private:
    int line_;
};

// Raised for numeric and topology failures: singular systems, degenerate
// biquads, pole evaluation.
class analysis_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace cvl
