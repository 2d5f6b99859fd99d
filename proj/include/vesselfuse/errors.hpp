#pragma once

#include <stdexcept>
#include <string>

namespace vesselfuse {

// Thrown when a value leaves the mathematical domain of an operation
// (Mercator latitude beyond the singularity margin, metric with GT = 0, ...).
class domain_error : public std::runtime_error {
public:
    explicit domain_error(const std::string& what) : std::runtime_error(what) {}
};

// A world point that projects behind the camera plane (Z <= 0).
class behind_camera_error : public domain_error {
public:
    explicit behind_camera_error(const std::string& what) : domain_error(what) {}
};

// A metric whose denominator is empty; callers report it as null instead of a number.
class undefined_metric : public domain_error {
public:
    explicit undefined_metric(const std::string& what) : domain_error(what) {}
};

// Malformed input files (CSV/JSONL/config); carries a line hint where known.
class parse_error : public std::runtime_error {
public:
    parse_error(const std::string& what, long line = -1)
        : std::runtime_error(line >= 0 ? what + " (line " + std::to_string(line) + ")" : what),
          line_(line) {}
    long line() const { return line_; }

private:
    long line_;
};

} // namespace vesselfuse
