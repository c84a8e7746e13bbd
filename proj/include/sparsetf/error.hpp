#pragma once

#include <stdexcept>
#include <string>

namespace sparsetf {

// Precondition violations on caller-supplied data.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A numerical procedure could not reach its target accuracy.
class NumericalFailure : public std::runtime_error {
public:
    NumericalFailure(const std::string& what, double achieved)
        : std::runtime_error(what), achieved_(achieved) {}

    double achieved() const noexcept { return achieved_; }

private:
    double achieved_;
};

}  // namespace sparsetf
