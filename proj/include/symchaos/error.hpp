#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace symchaos {

/// Base class for every validation or numerical failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A simulated state left the divergence guard; step() is the offending time index.
class DivergenceError : public Error {
public:
    DivergenceError(std::size_t step, double norm)
        : Error("divergence guard tripped at step " + std::to_string(step) +
                " (state norm " + std::to_string(norm) + ")"),
          step_(step) {}

    [[nodiscard]] std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

}  // namespace symchaos
