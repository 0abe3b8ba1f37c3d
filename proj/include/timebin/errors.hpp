#ifndef TIMEBIN_ERRORS_HPP
#define TIMEBIN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace timebin {

/// Precondition violated by a caller-supplied value.
class invalid_argument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Input data cannot support the requested estimate (e.g. all counts zero).
class degenerate_data : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or truncated file / record stream.
class data_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Iterative fit did not converge. `diagnostics` holds the last iterate.
class fit_failure : public std::runtime_error {
public:
    fit_failure(const std::string& what, std::string diagnostics)
        : std::runtime_error(what), diagnostics_(std::move(diagnostics)) {}
    const std::string& diagnostics() const noexcept { return diagnostics_; }

private:
    std::string diagnostics_;
};

} // namespace timebin

#endif // TIMEBIN_ERRORS_HPP
