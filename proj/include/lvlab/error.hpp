#pragma once

#include <stdexcept>
#include <string>

namespace lvlab {

enum class ErrorKind {
    precondition,
    numeric,
    resource,
    conditioning,
    rescan,
    coverage,
    sign,
    config,
    invariant,
    io,
};

const char* kind_name(ErrorKind k);

// Process exit status for a failure of this kind (lab runner contract).
int exit_code(ErrorKind k);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(kind_name(kind)) + ": " + what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool ok, const std::string& what) {
    if (!ok) fail(ErrorKind::precondition, what);
}

}  // namespace lvlab
