#pragma once

#include <stdexcept>
#include <string>

namespace svx {

/// Base class for every error raised by the library. `kind()` is a stable
/// short name used by the CLI when reporting failures.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
    virtual const char* kind() const noexcept { return "Error"; }
};

#define SVX_DEFINE_ERROR(Name)                                              \
    class Name : public Error {                                             \
    public:                                                                 \
        explicit Name(const std::string& what) : Error(what) {}             \
        const char* kind() const noexcept override { return #Name; }        \
    };

SVX_DEFINE_ERROR(FormatError)
SVX_DEFINE_ERROR(DataError)
SVX_DEFINE_ERROR(IoError)
SVX_DEFINE_ERROR(ParamError)
SVX_DEFINE_ERROR(StateError)
SVX_DEFINE_ERROR(InternalError)
SVX_DEFINE_ERROR(ConfigError)
SVX_DEFINE_ERROR(EmptySeedError)
SVX_DEFINE_ERROR(NoSeedOverlapError)
SVX_DEFINE_ERROR(EmptyMaskError)

#undef SVX_DEFINE_ERROR

}  // namespace svx
