#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace coda {

// Error taxonomy shared across the library. Each error carries a stable
// machine-readable name; the CLI prints it on stderr and maps it to an
// exit code (statistical-input errors vs. usage errors).
class Error : public std::runtime_error {
public:
    Error(std::string name, const std::string& what)
        : std::runtime_error(what), name_(std::move(name)) {}
    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

#define CODA_DEFINE_ERROR(ClassName)                        \
    class ClassName : public Error {                        \
    public:                                                 \
        explicit ClassName(const std::string& what)         \
            : Error(#ClassName, what) {}                    \
    }

CODA_DEFINE_ERROR(NonPositiveEntry);
CODA_DEFINE_ERROR(DimensionTooSmall);
CODA_DEFINE_ERROR(DimensionMismatch);
CODA_DEFINE_ERROR(TooFewRows);
CODA_DEFINE_ERROR(ConvergenceFailure);
CODA_DEFINE_ERROR(InvalidDf);
CODA_DEFINE_ERROR(NotPositiveDefinite);
CODA_DEFINE_ERROR(InconsistentZeroPattern);
CODA_DEFINE_ERROR(EmptyBlock);
CODA_DEFINE_ERROR(NegativeEntry);
CODA_DEFINE_ERROR(ParseError);
CODA_DEFINE_ERROR(BadK);
CODA_DEFINE_ERROR(DegenerateEigengap);
CODA_DEFINE_ERROR(ApproximationInvalid);
CODA_DEFINE_ERROR(ConfigError);

#undef CODA_DEFINE_ERROR

}  // namespace coda
