#pragma once

#include <stdexcept>
#include <string>

namespace algforge {

// Every library failure carries a stable kind tag that the CLI maps onto exit codes.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& msg)
        : std::runtime_error(kind + ": " + msg), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define ALGFORGE_ERROR(Name)                                                   \
    struct Name : Error {                                                      \
        explicit Name(const std::string& msg) : Error(#Name, msg) {}           \
    };

ALGFORGE_ERROR(MissingSymbol)
ALGFORGE_ERROR(JetOverflow)
ALGFORGE_ERROR(ParseError)
ALGFORGE_ERROR(NotDoublyGraded)
ALGFORGE_ERROR(BasePointMismatch)
ALGFORGE_ERROR(BundleMismatch)
ALGFORGE_ERROR(NotCoreIdentity)
ALGFORGE_ERROR(NotAlmostLie)
ALGFORGE_ERROR(NotNormalForm)
ALGFORGE_ERROR(DimensionMismatch)
ALGFORGE_ERROR(NotAdmissible)
ALGFORGE_ERROR(SingularLeadingMatrix)
ALGFORGE_ERROR(NonFiniteState)
ALGFORGE_ERROR(SchemaError)
ALGFORGE_ERROR(MissingSection)

#undef ALGFORGE_ERROR

}  // namespace algforge
