#pragma once

#include <stdexcept>
#include <string>

namespace spt {

/// Base error carrying a stable machine-parsable code alongside the message.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

private:
    std::string code_;
};

#define SPT_ERROR_TYPE(Name)                                                  \
    class Name : public Error {                                              \
    public:                                                                  \
        explicit Name(const std::string& what) : Error(#Name, what) {}       \
    }

SPT_ERROR_TYPE(NonPositiveInput);
SPT_ERROR_TYPE(GridTooShort);
SPT_ERROR_TYPE(BadDimensions);
SPT_ERROR_TYPE(DerivativeMismatch);
SPT_ERROR_TYPE(NumericalFailure);
SPT_ERROR_TYPE(UnbalancedWithJumps);
SPT_ERROR_TYPE(NonPositiveG);
SPT_ERROR_TYPE(ZeroWealth);
SPT_ERROR_TYPE(NotMonotone);
SPT_ERROR_TYPE(JumpsNotSupported);
SPT_ERROR_TYPE(BoundsViolated);
SPT_ERROR_TYPE(DeltaViolated);
SPT_ERROR_TYPE(BadComposition);
SPT_ERROR_TYPE(BadCovariance);
SPT_ERROR_TYPE(LookAheadViolation);
SPT_ERROR_TYPE(WeightSumError);
SPT_ERROR_TYPE(LengthMismatch);
SPT_ERROR_TYPE(DegenerateWeights);
SPT_ERROR_TYPE(IncompletePanel);
SPT_ERROR_TYPE(BadConfig);
SPT_ERROR_TYPE(UnknownPortfolio);
SPT_ERROR_TYPE(IoError);

#undef SPT_ERROR_TYPE

} // namespace spt
