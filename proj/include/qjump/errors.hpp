#pragma once

#include <stdexcept>
#include <string>

namespace qjump {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define QJUMP_DEFINE_ERROR(Name)                 \
    class Name : public Error {                  \
    public:                                      \
        using Error::Error;                      \
    }

QJUMP_DEFINE_ERROR(NonHermitianInput);
QJUMP_DEFINE_ERROR(DimensionMismatch);
QJUMP_DEFINE_ERROR(InvalidGenerator);
QJUMP_DEFINE_ERROR(InvalidState);
QJUMP_DEFINE_ERROR(NegativeRate);
QJUMP_DEFINE_ERROR(StepTooLarge);
QJUMP_DEFINE_ERROR(EmptyChannels);
QJUMP_DEFINE_ERROR(EmptyEnsemble);
QJUMP_DEFINE_ERROR(PositivityLost);
QJUMP_DEFINE_ERROR(InvalidConfig);

#undef QJUMP_DEFINE_ERROR

}  // namespace qjump
