#include "gpot/errors.hpp"

namespace gpot {

const char* errc_name(Errc c) {
    switch (c) {
        case Errc::ParseError: return "ParseError";
        case Errc::ValidationError: return "ValidationError";
        case Errc::DimensionTooSmall: return "DimensionTooSmall";
        case Errc::HeavyTailUnsupported: return "HeavyTailUnsupported";
        case Errc::NotConverged: return "NotConverged";
        case Errc::InfiniteMoment: return "InfiniteMoment";
        case Errc::UnsupportedAnalytic: return "UnsupportedAnalytic";
        case Errc::SingularAtCoincidence: return "SingularAtCoincidence";
        case Errc::RecurrentRegime: return "RecurrentRegime";
        case Errc::InsufficientData: return "InsufficientData";
        case Errc::DivergesAtOne: return "DivergesAtOne";
    }
    return "Error";
}

int exit_code_for(Errc c) {
    switch (c) {
        case Errc::ParseError: return 2;
        case Errc::ValidationError:
        case Errc::InsufficientData:
        case Errc::UnsupportedAnalytic: return 3;
        case Errc::DimensionTooSmall:
        case Errc::HeavyTailUnsupported:
        case Errc::InfiniteMoment:
        case Errc::SingularAtCoincidence:
        case Errc::RecurrentRegime:
        case Errc::DivergesAtOne: return 4;
        case Errc::NotConverged: return 5;
    }
    return 1;
}

} // namespace gpot
