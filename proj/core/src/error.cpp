#include "bifkit/error.hpp"

namespace bifkit {

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidDomain: return "InvalidDomain";
        case ErrorCode::InvalidMesh: return "InvalidMesh";
        case ErrorCode::SolverFailure: return "SolverFailure";
        case ErrorCode::NoPositiveSolution: return "NoPositiveSolution";
        case ErrorCode::DegenerateCoupling: return "DegenerateCoupling";
        case ErrorCode::PoleAtMu: return "PoleAtMu";
        case ErrorCode::PoleAtBetaBar: return "PoleAtBetaBar";
        case ErrorCode::NotApplicable: return "NotApplicable";
        case ErrorCode::OutsideBranchInterval: return "OutsideBranchInterval";
        case ErrorCode::InsufficientSpectrum: return "InsufficientSpectrum";
        case ErrorCode::TooCloseToCrossing: return "TooCloseToCrossing";
        case ErrorCode::InvalidBeta: return "InvalidBeta";
        case ErrorCode::DegenerateOrigin: return "DegenerateOrigin";
        case ErrorCode::MultiplicityUnsupported: return "MultiplicityUnsupported";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

}  // namespace bifkit
