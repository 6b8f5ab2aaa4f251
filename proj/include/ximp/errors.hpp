#pragma once

#include <stdexcept>
#include <string>

namespace ximp {

// All library errors derive from Error so callers can catch the whole
// family or a specific condition.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// --- SMILES / molecule construction ---
struct UnsupportedFeature : Error { using Error::Error; };
struct UnbalancedRingClosure : Error { using Error::Error; };
struct UnbalancedParenthesis : Error { using Error::Error; };
struct UnknownElement : Error { using Error::Error; };
struct ValenceViolation : Error { using Error::Error; };

// --- reductions ---
struct InvalidResolution : Error { using Error::Error; };
struct InvalidRadius : Error { using Error::Error; };
struct InvalidWidth : Error { using Error::Error; };

// --- tensor engine / model ---
struct ShapeMismatch : Error { using Error::Error; };
struct NonFiniteValue : Error { using Error::Error; };
struct MissingGradient : Error { using Error::Error; };
struct MissingEdgeFeature : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

// --- harness ---
struct MissingColumn : Error { using Error::Error; };
struct EmptyDataset : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };
struct TooFewRecords : Error { using Error::Error; };
struct DegenerateSplit : Error { using Error::Error; };
struct NonFiniteLoss : Error { using Error::Error; };
struct IncompleteTable : Error { using Error::Error; };
struct VersionMismatch : Error { using Error::Error; };

}  // namespace ximp
