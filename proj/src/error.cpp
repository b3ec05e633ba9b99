#include "tomoprint/error.hpp"

namespace tomoprint {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::ScheduleInfeasible: return "schedule infeasible";
    case ErrorKind::Resolution: return "resolution error";
    case ErrorKind::Geometry: return "geometry error";
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::DegenerateHistogram: return "degenerate histogram";
    case ErrorKind::DegenerateGeometry: return "degenerate geometry";
    case ErrorKind::EmptySample: return "empty sample";
    case ErrorKind::Registration: return "registration error";
    case ErrorKind::AlignmentFailure: return "alignment failure";
    case ErrorKind::UnknownProfile: return "unknown profile";
    case ErrorKind::Ingestion: return "ingestion error";
    case ErrorKind::Config: return "config error";
    case ErrorKind::Io: return "I/O error";
    }
    return "error";
}

}  // namespace tomoprint
