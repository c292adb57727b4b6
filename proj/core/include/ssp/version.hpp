#pragma once

namespace ssp {

inline constexpr const char* kVersion = "0.1.0";

// On-disk format tags.
inline constexpr const char* kMatrixMagic = "SSP1";
inline constexpr const char* kSensorsFormat = "ssp-sensors-v1";
inline constexpr const char* kBasisFormat = "ssp-basis-v1";
inline constexpr const char* kReportFormat = "ssp-report-v1";

}  // namespace ssp
