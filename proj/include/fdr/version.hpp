#pragma once

#ifndef FDR_VERSION_STRING
#define FDR_VERSION_STRING "0.0.0"
#endif

namespace fdr {

// Build identifier embedded in every report file.
inline constexpr const char* kBuildId = "fdr " FDR_VERSION_STRING;

}  // namespace fdr
