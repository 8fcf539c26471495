#pragma once

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>

#include "locc/locc_engine.hpp"
#include "locc/spectra.hpp"
#include "locc/types.hpp"

namespace locc {

/// Reports use insertion-ordered keys and every floating-point value is
/// rounded to 12 significant digits before it is stored, so serialized
/// output is byte-stable for fixed inputs.
using Json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "0.1.0";

/// Rounds to `digits` significant decimal digits.
double round_sig(double x, int digits = 12);

/// Spectrum as a flat array, descending.
Json json_spectrum(const Spectrum& s);

/// Matrix as nested arrays of [re, im] pairs, row-major.
Json json_matrix(const ComplexMatrix& m);

/// FNV-1a hash of the input bytes, as fixed-width hex. Identifies the
/// input a report was generated from.
std::string input_digest(std::string_view bytes);

/// Report for a full-tree protocol run: leaf table, expected spectra,
/// monotonicity margins, pass flags.
Json build_tree_report(const ProtocolTree& tree, const GlobalState& initial,
                       const Tolerances& tol);

/// Report for a single sampled path.
Json build_sample_report(const SampledRun& run, const GlobalState& initial, const Tolerances& tol);

/// Reads a report's top-level "pass" flag; reports without one pass.
bool report_passes(const Json& report);

}  // namespace locc
