#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "locc/locc_engine.hpp"
#include "locc/types.hpp"

namespace locc {

/// Parsed protocol file. Complex scalars are written "a+bi" (no internal
/// whitespace), matrices as bracketed rows "[a, b; c, d]", comments run
/// from '#' to end of line. Steps may be guarded by an outcome-history
/// prefix: "when label=0, tag unitary 1 H".
struct ProtocolFile {
  enum class InitialKind { none, vector, matrix, scenario };

  Protocol protocol{PartyLayout({1}), {}};
  std::map<std::string, ComplexMatrix> operators;
  InitialKind initial_kind = InitialKind::none;
  ComplexVector initial_vector;
  ComplexMatrix initial_matrix;
  std::string scenario_name;
};

struct ParseError {
  int line = 0;
  int col = 0;
  std::string message;
};

struct ParseResult {
  std::optional<ProtocolFile> file;
  std::vector<ParseError> errors;
  bool ok() const { return errors.empty() && file.has_value(); }
};

/// Parses and validates protocol text. Validation failures (unresolved
/// operators, shape mismatches, incomplete measurements, unreachable
/// guards, bad initial states) are reported as positioned errors next to
/// syntax errors; `file` is only set when everything passes.
ParseResult parse_protocol(std::string_view text, const Tolerances& tol = {});

/// Canonical text form; parse(serialize(f)) runs identically to f.
/// Operator-table references are inlined.
std::string serialize_protocol(const ProtocolFile& file);

std::string format_complex(const Complex& c);
std::string format_matrix(const ComplexMatrix& m);

}  // namespace locc
