#include "locc/protocol_format.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace locc {

namespace {

enum class TokKind { identifier, scalar, punct, end };

struct Token {
  TokKind kind = TokKind::end;
  std::string text;  // identifier name or punct char
  Complex value;     // for scalars
  int line = 1;
  int col = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  Token next() {
    skip_space_and_comments();
    Token tok;
    tok.line = line_;
    tok.col = col_;
    if (pos_ >= text_.size()) return tok;
    const char c = text_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      tok.kind = TokKind::identifier;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        tok.text.push_back(text_[pos_]);
        advance();
      }
      return tok;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '+' || c == '-') {
      return lex_scalar(tok);
    }
    if (std::string("[]{};,=").find(c) != std::string::npos) {
      tok.kind = TokKind::punct;
      tok.text.push_back(c);
      advance();
      return tok;
    }
    throw LexError{tok.line, tok.col, std::string("unexpected character '") + c + "'"};
  }

  struct LexError {
    int line;
    int col;
    std::string message;
  };

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space_and_comments() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  // One real: [+-]? digits [. digits] [eE [+-] digits]. Returns false when
  // the text at pos_ is not a number.
  bool lex_real(double& out) {
    const std::size_t start = pos_;
    if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) advance();
    bool digits = false;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      digits = true;
      advance();
    }
    if (pos_ < text_.size() && text_[pos_] == '.') {
      advance();
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        digits = true;
        advance();
      }
    }
    if (!digits) {
      pos_ = start;
      return false;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      const std::size_t before_exp = pos_;
      advance();
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) advance();
      bool exp_digits = false;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        exp_digits = true;
        advance();
      }
      if (!exp_digits) pos_ = before_exp;  // the 'e' belongs to something else
    }
    out = std::stod(std::string(text_.substr(start, pos_ - start)));
    return true;
  }

  Token lex_scalar(Token tok) {
    double first = 0.0;
    if (!lex_real(first)) {
      throw LexError{tok.line, tok.col, "expected a number"};
    }
    tok.kind = TokKind::scalar;
    if (pos_ < text_.size() && text_[pos_] == 'i') {
      advance();
      tok.value = Complex(0.0, first);
      return tok;
    }
    // "a+bi" / "a-bi" with no internal whitespace
    if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) {
      const std::size_t mark = pos_;
      const int mark_line = line_, mark_col = col_;
      double second = 0.0;
      if (lex_real(second)) {
        if (pos_ < text_.size() && text_[pos_] == 'i') {
          advance();
          tok.value = Complex(first, second);
          return tok;
        }
        // Not an imaginary part after all; rewind.
        pos_ = mark;
        line_ = mark_line;
        col_ = mark_col;
      }
    }
    tok.value = Complex(first, 0.0);
    return tok;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

/// One parsed step plus the position its statement started at.
struct PositionedStep {
  GuardedStep step;
  int line = 0;
  int col = 0;
};

class Parser {
 public:
  Parser(std::string_view text, const Tolerances& tol) : lexer_(text), tol_(tol) { bump(); }

  ParseResult run() {
    ParseResult result;
    while (cur_.kind != TokKind::end) {
      try {
        statement();
      } catch (const Lexer::LexError& e) {
        errors_.push_back(ParseError{e.line, e.col, e.message});
        recover();
      } catch (const ParseError& e) {
        errors_.push_back(e);
        recover();
      }
    }
    finish();
    result.errors = std::move(errors_);
    if (result.errors.empty()) result.file = std::move(file_);
    return result;
  }

 private:
  [[noreturn]] void fail(const Token& at, const std::string& message) {
    throw ParseError{at.line, at.col, message};
  }

  void bump() { cur_ = lexer_.next(); }

  bool at_keyword(const char* kw) const {
    return cur_.kind == TokKind::identifier && cur_.text == kw;
  }

  bool at_statement_start() const {
    return at_keyword("layout") || at_keyword("operator") || at_keyword("initial") ||
           at_keyword("when") || at_keyword("unitary") || at_keyword("measure") ||
           at_keyword("broadcast");
  }

  void recover() {
    // Panic-mode: skip to the next statement keyword.
    while (cur_.kind != TokKind::end && !at_statement_start()) {
      try {
        cur_ = lexer_.next();
      } catch (const Lexer::LexError&) {
        cur_ = Token{};  // unlexable tail; stop
        return;
      }
    }
  }

  std::string expect_identifier(const char* what) {
    if (cur_.kind != TokKind::identifier) fail(cur_, std::string("expected ") + what);
    std::string name = cur_.text;
    bump();
    return name;
  }

  int expect_int(const char* what) {
    if (cur_.kind != TokKind::scalar || cur_.value.imag() != 0.0 ||
        cur_.value.real() != std::floor(cur_.value.real())) {
      fail(cur_, std::string("expected an integer ") + what);
    }
    const int v = static_cast<int>(cur_.value.real());
    bump();
    return v;
  }

  void expect_punct(char c) {
    if (cur_.kind != TokKind::punct || cur_.text[0] != c) {
      fail(cur_, std::string("expected '") + c + "'");
    }
    bump();
  }

  bool eat_punct(char c) {
    if (cur_.kind == TokKind::punct && cur_.text[0] == c) {
      bump();
      return true;
    }
    return false;
  }

  ComplexMatrix parse_matrix() {
    const Token open = cur_;
    expect_punct('[');
    std::vector<std::vector<Complex>> rows;
    rows.emplace_back();
    while (true) {
      if (cur_.kind != TokKind::scalar) fail(cur_, "expected a complex scalar");
      rows.back().push_back(cur_.value);
      bump();
      if (eat_punct(',')) continue;
      if (eat_punct(';')) {
        rows.emplace_back();
        continue;
      }
      expect_punct(']');
      break;
    }
    const std::size_t cols = rows.front().size();
    for (const auto& row : rows) {
      if (row.size() != cols) fail(open, "matrix rows have unequal lengths");
    }
    ComplexMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = 0; j < cols; ++j)
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return m;
  }

  /// Operator reference: a name from the table or an inline matrix.
  ComplexMatrix parse_operator_ref() {
    if (cur_.kind == TokKind::identifier) {
      const Token ref = cur_;
      std::string name = expect_identifier("operator name");
      auto it = file_.operators.find(name);
      if (it == file_.operators.end()) fail(ref, "unresolved operator '" + name + "'");
      return it->second;
    }
    return parse_matrix();
  }

  std::vector<std::string> parse_guard() {
    std::vector<std::string> guard;
    do {
      std::string token = expect_identifier("guard token");
      if (eat_punct('=')) {
        if (cur_.kind != TokKind::scalar) fail(cur_, "expected an outcome index after '='");
        const int outcome = expect_int("outcome index");
        token += "=" + std::to_string(outcome);
      }
      guard.push_back(std::move(token));
    } while (eat_punct(','));
    return guard;
  }

  void statement() {
    const Token start = cur_;
    if (at_keyword("layout")) {
      bump();
      if (saw_layout_) fail(start, "duplicate layout statement");
      std::vector<int> dims;
      while (cur_.kind == TokKind::scalar) dims.push_back(expect_int("dimension"));
      if (dims.empty()) fail(start, "layout needs at least one dimension");
      for (int d : dims) {
        if (d < 1) fail(start, "layout dimensions must be >= 1");
      }
      file_.protocol.layout = PartyLayout(dims);
      saw_layout_ = true;
      return;
    }
    if (at_keyword("operator")) {
      bump();
      const Token name_tok = cur_;
      std::string name = expect_identifier("operator name");
      if (file_.operators.count(name) != 0) fail(name_tok, "duplicate operator '" + name + "'");
      file_.operators.emplace(std::move(name), parse_matrix());
      return;
    }
    if (at_keyword("initial")) {
      bump();
      if (file_.initial_kind != ProtocolFile::InitialKind::none) {
        fail(start, "duplicate initial statement");
      }
      if (at_keyword("vector")) {
        bump();
        ComplexMatrix m = parse_matrix();
        if (m.rows() != 1) fail(start, "initial vector must be a single bracketed row");
        file_.initial_kind = ProtocolFile::InitialKind::vector;
        file_.initial_vector = m.row(0).transpose();
      } else if (at_keyword("matrix")) {
        bump();
        file_.initial_kind = ProtocolFile::InitialKind::matrix;
        file_.initial_matrix = parse_matrix();
      } else if (at_keyword("scenario")) {
        bump();
        file_.initial_kind = ProtocolFile::InitialKind::scenario;
        file_.scenario_name = expect_identifier("scenario name");
      } else {
        fail(cur_, "expected 'vector', 'matrix' or 'scenario' after 'initial'");
      }
      initial_pos_ = {start.line, start.col};
      return;
    }

    std::vector<std::string> guard;
    if (at_keyword("when")) {
      bump();
      guard = parse_guard();
    }
    if (at_keyword("unitary")) {
      bump();
      const int party = expect_int("party index");
      ComplexMatrix u = parse_operator_ref();
      steps_.push_back({GuardedStep{std::move(guard), UnitaryStep{party, std::move(u)}},
                        start.line, start.col});
      return;
    }
    if (at_keyword("measure")) {
      bump();
      const int party = expect_int("party index");
      std::string label = expect_identifier("branch label");
      expect_punct('{');
      MeasurementSet mset;
      mset.party = party;
      do {
        mset.ops.push_back(parse_operator_ref());
      } while (eat_punct(','));
      expect_punct('}');
      steps_.push_back({GuardedStep{std::move(guard), MeasureStep{std::move(mset), std::move(label)}},
                        start.line, start.col});
      return;
    }
    if (at_keyword("broadcast")) {
      bump();
      const int party = expect_int("party index");
      std::string message = expect_identifier("message tag");
      steps_.push_back({GuardedStep{std::move(guard), BroadcastStep{party, std::move(message)}},
                        start.line, start.col});
      return;
    }
    fail(start, "expected a statement (layout, operator, initial, when, unitary, measure, broadcast)");
  }

  /// Whole-file validation once all statements are in.
  void finish() {
    if (!errors_.empty()) return;
    if (!saw_layout_) {
      errors_.push_back(ParseError{1, 1, "missing layout statement"});
      return;
    }
    for (auto& ps : steps_) file_.protocol.steps.push_back(std::move(ps.step));

    // Step-local and guard validation, with positions recovered from the
    // "step N:" prefix the engine attaches.
    try {
      validate_protocol(file_.protocol, tol_);
    } catch (const std::exception& e) {
      errors_.push_back(position_engine_error(e.what()));
    }

    if (file_.initial_kind == ProtocolFile::InitialKind::vector) {
      if (file_.initial_vector.size() != file_.protocol.layout.total_dim()) {
        errors_.push_back(ParseError{initial_pos_.first, initial_pos_.second,
                                     "initial vector length does not match the layout"});
      } else {
        const double norm2 = file_.initial_vector.squaredNorm();
        if (std::abs(norm2 - 1.0) > tol_.trace) {
          std::ostringstream msg;
          msg << "initial vector is not unit norm: |x|^2 = " << norm2;
          errors_.push_back(ParseError{initial_pos_.first, initial_pos_.second, msg.str()});
        }
      }
    } else if (file_.initial_kind == ProtocolFile::InitialKind::matrix) {
      const ComplexMatrix& m = file_.initial_matrix;
      if (m.rows() != m.cols() || m.rows() != file_.protocol.layout.total_dim()) {
        errors_.push_back(ParseError{initial_pos_.first, initial_pos_.second,
                                     "initial matrix shape does not match the layout"});
      } else {
        DensityReport report = validate_density(m);
        if (!report.pass(tol_.psd)) {
          std::ostringstream msg;
          msg << "initial matrix is not a density matrix (hermiticity defect "
              << report.herm_defect << ", min eigenvalue " << report.min_eigenvalue
              << ", trace defect " << report.trace_defect << ")";
          errors_.push_back(ParseError{initial_pos_.first, initial_pos_.second, msg.str()});
        }
      }
    } else if (file_.initial_kind == ProtocolFile::InitialKind::scenario) {
      if (file_.scenario_name != "appendix_b") {
        errors_.push_back(ParseError{initial_pos_.first, initial_pos_.second,
                                     "unknown initial scenario '" + file_.scenario_name + "'"});
      }
    }
  }

  ParseError position_engine_error(const std::string& message) {
    int step_index = -1;
    if (message.rfind("step ", 0) == 0) {
      std::size_t end = 5;
      while (end < message.size() && std::isdigit(static_cast<unsigned char>(message[end]))) ++end;
      if (end > 5) step_index = std::stoi(message.substr(5, end - 5)) - 1;
    }
    if (step_index >= 0 && step_index < static_cast<int>(steps_.size())) {
      const auto& ps = steps_[static_cast<std::size_t>(step_index)];
      return ParseError{ps.line, ps.col, message};
    }
    if (!steps_.empty()) return ParseError{steps_.front().line, steps_.front().col, message};
    return ParseError{1, 1, message};
  }

  Lexer lexer_;
  Tolerances tol_;
  Token cur_;
  ProtocolFile file_;
  std::vector<PositionedStep> steps_;
  std::vector<ParseError> errors_;
  bool saw_layout_ = false;
  std::pair<int, int> initial_pos_{1, 1};
};

}  // namespace

ParseResult parse_protocol(std::string_view text, const Tolerances& tol) {
  Parser parser(text, tol);
  return parser.run();
}

std::string format_complex(const Complex& c) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", c.real());
  std::string out = buf;
  std::snprintf(buf, sizeof(buf), "%.17g", std::abs(c.imag()));
  out += (c.imag() < 0.0 || std::signbit(c.imag())) ? "-" : "+";
  out += buf;
  out += "i";
  return out;
}

std::string format_matrix(const ComplexMatrix& m) {
  std::string out = "[";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (i > 0) out += "; ";
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out += ", ";
      out += format_complex(m(i, j));
    }
  }
  out += "]";
  return out;
}

std::string serialize_protocol(const ProtocolFile& file) {
  std::ostringstream out;
  out << "layout";
  for (int d : file.protocol.layout.dims()) out << " " << d;
  out << "\n";

  switch (file.initial_kind) {
    case ProtocolFile::InitialKind::none:
      break;
    case ProtocolFile::InitialKind::vector: {
      ComplexMatrix row = file.initial_vector.transpose();
      out << "initial vector " << format_matrix(row) << "\n";
      break;
    }
    case ProtocolFile::InitialKind::matrix:
      out << "initial matrix " << format_matrix(file.initial_matrix) << "\n";
      break;
    case ProtocolFile::InitialKind::scenario:
      out << "initial scenario " << file.scenario_name << "\n";
      break;
  }

  for (const GuardedStep& gs : file.protocol.steps) {
    if (!gs.guard.empty()) {
      out << "when ";
      for (std::size_t i = 0; i < gs.guard.size(); ++i) {
        if (i > 0) out << ", ";
        out << gs.guard[i];
      }
      out << " ";
    }
    if (const auto* us = std::get_if<UnitaryStep>(&gs.step)) {
      out << "unitary " << us->party << " " << format_matrix(us->u) << "\n";
    } else if (const auto* ms = std::get_if<MeasureStep>(&gs.step)) {
      out << "measure " << ms->mset.party << " " << ms->label << " { ";
      for (std::size_t j = 0; j < ms->mset.ops.size(); ++j) {
        if (j > 0) out << ", ";
        out << format_matrix(ms->mset.ops[j]);
      }
      out << " }\n";
    } else if (const auto* bs = std::get_if<BroadcastStep>(&gs.step)) {
      out << "broadcast " << bs->party << " " << bs->message << "\n";
    }
  }
  return out.str();
}

}  // namespace locc
