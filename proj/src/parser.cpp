#include "mcnet/parser.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace mcnet::dsl {

using calculus::Command;
using calculus::CorrectX;
using calculus::CorrectZ;
using calculus::Entangle;
using calculus::Measure;
using calculus::Nil;
using calculus::SignalExpr;
using net::Agent;
using net::Network;
using net::Preparation;
using qnum::QubitId;

namespace {

enum class Tok {
  Ident,
  Int,
  Real,
  LBrace,
  RBrace,
  LParen,
  RParen,
  LBracket,
  RBracket,
  Semi,
  Comma,
  Colon,
  Equal,
  Plus,
  Minus,
  Star,
  Slash,
  Dash,  // '-' used as an empty-set marker; same lexeme as Minus
  End,
};

struct Token {
  Tok kind;
  std::string text;
  SourceSpan span;
};

class Lexer {
public:
  Lexer(const std::string& text, const std::string& file) : text_(text), file_(file) {}

  std::vector<Token> run(std::vector<ParseDiagnostic>& diags) {
    std::vector<Token> out;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '\n') {
        ++line_;
        col_ = 1;
        ++pos_;
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
        continue;
      }
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
        continue;
      }
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        out.push_back(lex_ident());
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c))) {
        out.push_back(lex_number());
        continue;
      }
      Tok kind;
      switch (c) {
        case '{': kind = Tok::LBrace; break;
        case '}': kind = Tok::RBrace; break;
        case '(': kind = Tok::LParen; break;
        case ')': kind = Tok::RParen; break;
        case '[': kind = Tok::LBracket; break;
        case ']': kind = Tok::RBracket; break;
        case ';': kind = Tok::Semi; break;
        case ',': kind = Tok::Comma; break;
        case ':': kind = Tok::Colon; break;
        case '=': kind = Tok::Equal; break;
        case '+': kind = Tok::Plus; break;
        case '-': kind = Tok::Minus; break;
        case '*': kind = Tok::Star; break;
        case '/': kind = Tok::Slash; break;
        default: {
          diags.push_back(ParseDiagnostic{
              Severity::Error, std::string("unexpected character '") + c + "'",
              here(1)});
          advance();
          continue;
        }
      }
      out.push_back(Token{kind, std::string(1, c), here(1)});
      advance();
    }
    out.push_back(Token{Tok::End, "", here(0)});
    return out;
  }

private:
  SourceSpan here(int len) const {
    return SourceSpan{file_, line_, col_, line_, col_ + len};
  }

  void advance() {
    ++pos_;
    ++col_;
  }

  Token lex_ident() {
    const int line = line_, col = col_;
    std::string s;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      s += text_[pos_];
      advance();
    }
    return Token{Tok::Ident, s, SourceSpan{file_, line, col, line_, col_}};
  }

  Token lex_number() {
    const int line = line_, col = col_;
    std::string s;
    bool real = false;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c))) {
        s += c;
        advance();
      } else if (c == '.' && !real) {
        real = true;
        s += c;
        advance();
      } else if ((c == 'e' || c == 'E') && pos_ + 1 < text_.size() &&
                 (std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])) ||
                  text_[pos_ + 1] == '-' || text_[pos_ + 1] == '+')) {
        real = true;
        s += c;
        advance();
        if (text_[pos_] == '-' || text_[pos_] == '+') {
          s += text_[pos_];
          advance();
        }
      } else {
        break;
      }
    }
    return Token{real ? Tok::Real : Tok::Int, s,
                 SourceSpan{file_, line, col, line_, col_}};
  }

  const std::string& text_;
  std::string file_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

struct ParseAbort {};

// event coordinates for mapping validator output back to source spans
struct SpanTable {
  SourceSpan network;
  std::vector<SourceSpan> agents;
  std::vector<std::vector<SourceSpan>> events;
};

class Parser {
public:
  Parser(std::vector<Token> tokens, std::vector<ParseDiagnostic>& diags)
      : toks_(std::move(tokens)), diags_(diags) {}

  void parse_file(std::vector<std::pair<std::string, Network>>& networks) {
    while (!at(Tok::End)) {
      if (!at_keyword("network")) {
        error_here("expected 'network'");
        synchronize();
        continue;
      }
      try {
        parse_network_def(networks);
      } catch (const ParseAbort&) {
        synchronize();
      }
    }
  }

private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<ParseDiagnostic>& diags_;

  const Token& cur() const { return toks_[pos_]; }
  bool at(Tok k) const { return cur().kind == k; }
  bool at_keyword(const std::string& kw) const {
    return cur().kind == Tok::Ident && cur().text == kw;
  }

  Token eat() { return toks_[pos_ == toks_.size() - 1 ? pos_ : pos_++]; }

  Token expect(Tok k, const std::string& what) {
    if (!at(k)) {
      error_here("expected " + what);
      throw ParseAbort{};
    }
    return eat();
  }

  Token expect_keyword(const std::string& kw) {
    if (!at_keyword(kw)) {
      error_here("expected '" + kw + "'");
      throw ParseAbort{};
    }
    return eat();
  }

  void error_here(const std::string& msg) {
    diags_.push_back(ParseDiagnostic{Severity::Error, msg, cur().span});
  }

  void synchronize() {
    while (!at(Tok::End) && !at_keyword("network")) eat();
  }

  // -- small pieces -------------------------------------------------------

  QubitId parse_qubit() {
    Token t = expect(Tok::Int, "a qubit id");
    return QubitId(std::stol(t.text));
  }

  double parse_real_literal() {
    double sign = 1.0;
    if (at(Tok::Minus)) {
      eat();
      sign = -1.0;
    }
    if (at(Tok::Int) || at(Tok::Real)) return sign * std::stod(eat().text);
    error_here("expected a number");
    throw ParseAbort{};
  }

  // <real> | [<real> '*'] pi ['/' <real>], with optional leading sign
  double parse_angle() {
    double sign = 1.0;
    if (at(Tok::Minus)) {
      eat();
      sign = -1.0;
    }
    double coef = 1.0;
    bool have_coef = false;
    if (at(Tok::Int) || at(Tok::Real)) {
      coef = std::stod(eat().text);
      have_coef = true;
      if (at(Tok::Star)) {
        eat();
      } else {
        return sign * coef;  // plain numeric literal
      }
    }
    expect_keyword("pi");
    double value = coef * std::numbers::pi;
    (void)have_coef;
    if (at(Tok::Slash)) {
      eat();
      Token d = expect(Tok::Int, "a divisor");
      value /= std::stod(d.text);
    }
    return sign * value;
  }

  SignalExpr parse_expr() {
    SignalExpr e = parse_term();
    while (at(Tok::Plus)) {
      eat();
      e = e + parse_term();
    }
    return e;
  }

  SignalExpr parse_term() {
    if (at(Tok::Int)) {
      Token t = eat();
      if (t.text != "0" && t.text != "1") {
        diags_.push_back(ParseDiagnostic{
            Severity::Error, "signal constants are bits (0 or 1)", t.span});
        throw ParseAbort{};
      }
      return SignalExpr::bit(t.text == "1" ? 1 : 0);
    }
    if (at(Tok::Ident)) return SignalExpr::name(eat().text);
    error_here("expected a signal term");
    throw ParseAbort{};
  }

  // "-" | name ("," name)*; a trailing ", out:" belongs to the enclosing
  // interface clause, not to the list
  std::vector<std::string> parse_name_list() {
    std::vector<std::string> out;
    if (at(Tok::Minus)) {
      eat();
      return out;
    }
    auto at_clause_head = [&] {
      return at_keyword("out") && pos_ + 1 < toks_.size() &&
             toks_[pos_ + 1].kind == Tok::Colon;
    };
    if (at_clause_head()) return out;
    out.push_back(expect(Tok::Ident, "a name").text);
    while (at(Tok::Comma)) {
      if (pos_ + 1 < toks_.size() && toks_[pos_ + 1].kind == Tok::Ident &&
          toks_[pos_ + 1].text == "out" && pos_ + 2 < toks_.size() &&
          toks_[pos_ + 2].kind == Tok::Colon) {
        break;
      }
      eat();
      out.push_back(expect(Tok::Ident, "a name").text);
    }
    return out;
  }

  std::set<QubitId> parse_id_set() {
    std::set<QubitId> out;
    if (at(Tok::Minus)) {
      eat();
      return out;
    }
    if (at(Tok::RBrace)) return out;
    out.insert(parse_qubit());
    while (at(Tok::Comma)) {
      eat();
      out.insert(parse_qubit());
    }
    return out;
  }

  // -- commands and events -------------------------------------------------

  Command parse_command() {
    if (at_keyword("nil")) {
      eat();
      return Nil{};
    }
    Token head = expect(Tok::Ident, "a command (E, M, X, Z or nil)");
    if (head.text == "E") {
      expect(Tok::LParen, "'('");
      QubitId a = parse_qubit();
      expect(Tok::Comma, "','");
      QubitId b = parse_qubit();
      expect(Tok::RParen, "')'");
      return Entangle{a, b};
    }
    if (head.text == "M") {
      expect(Tok::LParen, "'('");
      Measure m;
      m.q = parse_qubit();
      expect(Tok::Comma, "','");
      m.angle = parse_angle();
      if (at(Tok::Comma)) {
        eat();
        m.s_dep = parse_expr();
        if (at(Tok::Comma)) {
          eat();
          m.t_dep = parse_expr();
        }
      }
      expect(Tok::RParen, "')'");
      return m;
    }
    if (head.text == "X" || head.text == "Z") {
      expect(Tok::LParen, "'('");
      QubitId q = parse_qubit();
      SignalExpr dep = SignalExpr::bit(1);  // bare correction always fires
      if (at(Tok::Comma)) {
        eat();
        dep = parse_expr();
      }
      expect(Tok::RParen, "')'");
      if (head.text == "X") return CorrectX{q, dep};
      return CorrectZ{q, dep};
    }
    diags_.push_back(ParseDiagnostic{
        Severity::Error, "unknown command '" + head.text + "'", head.span});
    throw ParseAbort{};
  }

  // 'pattern' '[' cmd (';' cmd)* ']' -- written rightmost-first, as in the
  // measurement-calculus notation; reversed into application order here
  net::Event parse_pattern_event() {
    expect_keyword("pattern");
    expect(Tok::LBracket, "'['");
    std::vector<Command> notation;
    if (!at(Tok::RBracket)) {
      notation.push_back(parse_command());
      while (at(Tok::Semi)) {
        eat();
        if (at(Tok::RBracket)) break;
        notation.push_back(parse_command());
      }
    }
    expect(Tok::RBracket, "']'");
    return net::PatternEvent{calculus::from_notation_order(std::move(notation))};
  }

  net::Event parse_event() {
    if (at_keyword("pattern")) return parse_pattern_event();
    if (at_keyword("send")) {
      eat();
      std::string ch = expect(Tok::Ident, "a channel name").text;
      expect(Tok::LParen, "'('");
      std::vector<SignalExpr> values;
      values.push_back(parse_expr());
      while (at(Tok::Comma)) {
        eat();
        values.push_back(parse_expr());
      }
      expect(Tok::RParen, "')'");
      return net::ClassicalSend{std::move(ch), std::move(values)};
    }
    if (at_keyword("recv")) {
      eat();
      std::string ch = expect(Tok::Ident, "a channel name").text;
      expect(Tok::LParen, "'('");
      std::vector<std::string> names;
      names.push_back(expect(Tok::Ident, "a name").text);
      while (at(Tok::Comma)) {
        eat();
        names.push_back(expect(Tok::Ident, "a name").text);
      }
      expect(Tok::RParen, "')'");
      return net::ClassicalRecv{std::move(ch), std::move(names)};
    }
    if (at_keyword("qsend") || at_keyword("qrecv")) {
      const bool send = cur().text == "qsend";
      eat();
      std::string ch = expect(Tok::Ident, "a channel name").text;
      expect(Tok::LParen, "'('");
      QubitId q = parse_qubit();
      expect(Tok::RParen, "')'");
      if (send) return net::QuantumSend{std::move(ch), q};
      return net::QuantumRecv{std::move(ch), q};
    }
    error_here("expected an event (pattern, send, recv, qsend, qrecv)");
    throw ParseAbort{};
  }

  // -- agents and networks ---------------------------------------------------

  struct AgentProgram {
    std::set<std::string> cin, cout;
    std::set<QubitId> sort;
    std::vector<net::Event> events;
    std::vector<SourceSpan> event_spans;
  };

  AgentProgram parse_agent_program() {
    AgentProgram p;
    expect(Tok::LParen, "'('");
    expect_keyword("in");
    expect(Tok::Colon, "':'");
    for (auto& n : parse_name_list()) p.cin.insert(std::move(n));
    expect(Tok::Comma, "','");
    expect_keyword("out");
    expect(Tok::Colon, "':'");
    for (auto& n : parse_name_list()) p.cout.insert(std::move(n));
    expect(Tok::RParen, "')'");
    if (at_keyword("qubits")) {
      eat();
      expect(Tok::LBrace, "'{'");
      p.sort = parse_id_set();
      expect(Tok::RBrace, "'}'");
    }
    expect(Tok::LBrace, "'{'");
    while (!at(Tok::RBrace)) {
      const SourceSpan span = cur().span;
      p.events.push_back(parse_event());
      p.event_spans.push_back(span);
      if (at(Tok::Semi)) {
        eat();
      } else {
        break;
      }
    }
    expect(Tok::RBrace, "'}'");
    return p;
  }

  Agent parse_agent(SpanTable& spans) {
    expect_keyword("agent");
    Token name = expect(Tok::Ident, "an agent name");
    AgentProgram first = parse_agent_program();

    Agent a;
    a.name = name.text;
    a.cin = std::move(first.cin);
    a.cout = std::move(first.cout);
    a.sort = std::move(first.sort);
    a.events = std::move(first.events);
    std::vector<SourceSpan> event_spans = std::move(first.event_spans);

    while (at_keyword("compose")) {
      Token kw = eat();
      AgentProgram next = parse_agent_program();
      Agent second;
      second.name = a.name;
      second.cin = std::move(next.cin);
      second.cout = std::move(next.cout);
      second.sort = std::move(next.sort);
      second.events = std::move(next.events);
      try {
        a = net::agent_compose(a, second);
      } catch (const Error& e) {
        diags_.push_back(ParseDiagnostic{Severity::Error, e.what(), kw.span});
        throw ParseAbort{};
      }
      event_spans.insert(event_spans.end(), next.event_spans.begin(),
                         next.event_spans.end());
    }

    spans.agents.push_back(name.span);
    spans.events.push_back(std::move(event_spans));
    return a;
  }

  Preparation parse_preparation() {
    expect_keyword("prepare");
    if (at_keyword("state")) {
      eat();
      expect(Tok::LParen, "'('");
      std::vector<QubitId> ids;
      ids.push_back(parse_qubit());
      while (at(Tok::Comma)) {
        eat();
        ids.push_back(parse_qubit());
      }
      expect(Tok::RParen, "')'");
      Token open = expect(Tok::LBracket, "'['");
      std::vector<std::complex<double>> amps;
      while (!at(Tok::RBracket)) {
        if (at(Tok::LParen)) {
          eat();
          double re = parse_real_literal();
          expect(Tok::Comma, "','");
          double im = parse_real_literal();
          expect(Tok::RParen, "')'");
          amps.emplace_back(re, im);
        } else {
          amps.emplace_back(parse_real_literal(), 0.0);
        }
        if (at(Tok::Comma)) eat();
      }
      expect(Tok::RBracket, "']'");
      expect(Tok::Semi, "';'");
      qnum::Vector v(Eigen::Index(amps.size()));
      for (std::size_t i = 0; i < amps.size(); ++i) v(Eigen::Index(i)) = amps[i];
      try {
        return Preparation::state(qnum::QRegisterState::pure(ids, std::move(v)));
      } catch (const Error& e) {
        diags_.push_back(ParseDiagnostic{Severity::Error, e.what(), open.span});
        throw ParseAbort{};
      }
    }

    std::set<QubitId> space;
    std::vector<Entangle> pairs;
    auto one = [&] {
      Token head = expect(Tok::Ident, "'E' or 'state'");
      if (head.text != "E") {
        diags_.push_back(ParseDiagnostic{
            Severity::Error, "preparations are entangle lists or explicit states",
            head.span});
        throw ParseAbort{};
      }
      expect(Tok::LParen, "'('");
      QubitId a = parse_qubit();
      expect(Tok::Comma, "','");
      QubitId b = parse_qubit();
      expect(Tok::RParen, "')'");
      space.insert(a);
      space.insert(b);
      pairs.push_back(Entangle{a, b});
    };
    one();
    while (at(Tok::Comma)) {
      eat();
      one();
    }
    expect(Tok::Semi, "';'");
    return Preparation::entangle(std::move(space), std::move(pairs));
  }

  void parse_network_def(std::vector<std::pair<std::string, Network>>& networks) {
    expect_keyword("network");
    Token name = expect(Tok::Ident, "a network name");

    if (at(Tok::Equal)) {
      eat();
      if (!at_keyword("seq") && !at_keyword("par")) {
        error_here("expected 'seq' or 'par'");
        throw ParseAbort{};
      }
      const bool seq = cur().text == "seq";
      eat();
      expect(Tok::LParen, "'('");
      Token lhs = expect(Tok::Ident, "a network name");
      expect(Tok::Comma, "','");
      Token rhs = expect(Tok::Ident, "a network name");
      expect(Tok::RParen, "')'");
      if (at(Tok::Semi)) eat();

      auto lookup = [&](const Token& t) -> const Network* {
        for (const auto& [n, net] : networks) {
          if (n == t.text) return &net;
        }
        diags_.push_back(ParseDiagnostic{
            Severity::Error, "unknown network '" + t.text + "'", t.span});
        return nullptr;
      };
      const Network* a = lookup(lhs);
      const Network* b = lookup(rhs);
      if (!a || !b) throw ParseAbort{};
      try {
        Network composed =
            seq ? net::net_seq_compose(*a, *b) : net::net_par_compose(*a, *b);
        report_violations(composed, SpanTable{name.span, {}, {}});
        networks.emplace_back(name.text, std::move(composed));
      } catch (const Error& e) {
        diags_.push_back(ParseDiagnostic{Severity::Error, e.what(), name.span});
        throw ParseAbort{};
      }
      return;
    }

    expect(Tok::LBrace, "'{'");
    Network n;
    SpanTable spans;
    spans.network = name.span;
    if (at_keyword("prepare")) n.prep = parse_preparation();
    while (at_keyword("agent")) n.agents.push_back(parse_agent(spans));
    expect(Tok::RBrace, "'}'");

    report_violations(n, spans);
    networks.emplace_back(name.text, std::move(n));
  }

  void report_violations(const Network& n, const SpanTable& spans) {
    for (const auto& v : net::validate_network(n)) {
      SourceSpan where = spans.network;
      if (v.agent >= 0 && std::size_t(v.agent) < spans.agents.size()) {
        where = spans.agents[std::size_t(v.agent)];
        if (v.event >= 0 &&
            std::size_t(v.event) < spans.events[std::size_t(v.agent)].size()) {
          where = spans.events[std::size_t(v.agent)][std::size_t(v.event)];
        }
      }
      diags_.push_back(
          ParseDiagnostic{Severity::Error, v.code + ": " + v.message, where});
    }
  }
};

}  // namespace

bool ParseResult::ok() const {
  if (networks.empty()) return false;
  for (const auto& d : diagnostics) {
    if (d.severity == Severity::Error) return false;
  }
  return true;
}

const net::Network& ParseResult::main() const {
  if (networks.empty()) throw Error("no network parsed");
  return networks.back().second;
}

ParseResult parse_network(const std::string& text, const std::string& filename) {
  ParseResult result;
  Lexer lexer(text, filename);
  auto tokens = lexer.run(result.diagnostics);
  Parser parser(std::move(tokens), result.diagnostics);
  parser.parse_file(result.networks);
  return result;
}

std::string format_diagnostics(const std::vector<ParseDiagnostic>& diagnostics) {
  std::ostringstream os;
  for (const auto& d : diagnostics) {
    os << d.span.file << ":" << d.span.line << ":" << d.span.column << ": "
       << (d.severity == Severity::Error ? "error" : "warning") << ": " << d.message
       << "\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// rendering
// ---------------------------------------------------------------------------

namespace {

std::string render_angle(double a) {
  // prefer symbolic multiples of pi
  for (int denom = 1; denom <= 16; ++denom) {
    const double scaled = a * denom / std::numbers::pi;
    const double num = std::round(scaled);
    if (std::abs(scaled - num) < 1e-12 && std::abs(num) < 1e6) {
      if (num == 0) return "0";
      std::ostringstream os;
      if (num < 0) os << "-";
      const long n = std::lround(std::abs(num));
      if (n != 1) os << n << "*";
      os << "pi";
      if (denom != 1) os << "/" << denom;
      return os.str();
    }
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", a);
  return buf;
}

std::string render_expr(const SignalExpr& e) {
  std::ostringstream os;
  bool first = true;
  for (const auto& t : e.terms) {
    if (!first) os << "+";
    os << t;
    first = false;
  }
  if (e.constant || e.terms.empty()) {
    if (!first) os << "+";
    os << e.constant;
  }
  return os.str();
}

std::string render_command(const Command& c) {
  std::ostringstream os;
  if (const auto* e = std::get_if<Entangle>(&c)) {
    os << "E(" << e->a << "," << e->b << ")";
  } else if (const auto* m = std::get_if<Measure>(&c)) {
    os << "M(" << m->q << "," << render_angle(m->angle);
    const bool s_trivial = m->s_dep == SignalExpr{};
    const bool t_trivial = m->t_dep == SignalExpr{};
    if (!s_trivial || !t_trivial) {
      os << "," << render_expr(m->s_dep);
      if (!t_trivial) os << "," << render_expr(m->t_dep);
    }
    os << ")";
  } else if (const auto* x = std::get_if<CorrectX>(&c)) {
    os << "X(" << x->q;
    if (!(x->dep == SignalExpr::bit(1))) os << "," << render_expr(x->dep);
    os << ")";
  } else if (const auto* z = std::get_if<CorrectZ>(&c)) {
    os << "Z(" << z->q;
    if (!(z->dep == SignalExpr::bit(1))) os << "," << render_expr(z->dep);
    os << ")";
  } else {
    os << "nil";
  }
  return os.str();
}

std::string render_name_set(const std::set<std::string>& names) {
  if (names.empty()) return "-";
  std::ostringstream os;
  bool first = true;
  for (const auto& n : names) {
    if (!first) os << ", ";
    os << n;
    first = false;
  }
  return os.str();
}

std::string render_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void render_event(std::ostringstream& os, const net::Event& e) {
  if (const auto* p = std::get_if<net::PatternEvent>(&e)) {
    os << "pattern [ ";
    // back to notation order: rightmost applies first
    for (std::size_t i = p->commands.size(); i-- > 0;) {
      os << render_command(p->commands[i]);
      if (i != 0) os << "; ";
    }
    os << " ]";
  } else if (const auto* s = std::get_if<net::ClassicalSend>(&e)) {
    os << "send " << s->channel << " (";
    for (std::size_t i = 0; i < s->values.size(); ++i) {
      if (i) os << ", ";
      os << render_expr(s->values[i]);
    }
    os << ")";
  } else if (const auto* r = std::get_if<net::ClassicalRecv>(&e)) {
    os << "recv " << r->channel << " (";
    for (std::size_t i = 0; i < r->names.size(); ++i) {
      if (i) os << ", ";
      os << r->names[i];
    }
    os << ")";
  } else if (const auto* qs = std::get_if<net::QuantumSend>(&e)) {
    os << "qsend " << qs->channel << " (" << qs->qubit << ")";
  } else if (const auto* qr = std::get_if<net::QuantumRecv>(&e)) {
    os << "qrecv " << qr->channel << " (" << qr->qubit << ")";
  }
}

}  // namespace

std::string render_network(const net::Network& n, const std::string& name) {
  std::ostringstream os;
  os << "network " << name << " {\n";

  if (n.prep.is_pattern()) {
    os << "  prepare ";
    const auto& pairs = n.prep.pattern_pairs();
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      if (i) os << ", ";
      os << "E(" << pairs[i].a << "," << pairs[i].b << ")";
    }
    os << ";\n";
  } else if (n.prep.is_state()) {
    const auto& s = n.prep.explicit_state();
    os << "  prepare state (";
    const auto& ids = s.ids();
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (i) os << ",";
      os << ids[i];
    }
    os << ") [ ";
    const auto& amp = s.amplitudes();
    for (Eigen::Index i = 0; i < amp.size(); ++i) {
      if (i) os << ", ";
      os << "(" << render_number(amp(i).real()) << "," << render_number(amp(i).imag())
         << ")";
    }
    os << " ];\n";
  }

  for (const auto& a : n.agents) {
    os << "  agent " << a.name << "(in: " << render_name_set(a.cin)
       << ", out: " << render_name_set(a.cout) << ") qubits {";
    bool first = true;
    for (QubitId q : a.sort) {
      if (!first) os << ",";
      os << q;
      first = false;
    }
    if (a.sort.empty()) os << "-";
    os << "} {\n";
    for (const auto& e : a.events) {
      os << "    ";
      std::ostringstream line;
      render_event(line, e);
      os << line.str() << ";\n";
    }
    os << "  }\n";
  }
  os << "}\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// inputs documents
// ---------------------------------------------------------------------------

bool InputParseResult::ok() const {
  for (const auto& d : diagnostics) {
    if (d.severity == Severity::Error) return false;
  }
  return true;
}

InputParseResult parse_inputs(const std::string& text, const std::string& filename) {
  InputParseResult result;
  Lexer lexer(text, filename);
  auto tokens = lexer.run(result.diagnostics);

  std::size_t pos = 0;
  auto cur = [&]() -> const Token& { return tokens[pos]; };
  auto eat = [&]() -> Token { return tokens[pos == tokens.size() - 1 ? pos : pos++]; };
  auto fail = [&](const std::string& msg) {
    result.diagnostics.push_back(ParseDiagnostic{Severity::Error, msg, cur().span});
  };
  auto expect = [&](Tok k, const std::string& what) -> bool {
    if (cur().kind != k) {
      fail("expected " + what);
      return false;
    }
    eat();
    return true;
  };

  while (cur().kind != Tok::End) {
    if (cur().kind == Tok::Ident && cur().text == "bit") {
      eat();
      if (cur().kind != Tok::Ident) {
        fail("expected a name after 'bit'");
        return result;
      }
      const std::string name = eat().text;
      if (!expect(Tok::Equal, "'='")) return result;
      if (cur().kind != Tok::Int || (cur().text != "0" && cur().text != "1")) {
        fail("expected 0 or 1");
        return result;
      }
      result.doc.bits[name] = eat().text == "1" ? 1 : 0;
      if (!expect(Tok::Semi, "';'")) return result;
    } else if (cur().kind == Tok::Ident && cur().text == "state") {
      eat();
      if (cur().kind != Tok::Ident) {
        fail("expected an agent name after 'state'");
        return result;
      }
      const std::string agent = eat().text;
      if (!expect(Tok::LParen, "'('")) return result;
      std::vector<QubitId> ids;
      while (cur().kind == Tok::Int) {
        ids.push_back(QubitId(std::stol(eat().text)));
        if (cur().kind == Tok::Comma) eat();
      }
      if (!expect(Tok::RParen, "')'")) return result;
      if (!expect(Tok::Equal, "'='")) return result;
      const Token open = cur();
      if (!expect(Tok::LBracket, "'['")) return result;
      std::vector<std::complex<double>> amps;
      while (cur().kind != Tok::RBracket && cur().kind != Tok::End) {
        double sign = 1.0;
        if (cur().kind == Tok::Minus) {
          eat();
          sign = -1.0;
        }
        if (cur().kind == Tok::LParen) {
          eat();
          double re_sign = sign;
          double re = 0, im = 0;
          if (cur().kind == Tok::Minus) {
            eat();
            re_sign = -re_sign;
          }
          if (cur().kind != Tok::Int && cur().kind != Tok::Real) {
            fail("expected a number");
            return result;
          }
          re = re_sign * std::stod(eat().text);
          if (!expect(Tok::Comma, "','")) return result;
          double im_sign = 1.0;
          if (cur().kind == Tok::Minus) {
            eat();
            im_sign = -1.0;
          }
          if (cur().kind != Tok::Int && cur().kind != Tok::Real) {
            fail("expected a number");
            return result;
          }
          im = im_sign * std::stod(eat().text);
          if (!expect(Tok::RParen, "')'")) return result;
          amps.emplace_back(re, im);
        } else if (cur().kind == Tok::Int || cur().kind == Tok::Real) {
          amps.emplace_back(sign * std::stod(eat().text), 0.0);
        } else {
          fail("expected an amplitude");
          return result;
        }
        if (cur().kind == Tok::Comma) eat();
      }
      if (!expect(Tok::RBracket, "']'")) return result;
      if (!expect(Tok::Semi, "';'")) return result;
      qnum::Vector v(Eigen::Index(amps.size()));
      for (std::size_t i = 0; i < amps.size(); ++i) v(Eigen::Index(i)) = amps[i];
      try {
        result.doc.states.emplace(agent, qnum::QRegisterState::pure(ids, std::move(v)));
      } catch (const Error& e) {
        result.diagnostics.push_back(
            ParseDiagnostic{Severity::Error, e.what(), open.span});
        return result;
      }
    } else {
      fail("expected 'bit' or 'state'");
      return result;
    }
  }
  return result;
}

}  // namespace mcnet::dsl
