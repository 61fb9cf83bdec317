#include "af2m/parser.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace af2m {

const EquationSet* SourceFile::find_eqset(const std::string& name) const {
  for (const auto& [n, e] : eqsets)
    if (n == name) return &e;
  return nullptr;
}

namespace {

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

enum class Tok {
  Ident, Int, LParen, RParen, LBrace, RBrace, LBrack, RBrack,
  Comma, Semi, Dot, Colon, Slash, Assign, FatArrow, Arrow, OrOp, AndOp,
  Restr, Squig, SquigStar, Equal, Lt, Gt, Lambda, End
};

struct Token {
  Tok kind;
  std::string text;
  int line = 1, col = 1;
};

struct LexError {
  int line, col;
  std::string message;
};

std::vector<Token> lex(const std::string& src, std::vector<LexError>& errors) {
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto push = [&](Tok k, std::string t) { out.push_back({k, std::move(t), line, col}); };
  while (i < src.size()) {
    char c = src[i];
    if (c == '\n') {
      ++line;
      col = 1;
      ++i;
      continue;
    }
    if (isspace(static_cast<unsigned char>(c))) {
      ++col;
      ++i;
      continue;
    }
    if (c == '-' && i + 1 < src.size() && src[i + 1] == '-') {
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    int tcol = col;
    auto two = [&](char a, char b) {
      return c == a && i + 1 < src.size() && src[i + 1] == b;
    };
    if (isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i;
      while (j < src.size() &&
             (isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' || src[j] == '\''))
        ++j;
      out.push_back({Tok::Ident, src.substr(i, j - i), line, tcol});
      col += static_cast<int>(j - i);
      i = j;
      continue;
    }
    if (isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < src.size() && isdigit(static_cast<unsigned char>(src[j]))) ++j;
      out.push_back({Tok::Int, src.substr(i, j - i), line, tcol});
      col += static_cast<int>(j - i);
      i = j;
      continue;
    }
    if (two('~', '>')) {
      if (i + 2 < src.size() && src[i + 2] == '*') {
        push(Tok::SquigStar, "~>*");
        i += 3;
        col += 3;
      } else {
        push(Tok::Squig, "~>");
        i += 2;
        col += 2;
      }
      continue;
    }
    if (two(':', '=')) { push(Tok::Assign, ":="); i += 2; col += 2; continue; }
    if (two('=', '>')) { push(Tok::FatArrow, "=>"); i += 2; col += 2; continue; }
    if (two('-', '>')) { push(Tok::Arrow, "->"); i += 2; col += 2; continue; }
    if (two('\\', '/')) { push(Tok::OrOp, "\\/"); i += 2; col += 2; continue; }
    if (two('/', '\\')) { push(Tok::AndOp, "/\\"); i += 2; col += 2; continue; }
    if (two('|', '^')) { push(Tok::Restr, "|^"); i += 2; col += 2; continue; }
    switch (c) {
      case '(': push(Tok::LParen, "("); break;
      case ')': push(Tok::RParen, ")"); break;
      case '{': push(Tok::LBrace, "{"); break;
      case '}': push(Tok::RBrace, "}"); break;
      case '[': push(Tok::LBrack, "["); break;
      case ']': push(Tok::RBrack, "]"); break;
      case ',': push(Tok::Comma, ","); break;
      case ';': push(Tok::Semi, ";"); break;
      case '.': push(Tok::Dot, "."); break;
      case ':': push(Tok::Colon, ":"); break;
      case '/': push(Tok::Slash, "/"); break;
      case '=': push(Tok::Equal, "="); break;
      case '<': push(Tok::Lt, "<"); break;
      case '>': push(Tok::Gt, ">"); break;
      case '\\': push(Tok::Lambda, "\\"); break;
      default:
        errors.push_back({line, tcol, std::string("unexpected character '") + c + "'"});
        break;
    }
    ++i;
    ++col;
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct ParseFail {
  int line, col;
  std::string message;
};

const std::set<std::string> kKeywords = {
    "sig", "pred", "let", "mu", "nu", "ctors", "dtors", "eqs", "thm", "term",
    "expect", "uses", "hyps", "all", "all2", "ex", "in", "out", "mrec",
    "mcorec", "mit", "mcoit", "fst", "snd", "inl", "inr", "case", "pack",
    "open", "unit", "by", "witness", "fuel", "refl", "inst", "trans", "cong",
    "fwd", "bwd", "lemma"};

struct Parser {
  std::vector<Token> toks;
  size_t pos = 0;
  SourceFile* file;
  Signature sig;
  std::map<std::string, PredicateRef> lets;       // abbreviations + mu/nu names
  std::map<std::string, int> bound_pred;          // in-scope second-order vars

  const Token& peek(int k = 0) const { return toks[std::min(pos + k, toks.size() - 1)]; }
  const Token& next() { return toks[pos < toks.size() - 1 ? pos++ : pos]; }
  bool at(Tok k) const { return peek().kind == k; }
  bool accept(Tok k) {
    if (!at(k)) return false;
    ++pos;
    return true;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseFail{peek().line, peek().col, msg};
  }
  Token expect(Tok k, const std::string& what) {
    if (!at(k)) fail("expected " + what + ", got '" + peek().text + "'");
    return next();
  }
  std::string ident(const std::string& what) {
    if (!at(Tok::Ident)) fail("expected " + what + ", got '" + peek().text + "'");
    std::string n = peek().text;
    if (kKeywords.count(n)) fail("'" + n + "' is a keyword and cannot name a " + what);
    ++pos;
    return n;
  }
  // a name usable as a function symbol: identifier or integer literal
  std::string symbol_name() {
    if (at(Tok::Int)) return next().text;
    return ident("symbol name");
  }
  int integer(const std::string& what) {
    if (!at(Tok::Int)) fail("expected " + what);
    return std::stoi(next().text);
  }

  bool is_predicate_name(const std::string& n) const {
    return lets.count(n) || bound_pred.count(n) || sig.predicate_symbols.count(n);
  }

  PredicateRef resolve_predicate(const std::string& n, int line, int col) {
    auto li = lets.find(n);
    if (li != lets.end()) return li->second;
    auto bi = bound_pred.find(n);
    if (bi != bound_pred.end()) return Predicate::var2(n, bi->second);
    auto si = sig.predicate_symbols.find(n);
    if (si != sig.predicate_symbols.end()) return Predicate::symbol(n, si->second);
    throw ParseFail{line, col, "unknown predicate '" + n + "'"};
  }

  // ---- object terms ----

  ObjTerm obj_term() {
    if (at(Tok::Int) || at(Tok::Ident)) {
      Token t = next();
      if (kKeywords.count(t.text))
        throw ParseFail{t.line, t.col, "'" + t.text + "' is a keyword"};
      std::string n = t.text;
      if (accept(Tok::LParen)) {
        std::vector<ObjTerm> args;
        if (!at(Tok::RParen)) {
          args.push_back(obj_term());
          while (accept(Tok::Comma)) args.push_back(obj_term());
        }
        expect(Tok::RParen, "')'");
        if (!sig.functions.count(n))
          throw ParseFail{t.line, t.col, "unknown function symbol '" + n + "'"};
        return ObjTerm::app(n, std::move(args));
      }
      auto fi = sig.functions.find(n);
      if (fi != sig.functions.end()) {
        if (fi->second != 0)
          throw ParseFail{t.line, t.col,
                          "'" + n + "' has arity " + std::to_string(fi->second)};
        return ObjTerm::app(n, {});
      }
      return ObjTerm::var(n);
    }
    fail("expected an object term");
  }

  // ---- predicates & formulas ----

  PredicateRef predicate() {
    if (at(Tok::LBrace)) return comprehension();
    Token t = peek();
    std::string n = ident("predicate name");
    if (!is_predicate_name(n) && accept(Tok::Slash)) {
      // a free second-order variable with a stated arity
      int arity = integer("arity");
      return Predicate::var2(n, arity);
    }
    return resolve_predicate(n, t.line, t.col);
  }

  PredicateRef comprehension() {
    expect(Tok::LBrace, "'{'");
    std::vector<std::string> binders;
    binders.push_back(ident("binder"));
    while (accept(Tok::Comma)) binders.push_back(ident("binder"));
    expect(Tok::FatArrow, "'=>'");
    FormulaRef body = formula();
    expect(Tok::RBrace, "'}'");
    return Predicate::compr(std::move(binders), std::move(body));
  }

  FormulaRef formula() { return formula_implies(); }

  FormulaRef formula_implies() {
    FormulaRef a = formula_or();
    if (accept(Tok::Arrow)) return Formula::implies(a, formula_implies());
    return a;
  }

  FormulaRef formula_or() {
    FormulaRef a = formula_and();
    while (accept(Tok::OrOp)) a = Formula::disj(a, formula_and());
    return a;
  }

  FormulaRef formula_and() {
    FormulaRef a = formula_restrict();
    while (accept(Tok::AndOp)) a = Formula::conj(a, formula_restrict());
    return a;
  }

  FormulaRef formula_restrict() {
    FormulaRef a = formula_primary();
    while (accept(Tok::Restr)) {
      expect(Tok::LParen, "'('");
      ObjTerm l = obj_term();
      expect(Tok::Equal, "'='");
      ObjTerm r = obj_term();
      expect(Tok::RParen, "')'");
      a = Formula::restrict(a, std::move(l), std::move(r));
    }
    return a;
  }

  FormulaRef formula_primary() {
    if (at(Tok::Ident) && (peek().text == "all" || peek().text == "ex")) {
      bool is_all = peek().text == "all";
      next();
      std::string x = ident("variable");
      expect(Tok::Dot, "'.'");
      FormulaRef body = formula();
      return is_all ? Formula::forall_obj(x, body) : Formula::exists_obj(x, body);
    }
    if (at(Tok::Ident) && peek().text == "all2") {
      next();
      std::string x = ident("second-order variable");
      expect(Tok::Slash, "'/'");
      int arity = integer("arity");
      expect(Tok::Dot, "'.'");
      auto saved = bound_pred.find(x) != bound_pred.end()
                       ? std::optional<int>(bound_pred[x])
                       : std::nullopt;
      bound_pred[x] = arity;
      FormulaRef body = formula();
      if (saved)
        bound_pred[x] = *saved;
      else
        bound_pred.erase(x);
      return Formula::forall_pred(x, arity, body);
    }
    if (at(Tok::LParen)) {
      next();
      FormulaRef a = formula();
      expect(Tok::RParen, "')'");
      return a;
    }
    if (at(Tok::LBrace)) {
      PredicateRef p = comprehension();
      std::vector<ObjTerm> args = atom_args();
      return Formula::atom(std::move(p), std::move(args));
    }
    if (at(Tok::Ident) || at(Tok::Int)) {
      Token t = peek();
      if (t.kind == Tok::Ident && is_predicate_name(t.text) && !kKeywords.count(t.text)) {
        next();
        PredicateRef p = resolve_predicate(t.text, t.line, t.col);
        std::vector<ObjTerm> args = atom_args();
        return Formula::atom(std::move(p), std::move(args));
      }
      // an unknown applied name that is no function symbol is read as an atom
      // headed by a free second-order variable
      if (t.kind == Tok::Ident && !kKeywords.count(t.text) &&
          !sig.functions.count(t.text) && peek(1).kind == Tok::LParen) {
        next();
        std::vector<ObjTerm> args = atom_args();
        int arity = static_cast<int>(args.size());
        return Formula::atom(Predicate::var2(t.text, arity), std::move(args));
      }
      // otherwise this must be a term equation
      ObjTerm l = obj_term();
      expect(Tok::Equal, "'=' (term equation)");
      ObjTerm r = obj_term();
      return mk_equation(l, r);
    }
    fail("expected a formula");
  }

  std::vector<ObjTerm> atom_args() {
    std::vector<ObjTerm> args;
    if (accept(Tok::LParen)) {
      if (!at(Tok::RParen)) {
        args.push_back(obj_term());
        while (accept(Tok::Comma)) args.push_back(obj_term());
      }
      expect(Tok::RParen, "')'");
    }
    return args;
  }

  // ---- proof terms ----

  TermRef proof_term() {
    if (at(Tok::Lambda)) {
      next();
      std::vector<std::string> binders;
      binders.push_back(ident("binder"));
      while (at(Tok::Ident) && !kKeywords.count(peek().text))
        binders.push_back(ident("binder"));
      expect(Tok::Dot, "'.'");
      TermRef body = proof_term();
      for (size_t i = binders.size(); i-- > 0;) body = ProofTerm::lam(binders[i], body);
      return body;
    }
    TermRef head = proof_operand();
    while (starts_operand()) head = ProofTerm::app(head, proof_operand());
    return head;
  }

  bool starts_operand() const {
    if (at(Tok::LParen) || at(Tok::Lt)) return true;
    if (!at(Tok::Ident)) return false;
    const std::string& n = peek().text;
    if (!kKeywords.count(n)) return true;
    return n == "in" || n == "out" || n == "mrec" || n == "mcorec" || n == "mit" ||
           n == "mcoit" || n == "fst" || n == "snd" || n == "inl" || n == "inr" ||
           n == "case" || n == "pack" || n == "open" || n == "unit";
  }

  TermRef proof_operand() {
    if (at(Tok::Ident)) {
      const std::string n = peek().text;
      auto unary = [&](TermRef (*mk)(TermRef)) {
        next();
        return mk(proof_atom());
      };
      if (n == "in") return unary(+[](TermRef t) { return ProofTerm::in(std::move(t)); });
      if (n == "out") return unary(+[](TermRef t) { return ProofTerm::out(std::move(t)); });
      if (n == "fst") return unary(+[](TermRef t) { return ProofTerm::fst(std::move(t)); });
      if (n == "snd") return unary(+[](TermRef t) { return ProofTerm::snd(std::move(t)); });
      if (n == "inl") return unary(+[](TermRef t) { return ProofTerm::inl(std::move(t)); });
      if (n == "inr") return unary(+[](TermRef t) { return ProofTerm::inr(std::move(t)); });
      if (n == "pack") return unary(+[](TermRef t) { return ProofTerm::pack(std::move(t)); });
      if (n == "mrec" || n == "mcorec" || n == "mit" || n == "mcoit") {
        next();
        TermRef s = proof_atom();
        TermKind k = n == "mrec" ? TermKind::MRec
                     : n == "mcorec" ? TermKind::MCoRec
                     : n == "mit" ? TermKind::MIt
                                  : TermKind::MCoIt;
        if (at(Tok::LParen) || at(Tok::Lt) ||
            (at(Tok::Ident) && !kKeywords.count(peek().text)) ||
            (at(Tok::Ident) && peek().text == "unit")) {
          TermRef r = proof_atom();
          switch (k) {
            case TermKind::MRec: return ProofTerm::mrec(s, r);
            case TermKind::MCoRec: return ProofTerm::mcorec(s, r);
            case TermKind::MIt: return ProofTerm::mit(s, r);
            default: return ProofTerm::mcoit(s, r);
          }
        }
        return ProofTerm::partial(k, s);
      }
      if (n == "case") {
        next();
        expect(Tok::LParen, "'('");
        TermRef scrut = proof_term();
        expect(Tok::Comma, "','");
        std::string x = ident("binder");
        expect(Tok::Dot, "'.'");
        TermRef l = proof_term();
        expect(Tok::Comma, "','");
        std::string y = ident("binder");
        expect(Tok::Dot, "'.'");
        TermRef r = proof_term();
        expect(Tok::RParen, "')'");
        return ProofTerm::case_of(scrut, x, l, y, r);
      }
      if (n == "open") {
        next();
        expect(Tok::LParen, "'('");
        TermRef scrut = proof_term();
        expect(Tok::Comma, "','");
        std::string u = ident("binder");
        expect(Tok::Dot, "'.'");
        TermRef body = proof_term();
        expect(Tok::RParen, "')'");
        return ProofTerm::open_of(scrut, u, body);
      }
    }
    return proof_atom();
  }

  TermRef proof_atom() {
    if (at(Tok::LParen)) {
      next();
      TermRef t = proof_term();
      expect(Tok::RParen, "')'");
      return t;
    }
    if (at(Tok::Lt)) {
      next();
      TermRef a = proof_term();
      expect(Tok::Comma, "','");
      TermRef b = proof_term();
      expect(Tok::Gt, "'>'");
      return ProofTerm::pair(a, b);
    }
    if (at(Tok::Ident)) {
      if (peek().text == "unit") {
        next();
        return ProofTerm::unit();
      }
      if (kKeywords.count(peek().text)) {
        // keyworded operand (in/out/...) in atom position
        return proof_operand();
      }
      return ProofTerm::var(next().text);
    }
    fail("expected a proof term");
  }

  // ---- evidence ----

  EqEvidence evidence() {
    if (!at(Tok::Ident)) fail("expected evidence");
    std::string n = peek().text;
    if (n == "refl") {
      next();
      expect(Tok::LParen, "'('");
      ObjTerm t = obj_term();
      expect(Tok::RParen, "')'");
      return EqEvidence::refl(std::move(t));
    }
    if (n == "inst") {
      next();
      expect(Tok::LParen, "'('");
      int idx = integer("equation index");
      expect(Tok::Comma, "','");
      if (!at(Tok::Ident) || (peek().text != "fwd" && peek().text != "bwd"))
        fail("orientation must be fwd or bwd");
      std::string dir = next().text;
      ObjSubst sigma;
      while (accept(Tok::Comma)) {
        std::string v = ident("variable");
        expect(Tok::Assign, "':='");
        sigma[v] = obj_term();
      }
      expect(Tok::RParen, "')'");
      return EqEvidence::instance(static_cast<size_t>(idx), std::move(sigma), dir == "bwd");
    }
    if (n == "trans") {
      next();
      expect(Tok::LParen, "'('");
      EqEvidence a = evidence();
      expect(Tok::Comma, "','");
      EqEvidence b = evidence();
      expect(Tok::RParen, "')'");
      return EqEvidence::trans(std::move(a), std::move(b), ObjTerm::var("_"));
    }
    if (n == "cong") {
      next();
      expect(Tok::LParen, "'('");
      std::string fn = symbol_name();
      std::vector<EqEvidence> kids;
      while (accept(Tok::Comma)) kids.push_back(evidence());
      expect(Tok::RParen, "')'");
      return EqEvidence::cong(std::move(fn), std::move(kids));
    }
    fail("expected evidence (refl/inst/trans/cong)");
  }

  // ---- steps ----

  DerivationStep step() {
    DerivationStep st;
    st.line = peek().line;
    if (!at(Tok::Ident)) fail("expected a rule name");
    std::string rn = next().text;
    auto prem = [&]() { st.premises.push_back(integer("premise index")); };
    auto paren_term = [&]() {
      expect(Tok::LParen, "'('");
      ObjTerm t = obj_term();
      expect(Tok::RParen, "')'");
      return t;
    };
    auto paren_formula = [&]() {
      expect(Tok::LParen, "'('");
      FormulaRef f = formula();
      expect(Tok::RParen, "')'");
      return f;
    };
    auto opt_by = [&]() {
      if (at(Tok::Ident) && peek().text == "by") {
        next();
        st.evidence = evidence();
      }
    };

    if (rn == "var") {
      st.rule = Rule::Var;
      st.name = ident("hypothesis name");
      expect(Tok::Colon, "':'");
      st.formula = formula();
    } else if (rn == "arrow_i") {
      st.rule = Rule::ImpI;
      prem();
      st.name = ident("binder");
      if (accept(Tok::Colon)) st.formula = formula();
    } else if (rn == "arrow_e") {
      st.rule = Rule::ImpE;
      prem();
      prem();
    } else if (rn == "all_i") {
      st.rule = Rule::AllI;
      prem();
      st.name = ident("variable");
    } else if (rn == "all_e") {
      st.rule = Rule::AllE;
      prem();
      st.term1 = paren_term();
    } else if (rn == "all2_i") {
      st.rule = Rule::All2I;
      prem();
      st.name = ident("second-order variable");
      expect(Tok::Slash, "'/'");
      st.arity = integer("arity");
    } else if (rn == "all2_e") {
      st.rule = Rule::All2E;
      prem();
      st.pred = predicate();
    } else if (rn == "eq") {
      st.rule = Rule::Eq;
      prem();
      st.eq_var = ident("template variable");
      st.formula = paren_formula();
      st.term1 = paren_term();
      expect(Tok::Squig, "'~>'");
      st.term2 = paren_term();
      opt_by();
    } else if (rn == "eq_ax") {
      st.rule = Rule::EqAx;
      st.term1 = paren_term();
      expect(Tok::Equal, "'='");
      st.term2 = paren_term();
      opt_by();
    } else if (rn == "mu_i" || rn == "nu_e") {
      st.rule = rn == "mu_i" ? Rule::MuI : Rule::NuE;
      prem();
      st.pred = predicate();
      st.args = bracket_terms();
    } else if (rn == "mu_e" || rn == "nu_i" || rn == "mu_it" || rn == "nu_coit") {
      st.rule = rn == "mu_e" ? Rule::MuE
                : rn == "nu_i" ? Rule::NuI
                : rn == "mu_it" ? Rule::MuIt
                                : Rule::NuCoIt;
      prem();
      prem();
      st.pred = predicate();
      st.motive = predicate();
      st.funs = bracket_contexts();
      st.args = bracket_terms();
    } else if (rn == "and_i") {
      st.rule = Rule::AndI;
      prem();
      prem();
    } else if (rn == "and_e_l" || rn == "and_e_r") {
      st.rule = rn == "and_e_l" ? Rule::AndEL : Rule::AndER;
      prem();
    } else if (rn == "or_i_l" || rn == "or_i_r") {
      st.rule = rn == "or_i_l" ? Rule::OrIL : Rule::OrIR;
      prem();
      st.formula = paren_formula();
    } else if (rn == "or_e") {
      st.rule = Rule::OrE;
      prem();
      st.name = ident("left binder");
      prem();
      st.name2 = ident("right binder");
      prem();
    } else if (rn == "ex_i") {
      st.rule = Rule::ExI;
      prem();
      st.formula = paren_formula();
      if (at(Tok::Ident) && peek().text == "witness") next();
      st.term1 = paren_term();
    } else if (rn == "ex_e") {
      st.rule = Rule::ExE;
      prem();
      prem();
      st.name = ident("hypothesis binder");
      if (at(Tok::Ident) && !kKeywords.count(peek().text)) st.name2 = ident("variable");
    } else if (rn == "restrict_i") {
      st.rule = Rule::RestrI;
      prem();
      st.term1 = paren_term();
      expect(Tok::Equal, "'='");
      st.term2 = paren_term();
      opt_by();
    } else if (rn == "restrict_e") {
      st.rule = Rule::RestrE;
      prem();
    } else if (rn == "lemma") {
      st.rule = Rule::Lemma;
      st.name = ident("lemma name");
    } else {
      fail("unknown rule '" + rn + "'");
    }
    return st;
  }

  std::vector<ObjTerm> bracket_terms() {
    expect(Tok::LBrack, "'['");
    std::vector<ObjTerm> out;
    if (!at(Tok::RBrack)) {
      out.push_back(obj_term());
      while (accept(Tok::Comma)) out.push_back(obj_term());
    }
    expect(Tok::RBrack, "']'");
    return out;
  }

  std::vector<TermContext> bracket_contexts() {
    expect(Tok::LBrack, "'['");
    std::vector<TermContext> out;
    auto one = [&]() {
      expect(Tok::LParen, "'('");
      TermContext c;
      c.hole = ident("hole variable");
      expect(Tok::FatArrow, "'=>'");
      c.body = obj_term();
      expect(Tok::RParen, "')'");
      out.push_back(std::move(c));
    };
    if (!at(Tok::RBrack)) {
      one();
      while (accept(Tok::Comma)) one();
    }
    expect(Tok::RBrack, "']'");
    return out;
  }

  // ---- top-level items ----

  void check_name_free(const std::string& n, int line, int col) {
    if (sig.functions.count(n) || sig.predicate_symbols.count(n) || lets.count(n))
      throw ParseFail{line, col, "name '" + n + "' already declared"};
  }

  void item_sig() {
    do {
      Token t = peek();
      std::string n = symbol_name();
      expect(Tok::Slash, "'/'");
      int arity = integer("arity");
      check_name_free(n, t.line, t.col);
      sig.functions[n] = arity;
    } while (accept(Tok::Comma));
    expect(Tok::Semi, "';'");
  }

  void item_pred() {
    do {
      Token t = peek();
      std::string n = ident("predicate symbol");
      expect(Tok::Slash, "'/'");
      int arity = integer("arity");
      check_name_free(n, t.line, t.col);
      sig.predicate_symbols[n] = arity;
    } while (accept(Tok::Comma));
    expect(Tok::Semi, "';'");
  }

  void item_let() {
    Token t = peek();
    std::string n = ident("name");
    check_name_free(n, t.line, t.col);
    expect(Tok::Assign, "':='");
    PredicateRef p = beta_normalize(predicate());
    expect(Tok::Semi, "';'");
    if (auto err = check_predicate_wf(sig, p)) throw ParseFail{t.line, t.col, *err};
    lets[n] = p;
  }

  void item_mu(bool is_mu) {
    Token t = peek();
    std::string n = ident("name");
    check_name_free(n, t.line, t.col);
    expect(Tok::Slash, "'/'");
    int arity = integer("arity");
    expect(Tok::Assign, "':='");
    std::string xv = ident("transformer variable");
    expect(Tok::FatArrow, "'=>'");
    auto saved = bound_pred;
    bound_pred[xv] = arity;
    PredicateRef body = beta_normalize(predicate());
    bound_pred = saved;
    if (!at(Tok::Ident) || peek().text != (is_mu ? "ctors" : "dtors"))
      fail(is_mu ? "expected 'ctors'" : "expected 'dtors'");
    next();
    expect(Tok::LBrack, "'['");
    std::vector<std::string> syms;
    if (!at(Tok::RBrack)) {
      syms.push_back(symbol_name());
      while (accept(Tok::Comma)) syms.push_back(symbol_name());
    }
    expect(Tok::RBrack, "']'");
    expect(Tok::Semi, "';'");
    auto op = std::make_shared<Transformer>();
    op->var = xv;
    op->arity = arity;
    op->body = body;
    PredicateRef p = is_mu ? Predicate::mu(op, syms) : Predicate::nu(op, syms);
    if (auto err = check_predicate_wf(sig, p)) throw ParseFail{t.line, t.col, *err};
    lets[n] = p;
    sig.inductives[n] = p;
  }

  void item_eqs() {
    Token t = peek();
    std::string n = ident("equation set name");
    expect(Tok::LBrace, "'{'");
    EquationSet eqs;
    while (!at(Tok::RBrace)) {
      ObjTerm l = obj_term();
      expect(Tok::Equal, "'='");
      ObjTerm r = obj_term();
      expect(Tok::Semi, "';'");
      if (auto err = check_term_wf(sig, l)) throw ParseFail{t.line, t.col, *err};
      if (auto err = check_term_wf(sig, r)) throw ParseFail{t.line, t.col, *err};
      eqs.push_back({std::move(l), std::move(r)});
    }
    next();  // }
    for (const auto& [en, _] : file->eqsets)
      if (en == n) throw ParseFail{t.line, t.col, "equation set '" + n + "' already declared"};
    file->eqsets.emplace_back(n, std::move(eqs));
  }

  void item_thm() {
    ThmDecl thm;
    thm.line = peek().line;
    thm.name = ident("theorem name");
    for (const auto& other : file->thms)
      if (other.name == thm.name)
        throw ParseFail{peek().line, peek().col,
                        "theorem '" + thm.name + "' already declared"};
    if (at(Tok::Ident) && peek().text == "hyps") {
      next();
      expect(Tok::LBrack, "'['");
      do {
        std::string hn = ident("hypothesis name");
        expect(Tok::Colon, "':'");
        expect(Tok::LParen, "'('");
        FormulaRef hf = formula();
        expect(Tok::RParen, "')'");
        thm.script.hyps.emplace_back(hn, hf);
      } while (accept(Tok::Comma));
      expect(Tok::RBrack, "']'");
    }
    if (at(Tok::Ident) && peek().text == "uses") {
      next();
      expect(Tok::LBrack, "'['");
      if (!at(Tok::RBrack)) {
        do {
          std::string en = ident("equation set name");
          const EquationSet* es = file->find_eqset(en);
          if (!es) fail("unknown equation set '" + en + "'");
          thm.uses.push_back(en);
          for (const auto& e : *es) thm.script.eqs.push_back(e);
        } while (accept(Tok::Comma));
      }
      expect(Tok::RBrack, "']'");
    }
    expect(Tok::Colon, "':'");
    thm.script.goal = formula();
    thm.script.name = thm.name;
    expect(Tok::LBrace, "'{'");
    int expected_index = 1;
    while (!at(Tok::RBrace)) {
      int idx = integer("step number");
      if (idx != expected_index)
        fail("step numbered " + std::to_string(idx) + ", expected " +
             std::to_string(expected_index));
      expect(Tok::Dot, "'.'");
      thm.script.steps.push_back(step());
      expect(Tok::Semi, "';'");
      ++expected_index;
    }
    next();  // }
    file->thms.push_back(std::move(thm));
  }

  void item_term() {
    TermDecl td;
    td.line = peek().line;
    td.name = ident("term name");
    expect(Tok::Assign, "':='");
    td.term = proof_term();
    expect(Tok::Semi, "';'");
    file->terms.push_back(std::move(td));
  }

  void item_expect() {
    ExpectDecl ed;
    ed.line = peek().line;
    expect(Tok::LParen, "'('");
    ed.lhs = proof_term();
    expect(Tok::RParen, "')'");
    expect(Tok::SquigStar, "'~>*'");
    expect(Tok::LParen, "'('");
    ed.rhs = proof_term();
    expect(Tok::RParen, "')'");
    if (at(Tok::Ident) && peek().text == "fuel") {
      next();
      ed.fuel = integer("fuel");
    }
    expect(Tok::Semi, "';'");
    file->expects.push_back(std::move(ed));
  }

  // skip to the next plausible top-level item after an error
  void synchronize() {
    static const std::set<std::string> starters = {"sig", "pred", "let", "mu",
                                                   "nu",  "eqs",  "thm", "term",
                                                   "expect"};
    int depth = 0;
    while (!at(Tok::End)) {
      if (at(Tok::LBrace)) ++depth;
      if (at(Tok::RBrace) && depth > 0) --depth;
      if (depth == 0 && at(Tok::Ident) && starters.count(peek().text)) return;
      ++pos;
    }
  }

  void run() {
    while (!at(Tok::End)) {
      Token t = peek();
      try {
        if (t.kind != Tok::Ident) fail("expected a top-level item");
        if (t.text == "sig") { next(); item_sig(); }
        else if (t.text == "pred") { next(); item_pred(); }
        else if (t.text == "let") { next(); item_let(); }
        else if (t.text == "mu") { next(); item_mu(true); }
        else if (t.text == "nu") { next(); item_mu(false); }
        else if (t.text == "eqs") { next(); item_eqs(); }
        else if (t.text == "thm") { next(); item_thm(); }
        else if (t.text == "term") { next(); item_term(); }
        else if (t.text == "expect") { next(); item_expect(); }
        else fail("unknown top-level item '" + t.text + "'");
      } catch (const ParseFail& e) {
        file->diagnostics.push_back({file->filename, e.line, e.col, e.message});
        if (pos < toks.size() && toks[pos].kind != Tok::End &&
            toks[pos].line == t.line && toks[pos].col == t.col)
          ++pos;  // guarantee progress
        synchronize();
      }
    }
  }
};

}  // namespace

SourceFile parse_source(const std::string& text, const std::string& filename) {
  SourceFile file;
  file.filename = filename;
  std::vector<LexError> lex_errors;
  Parser p;
  p.toks = lex(text, lex_errors);
  for (const auto& e : lex_errors)
    file.diagnostics.push_back({filename, e.line, e.col, e.message});
  p.file = &file;
  p.run();
  auto sig = std::make_shared<Signature>(std::move(p.sig));
  file.sig = sig;
  for (auto& [n, pr] : p.lets) file.lets[n] = pr;
  for (auto& thm : file.thms) {
    thm.script.sig = sig;
    // validate the declared payloads against the final signature
    if (thm.script.goal)
      if (auto err = check_formula_wf(*sig, thm.script.goal))
        file.diagnostics.push_back({filename, thm.line, 1,
                                    "in goal of '" + thm.name + "': " + *err});
    for (auto& [hn, hf] : thm.script.hyps)
      if (auto err = check_formula_wf(*sig, hf))
        file.diagnostics.push_back({filename, thm.line, 1,
                                    "in hypothesis '" + hn + "': " + *err});
  }
  return file;
}

// ---------------------------------------------------------------------------
// Printer (round-trips through parse_source up to alpha)
// ---------------------------------------------------------------------------

namespace {

std::string print_context(const TermContext& c) {
  return "(" + c.hole + " => " + show_term(c.body) + ")";
}

std::string print_evidence_surface(const EqEvidence& ev) {
  switch (ev.kind) {
    case EqEvidence::Kind::Refl:
      return "refl(" + show_term(ev.term) + ")";
    case EqEvidence::Kind::Instance: {
      std::string s = "inst(" + std::to_string(ev.index) + ", " +
                      (ev.backward ? "bwd" : "fwd");
      for (const auto& [k, v] : ev.sigma) s += ", " + k + " := " + show_term(v);
      return s + ")";
    }
    case EqEvidence::Kind::Trans:
      return "trans(" + print_evidence_surface(ev.children[0]) + ", " +
             print_evidence_surface(ev.children[1]) + ")";
    case EqEvidence::Kind::Cong: {
      std::string s = "cong(" + ev.fn;
      for (const auto& c : ev.children) s += ", " + print_evidence_surface(c);
      return s + ")";
    }
  }
  return "?";
}

std::string print_step(const DerivationStep& st, const Signature* sig) {
  std::ostringstream os;
  os << rule_name(st.rule);
  auto prem = [&](size_t i) { os << " " << st.premises[i]; };
  auto by = [&]() {
    if (st.evidence) os << " by " << print_evidence_surface(*st.evidence);
  };
  switch (st.rule) {
    case Rule::Var:
      os << " " << st.name << " : " << show_formula(st.formula, sig);
      break;
    case Rule::ImpI:
      prem(0);
      os << " " << st.name;
      if (st.formula) os << " : " << show_formula(st.formula, sig);
      break;
    case Rule::ImpE:
    case Rule::AndI:
      prem(0);
      prem(1);
      break;
    case Rule::AllI:
      prem(0);
      os << " " << st.name;
      break;
    case Rule::AllE:
      prem(0);
      os << " (" << show_term(*st.term1) << ")";
      break;
    case Rule::All2I:
      prem(0);
      os << " " << st.name << "/" << st.arity;
      break;
    case Rule::All2E:
      prem(0);
      os << " " << show_predicate(st.pred, sig);
      break;
    case Rule::Eq:
      prem(0);
      os << " " << st.eq_var << " (" << show_formula(st.formula, sig) << ") ("
         << show_term(*st.term1) << ") ~> (" << show_term(*st.term2) << ")";
      by();
      break;
    case Rule::EqAx:
      os << " (" << show_term(*st.term1) << ") = (" << show_term(*st.term2) << ")";
      by();
      break;
    case Rule::MuI:
    case Rule::NuE: {
      prem(0);
      os << " " << show_predicate(st.pred, sig) << " [";
      for (size_t i = 0; i < st.args.size(); ++i)
        os << (i ? ", " : "") << show_term(st.args[i]);
      os << "]";
      break;
    }
    case Rule::MuE:
    case Rule::NuI:
    case Rule::MuIt:
    case Rule::NuCoIt: {
      prem(0);
      prem(1);
      os << " " << show_predicate(st.pred, sig) << " " << show_predicate(st.motive, sig)
         << " [";
      for (size_t i = 0; i < st.funs.size(); ++i)
        os << (i ? ", " : "") << print_context(st.funs[i]);
      os << "] [";
      for (size_t i = 0; i < st.args.size(); ++i)
        os << (i ? ", " : "") << show_term(st.args[i]);
      os << "]";
      break;
    }
    case Rule::AndEL:
    case Rule::AndER:
    case Rule::RestrE:
      prem(0);
      break;
    case Rule::OrIL:
    case Rule::OrIR:
      prem(0);
      os << " (" << show_formula(st.formula, sig) << ")";
      break;
    case Rule::OrE:
      prem(0);
      os << " " << st.name;
      prem(1);
      os << " " << st.name2;
      prem(2);
      break;
    case Rule::ExI:
      prem(0);
      os << " (" << show_formula(st.formula, sig) << ") witness ("
         << show_term(*st.term1) << ")";
      break;
    case Rule::ExE:
      prem(0);
      prem(1);
      os << " " << st.name;
      if (!st.name2.empty()) os << " " << st.name2;
      break;
    case Rule::RestrI:
      prem(0);
      os << " (" << show_term(*st.term1) << ") = (" << show_term(*st.term2) << ")";
      by();
      break;
    case Rule::Lemma:
      os << " " << st.name;
      break;
  }
  return os.str();
}

}  // namespace

std::string print_source(const SourceFile& f) {
  std::ostringstream os;
  const Signature* sig = f.sig.get();
  if (sig) {
    for (const auto& [n, a] : sig->functions) os << "sig " << n << "/" << a << ";\n";
    for (const auto& [n, a] : sig->predicate_symbols)
      os << "pred " << n << "/" << a << ";\n";
    // print declarations with their dependencies first: a mu/nu nested inside
    // another body prints by name, so its declaration must precede
    std::vector<std::pair<std::string, PredicateRef>> pending(f.lets.begin(),
                                                              f.lets.end());
    std::set<std::string> printed;
    while (!pending.empty()) {
      bool progress = false;
      for (auto it = pending.begin(); it != pending.end();) {
        const auto& [n, p] = *it;
        PredicateRef body = p->kind == PredKind::Mu || p->kind == PredKind::Nu
                                ? p->op->body
                                : p;
        std::string self = n;
        std::string rendered = show_predicate(body, sig);
        bool ready = true;
        for (const auto& [qn, q] : sig->inductives)
          if (qn != self && !printed.count(qn) &&
              rendered.find(qn) != std::string::npos)
            ready = false;
        if (!ready) {
          ++it;
          continue;
        }
        if (p->kind == PredKind::Mu || p->kind == PredKind::Nu) {
          os << (p->kind == PredKind::Mu ? "mu " : "nu ") << n << "/" << p->arity
             << " := " << p->op->var << " => " << show_predicate(p->op->body, sig)
             << (p->kind == PredKind::Mu ? " ctors [" : " dtors [");
          for (size_t i = 0; i < p->symbols.size(); ++i)
            os << (i ? ", " : "") << p->symbols[i];
          os << "];\n";
        } else {
          os << "let " << n << " := " << show_predicate(p, sig) << ";\n";
        }
        printed.insert(n);
        it = pending.erase(it);
        progress = true;
      }
      if (!progress) {
        // fall back to structural printing to guarantee termination
        for (const auto& [n, p] : pending) {
          if (p->kind == PredKind::Mu || p->kind == PredKind::Nu) {
            os << (p->kind == PredKind::Mu ? "mu " : "nu ") << n << "/" << p->arity
               << " := " << p->op->var << " => "
               << show_predicate(p->op->body, nullptr)
               << (p->kind == PredKind::Mu ? " ctors [" : " dtors [");
            for (size_t i = 0; i < p->symbols.size(); ++i)
              os << (i ? ", " : "") << p->symbols[i];
            os << "];\n";
          } else {
            os << "let " << n << " := " << show_predicate(p, nullptr) << ";\n";
          }
        }
        pending.clear();
      }
    }
  }
  for (const auto& [n, eqs] : f.eqsets) {
    os << "eqs " << n << " {\n";
    for (const auto& e : eqs) os << "  " << show_equation(e) << ";\n";
    os << "}\n";
  }
  for (const auto& thm : f.thms) {
    os << "thm " << thm.name;
    if (!thm.script.hyps.empty()) {
      os << " hyps [";
      for (size_t i = 0; i < thm.script.hyps.size(); ++i)
        os << (i ? ", " : "") << thm.script.hyps[i].first << " : ("
           << show_formula(thm.script.hyps[i].second, sig) << ")";
      os << "]";
    }
    if (!thm.uses.empty()) {
      os << " uses [";
      for (size_t i = 0; i < thm.uses.size(); ++i) os << (i ? ", " : "") << thm.uses[i];
      os << "]";
    }
    os << " : " << show_formula(thm.script.goal, sig) << " {\n";
    for (size_t i = 0; i < thm.script.steps.size(); ++i)
      os << "  " << (i + 1) << ". " << print_step(thm.script.steps[i], sig) << ";\n";
    os << "}\n";
  }
  for (const auto& td : f.terms)
    os << "term " << td.name << " := " << show_proof_term(td.term) << ";\n";
  for (const auto& ed : f.expects) {
    os << "expect (" << show_proof_term(ed.lhs) << ") ~>* (" << show_proof_term(ed.rhs)
       << ")";
    if (ed.fuel > 0) os << " fuel " << ed.fuel;
    os << ";\n";
  }
  return os.str();
}

}  // namespace af2m
