#include "af2m/proofterm.hpp"

#include <map>
#include <sstream>

#include "af2m/syntax.hpp"  // fresh_name

namespace af2m {

namespace {
TermRef node(TermKind k, TermRef a = nullptr, TermRef b = nullptr, TermRef c = nullptr,
             std::string n = "", std::string n2 = "", std::string n3 = "") {
  auto t = std::make_shared<ProofTerm>();
  t->kind = k;
  t->a = std::move(a);
  t->b = std::move(b);
  t->c = std::move(c);
  t->name = std::move(n);
  t->name2 = std::move(n2);
  t->name3 = std::move(n3);
  return t;
}
}  // namespace

TermRef ProofTerm::var(const std::string& x) { return node(TermKind::Var, nullptr, nullptr, nullptr, x); }
TermRef ProofTerm::lam(const std::string& x, TermRef body) {
  return node(TermKind::Lam, std::move(body), nullptr, nullptr, x);
}
TermRef ProofTerm::app(TermRef f, TermRef arg) { return node(TermKind::App, std::move(f), std::move(arg)); }
TermRef ProofTerm::in(TermRef t) { return node(TermKind::In, std::move(t)); }
TermRef ProofTerm::out(TermRef t) { return node(TermKind::Out, std::move(t)); }
TermRef ProofTerm::mrec(TermRef s, TermRef r) { return node(TermKind::MRec, std::move(s), std::move(r)); }
TermRef ProofTerm::mcorec(TermRef s, TermRef r) { return node(TermKind::MCoRec, std::move(s), std::move(r)); }
TermRef ProofTerm::mit(TermRef s, TermRef r) { return node(TermKind::MIt, std::move(s), std::move(r)); }
TermRef ProofTerm::mcoit(TermRef s, TermRef r) { return node(TermKind::MCoIt, std::move(s), std::move(r)); }
TermRef ProofTerm::pair(TermRef x, TermRef y) { return node(TermKind::Pair, std::move(x), std::move(y)); }
TermRef ProofTerm::fst(TermRef t) { return node(TermKind::Fst, std::move(t)); }
TermRef ProofTerm::snd(TermRef t) { return node(TermKind::Snd, std::move(t)); }
TermRef ProofTerm::inl(TermRef t) { return node(TermKind::Inl, std::move(t)); }
TermRef ProofTerm::inr(TermRef t) { return node(TermKind::Inr, std::move(t)); }
TermRef ProofTerm::case_of(TermRef scrut, const std::string& x, TermRef l,
                           const std::string& y, TermRef r) {
  return node(TermKind::Case, std::move(scrut), std::move(l), std::move(r), "", x, y);
}
TermRef ProofTerm::pack(TermRef t) { return node(TermKind::Pack, std::move(t)); }
TermRef ProofTerm::open_of(TermRef scrut, const std::string& u, TermRef body) {
  return node(TermKind::Open, std::move(scrut), std::move(body), nullptr, "", u);
}
TermRef ProofTerm::unit() { return node(TermKind::Unit); }

TermRef ProofTerm::partial(TermKind recursor, TermRef s) {
  std::set<std::string> avoid = term_free_vars(s);
  std::string x = fresh_name("r", avoid);
  TermRef body;
  switch (recursor) {
    case TermKind::MRec: body = mrec(s, var(x)); break;
    case TermKind::MCoRec: body = mcorec(s, var(x)); break;
    case TermKind::MIt: body = mit(s, var(x)); break;
    case TermKind::MCoIt: body = mcoit(s, var(x)); break;
    default: throw std::invalid_argument("partial: not a recursor kind");
  }
  return lam(x, body);
}

std::vector<TermRef> children(const TermRef& t) {
  std::vector<TermRef> out;
  if (t->a) out.push_back(t->a);
  if (t->b) out.push_back(t->b);
  if (t->c) out.push_back(t->c);
  return out;
}

namespace {

void fv(const TermRef& t, std::set<std::string>& bound, std::set<std::string>& out) {
  switch (t->kind) {
    case TermKind::Var:
      if (!bound.count(t->name)) out.insert(t->name);
      return;
    case TermKind::Lam: {
      bool added = bound.insert(t->name).second;
      fv(t->a, bound, out);
      if (added) bound.erase(t->name);
      return;
    }
    case TermKind::Case: {
      fv(t->a, bound, out);
      bool addl = bound.insert(t->name2).second;
      fv(t->b, bound, out);
      if (addl) bound.erase(t->name2);
      bool addr = bound.insert(t->name3).second;
      fv(t->c, bound, out);
      if (addr) bound.erase(t->name3);
      return;
    }
    case TermKind::Open: {
      fv(t->a, bound, out);
      bool added = bound.insert(t->name2).second;
      fv(t->b, bound, out);
      if (added) bound.erase(t->name2);
      return;
    }
    default:
      for (const auto& c : children(t)) fv(c, bound, out);
      return;
  }
}

}  // namespace

std::set<std::string> term_free_vars(const TermRef& t) {
  std::set<std::string> bound, out;
  fv(t, bound, out);
  return out;
}

namespace {

TermRef subst(const TermRef& t, const std::string& x, const TermRef& s,
              const std::set<std::string>& s_fv) {
  switch (t->kind) {
    case TermKind::Var:
      return t->name == x ? s : t;
    case TermKind::Lam: {
      if (t->name == x) return t;
      std::string b = t->name;
      TermRef body = t->a;
      if (s_fv.count(b)) {
        std::set<std::string> avoid = s_fv;
        avoid.insert(x);
        for (const auto& v : term_free_vars(body)) avoid.insert(v);
        std::string b2 = fresh_name(b, avoid);
        body = term_subst(body, b, ProofTerm::var(b2));
        b = b2;
      }
      return ProofTerm::lam(b, subst(body, x, s, s_fv));
    }
    case TermKind::Case: {
      TermRef scrut = subst(t->a, x, s, s_fv);
      auto branch = [&](std::string bn, TermRef body) -> std::pair<std::string, TermRef> {
        if (bn == x) return {bn, body};
        if (s_fv.count(bn)) {
          std::set<std::string> avoid = s_fv;
          avoid.insert(x);
          for (const auto& v : term_free_vars(body)) avoid.insert(v);
          std::string b2 = fresh_name(bn, avoid);
          body = term_subst(body, bn, ProofTerm::var(b2));
          bn = b2;
        }
        return {bn, subst(body, x, s, s_fv)};
      };
      auto [ln, lb] = branch(t->name2, t->b);
      auto [rn, rb] = branch(t->name3, t->c);
      return ProofTerm::case_of(scrut, ln, lb, rn, rb);
    }
    case TermKind::Open: {
      TermRef scrut = subst(t->a, x, s, s_fv);
      std::string bn = t->name2;
      TermRef body = t->b;
      if (bn != x) {
        if (s_fv.count(bn)) {
          std::set<std::string> avoid = s_fv;
          avoid.insert(x);
          for (const auto& v : term_free_vars(body)) avoid.insert(v);
          std::string b2 = fresh_name(bn, avoid);
          body = term_subst(body, bn, ProofTerm::var(b2));
          bn = b2;
        }
        body = subst(body, x, s, s_fv);
      }
      return ProofTerm::open_of(scrut, bn, body);
    }
    default: {
      auto go = [&](const TermRef& c) { return c ? subst(c, x, s, s_fv) : c; };
      auto out = std::make_shared<ProofTerm>(*t);
      out->a = go(t->a);
      out->b = go(t->b);
      out->c = go(t->c);
      return out;
    }
  }
}

}  // namespace

TermRef term_subst(const TermRef& t, const std::string& x, const TermRef& s) {
  return subst(t, x, s, term_free_vars(s));
}

namespace {

bool aeq(const TermRef& a, const TermRef& b,
         std::vector<std::pair<std::string, std::string>>& env) {
  if (a->kind != b->kind) return false;
  auto var_eq = [&](const std::string& x, const std::string& y) {
    for (auto it = env.rbegin(); it != env.rend(); ++it) {
      bool lx = it->first == x, ly = it->second == y;
      if (lx || ly) return lx && ly;
    }
    return x == y;
  };
  switch (a->kind) {
    case TermKind::Var:
      return var_eq(a->name, b->name);
    case TermKind::Unit:
      return true;
    case TermKind::Lam: {
      env.emplace_back(a->name, b->name);
      bool ok = aeq(a->a, b->a, env);
      env.pop_back();
      return ok;
    }
    case TermKind::Case: {
      if (!aeq(a->a, b->a, env)) return false;
      env.emplace_back(a->name2, b->name2);
      bool okl = aeq(a->b, b->b, env);
      env.pop_back();
      if (!okl) return false;
      env.emplace_back(a->name3, b->name3);
      bool okr = aeq(a->c, b->c, env);
      env.pop_back();
      return okr;
    }
    case TermKind::Open: {
      if (!aeq(a->a, b->a, env)) return false;
      env.emplace_back(a->name2, b->name2);
      bool ok = aeq(a->b, b->b, env);
      env.pop_back();
      return ok;
    }
    default: {
      auto ca = children(a), cb = children(b);
      if (ca.size() != cb.size()) return false;
      for (size_t i = 0; i < ca.size(); ++i)
        if (!aeq(ca[i], cb[i], env)) return false;
      return true;
    }
  }
}

void canonical(const TermRef& t, std::vector<std::string>& env, std::string& out) {
  auto index_of = [&](const std::string& x) -> long {
    for (size_t i = env.size(); i-- > 0;)
      if (env[i] == x) return static_cast<long>(env.size() - 1 - i);
    return -1;
  };
  switch (t->kind) {
    case TermKind::Var: {
      long i = index_of(t->name);
      if (i >= 0)
        out += "#" + std::to_string(i);
      else
        out += "$" + t->name;
      return;
    }
    case TermKind::Unit:
      out += "u";
      return;
    case TermKind::Lam:
      out += "L.";
      env.push_back(t->name);
      canonical(t->a, env, out);
      env.pop_back();
      return;
    case TermKind::Case:
      out += "C(";
      canonical(t->a, env, out);
      out += ";";
      env.push_back(t->name2);
      canonical(t->b, env, out);
      env.pop_back();
      out += ";";
      env.push_back(t->name3);
      canonical(t->c, env, out);
      env.pop_back();
      out += ")";
      return;
    case TermKind::Open:
      out += "O(";
      canonical(t->a, env, out);
      out += ";";
      env.push_back(t->name2);
      canonical(t->b, env, out);
      env.pop_back();
      out += ")";
      return;
    default: {
      static const std::map<TermKind, const char*> tags = {
          {TermKind::App, "A"},  {TermKind::In, "I"},     {TermKind::Out, "E"},
          {TermKind::MRec, "R"}, {TermKind::MCoRec, "K"}, {TermKind::MIt, "T"},
          {TermKind::MCoIt, "J"}, {TermKind::Pair, "P"},  {TermKind::Fst, "F"},
          {TermKind::Snd, "S"},  {TermKind::Inl, "l"},    {TermKind::Inr, "r"},
          {TermKind::Pack, "p"}};
      out += tags.at(t->kind);
      out += "(";
      bool first = true;
      for (const auto& ch : children(t)) {
        if (!first) out += ";";
        first = false;
        canonical(ch, env, out);
      }
      out += ")";
      return;
    }
  }
}

}  // namespace

bool term_alpha_eq(const TermRef& a, const TermRef& b) {
  if (!a || !b) return a == b;
  std::vector<std::pair<std::string, std::string>> env;
  return aeq(a, b, env);
}

std::string term_canonical(const TermRef& t) {
  std::string out;
  std::vector<std::string> env;
  canonical(t, env, out);
  return out;
}

size_t term_size(const TermRef& t) {
  size_t n = 1;
  for (const auto& c : children(t)) n += term_size(c);
  return n;
}

namespace {

// precedence: 0 = lambda body, 1 = application, 2 = atom
std::string show(const TermRef& t, int prec) {
  auto wrap = [&](int lvl, std::string s) {
    return prec > lvl ? "(" + std::move(s) + ")" : std::move(s);
  };
  switch (t->kind) {
    case TermKind::Var:
      return t->name;
    case TermKind::Unit:
      return "unit";
    case TermKind::Lam: {
      std::string s = "\\" + t->name;
      TermRef body = t->a;
      while (body->kind == TermKind::Lam) {
        s += " " + body->name;
        body = body->a;
      }
      return wrap(0, s + ". " + show(body, 0));
    }
    case TermKind::App:
      return wrap(1, show(t->a, 1) + " " + show(t->b, 2));
    case TermKind::In:
      return wrap(1, "in " + show(t->a, 2));
    case TermKind::Out:
      return wrap(1, "out " + show(t->a, 2));
    case TermKind::MRec:
      return wrap(1, "mrec " + show(t->a, 2) + " " + show(t->b, 2));
    case TermKind::MCoRec:
      return wrap(1, "mcorec " + show(t->a, 2) + " " + show(t->b, 2));
    case TermKind::MIt:
      return wrap(1, "mit " + show(t->a, 2) + " " + show(t->b, 2));
    case TermKind::MCoIt:
      return wrap(1, "mcoit " + show(t->a, 2) + " " + show(t->b, 2));
    case TermKind::Pair:
      return "<" + show(t->a, 0) + ", " + show(t->b, 0) + ">";
    case TermKind::Fst:
      return wrap(1, "fst " + show(t->a, 2));
    case TermKind::Snd:
      return wrap(1, "snd " + show(t->a, 2));
    case TermKind::Inl:
      return wrap(1, "inl " + show(t->a, 2));
    case TermKind::Inr:
      return wrap(1, "inr " + show(t->a, 2));
    case TermKind::Case:
      return "case(" + show(t->a, 0) + ", " + t->name2 + ". " + show(t->b, 0) +
             ", " + t->name3 + ". " + show(t->c, 0) + ")";
    case TermKind::Pack:
      return wrap(1, "pack " + show(t->a, 2));
    case TermKind::Open:
      return "open(" + show(t->a, 0) + ", " + t->name2 + ". " + show(t->b, 0) + ")";
  }
  return "?";
}

}  // namespace

std::string show_proof_term(const TermRef& t) {
  if (!t) return "<null>";
  return show(t, 0);
}

}  // namespace af2m
