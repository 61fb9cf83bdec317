#include "af2m/equational.hpp"

#include <algorithm>

#include "json.hpp"

namespace af2m {

EqEvidence EqEvidence::refl(ObjTerm t) {
  EqEvidence e;
  e.kind = Kind::Refl;
  e.term = std::move(t);
  return e;
}

EqEvidence EqEvidence::instance(size_t index, ObjSubst sigma, bool backward) {
  EqEvidence e;
  e.kind = Kind::Instance;
  e.index = index;
  e.sigma = std::move(sigma);
  e.backward = backward;
  return e;
}

EqEvidence EqEvidence::trans(EqEvidence a, EqEvidence b, ObjTerm mid) {
  EqEvidence e;
  e.kind = Kind::Trans;
  e.children.push_back(std::move(a));
  e.children.push_back(std::move(b));
  e.mid = std::move(mid);
  return e;
}

EqEvidence EqEvidence::cong(std::string fn, std::vector<EqEvidence> children) {
  EqEvidence e;
  e.kind = Kind::Cong;
  e.fn = std::move(fn);
  e.children = std::move(children);
  return e;
}

bool match_term(const ObjTerm& pattern, const ObjTerm& target, ObjSubst& sigma) {
  if (pattern.is_var) {
    auto it = sigma.find(pattern.head);
    if (it != sigma.end()) return it->second == target;
    sigma[pattern.head] = target;
    return true;
  }
  if (target.is_var || pattern.head != target.head ||
      pattern.args.size() != target.args.size())
    return false;
  for (size_t i = 0; i < pattern.args.size(); ++i)
    if (!match_term(pattern.args[i], target.args[i], sigma)) return false;
  return true;
}

std::optional<InstanceMatch> match_instance(const Equation& eq, const ObjTerm& r,
                                            const ObjTerm& s) {
  {
    ObjSubst sigma;
    if (match_term(eq.lhs, r, sigma) && match_term(eq.rhs, s, sigma))
      return InstanceMatch{std::move(sigma), false};
  }
  {
    ObjSubst sigma;
    if (match_term(eq.rhs, r, sigma) && match_term(eq.lhs, s, sigma))
      return InstanceMatch{std::move(sigma), true};
  }
  return std::nullopt;
}

namespace {

// Finds the leftmost-outermost redex: preorder, root before arguments,
// arguments left to right. First equation (in set order) wins at a position.
bool find_redex(const EquationSet& eqs, const ObjTerm& t, std::vector<int>& pos,
                size_t& eq_index, ObjSubst& sigma) {
  for (size_t i = 0; i < eqs.size(); ++i) {
    ObjSubst try_sigma;
    if (match_term(eqs[i].lhs, t, try_sigma)) {
      eq_index = i;
      sigma = std::move(try_sigma);
      return true;
    }
  }
  if (!t.is_var) {
    for (size_t i = 0; i < t.args.size(); ++i) {
      pos.push_back(static_cast<int>(i));
      if (find_redex(eqs, t.args[i], pos, eq_index, sigma)) return true;
      pos.pop_back();
    }
  }
  return false;
}

ObjTerm replace_at(const ObjTerm& t, const std::vector<int>& pos, size_t depth,
                   const ObjTerm& repl) {
  if (depth == pos.size()) return repl;
  ObjTerm out = t;
  out.args[pos[depth]] = replace_at(t.args[pos[depth]], pos, depth + 1, repl);
  return out;
}

const ObjTerm& subterm_at(const ObjTerm& t, const std::vector<int>& pos, size_t depth) {
  if (depth == pos.size()) return t;
  return subterm_at(t.args[pos[depth]], pos, depth + 1);
}

// Evidence for a single rewrite at `pos`: Cong wrappers down to the position,
// an Instance at the spot, Refl for untouched siblings.
EqEvidence step_evidence(const ObjTerm& before, const std::vector<int>& pos,
                         size_t depth, size_t eq_index, const ObjSubst& sigma,
                         bool backward) {
  if (depth == pos.size()) return EqEvidence::instance(eq_index, sigma, backward);
  std::vector<EqEvidence> kids;
  kids.reserve(before.args.size());
  for (size_t i = 0; i < before.args.size(); ++i) {
    if (static_cast<int>(i) == pos[depth])
      kids.push_back(step_evidence(before.args[i], pos, depth + 1, eq_index, sigma, backward));
    else
      kids.push_back(EqEvidence::refl(before.args[i]));
  }
  return EqEvidence::cong(before.head, std::move(kids));
}

// Chains the per-step evidences of a rewrite trace start -> ... -> nf,
// proving start = nf.
std::optional<EqEvidence> chain_forward(const ObjTerm& start,
                                        const std::vector<RewriteTraceEntry>& trace) {
  std::optional<EqEvidence> acc;
  ObjTerm cur = start;
  for (const auto& entry : trace) {
    EqEvidence step = step_evidence(cur, entry.pos, 0, entry.eq_index, entry.sigma, false);
    if (!acc)
      acc = std::move(step);
    else
      acc = EqEvidence::trans(std::move(*acc), std::move(step), cur);
    cur = entry.result;
  }
  return acc;
}

// Reverses a trace start -> ... -> nf into evidence for nf = start, flipping
// each instance's orientation. The surrounding context of a step is identical
// on both sides, so the Refl siblings are valid in either direction.
std::optional<EqEvidence> chain_reversed(const ObjTerm& start,
                                         const std::vector<RewriteTraceEntry>& trace) {
  std::vector<ObjTerm> terms{start};
  for (const auto& e : trace) terms.push_back(e.result);
  std::optional<EqEvidence> acc;
  for (size_t i = trace.size(); i-- > 0;) {
    // trace[i] proved terms[i] = terms[i+1]; reversed: terms[i+1] = terms[i]
    EqEvidence step =
        step_evidence(terms[i], trace[i].pos, 0, trace[i].eq_index, trace[i].sigma, true);
    if (!acc)
      acc = std::move(step);
    else
      acc = EqEvidence::trans(std::move(*acc), std::move(step), terms[i + 1]);
  }
  return acc;
}

}  // namespace

NormalizeResult normalize_obj(const EquationSet& eqs, const ObjTerm& t,
                              const RewriteConfig& cfg) {
  NormalizeResult res;
  res.term = t;
  long steps = 0;
  for (;;) {
    std::vector<int> pos;
    size_t eq_index = 0;
    ObjSubst sigma;
    if (!find_redex(eqs, res.term, pos, eq_index, sigma)) break;
    if (steps >= cfg.fuel) {
      res.fuel_exhausted = true;
      break;
    }
    ObjTerm contractum = subst_obj_all(eqs[eq_index].rhs, sigma);
    ObjTerm next = replace_at(res.term, pos, 0, contractum);
    res.trace.push_back({pos, eq_index, sigma, next});
    res.term = std::move(next);
    ++steps;
  }
  return res;
}

DeriveResult derive_eq(const EquationSet& eqs, const ObjTerm& r, const ObjTerm& s,
                       const RewriteConfig& cfg) {
  DeriveResult out;
  if (r == s) {
    out.status = DeriveStatus::Derived;
    out.evidence = EqEvidence::refl(r);
    return out;
  }
  // direct instance first: cheapest evidence
  for (size_t i = 0; i < eqs.size(); ++i) {
    if (auto m = match_instance(eqs[i], r, s)) {
      out.status = DeriveStatus::Derived;
      out.evidence = EqEvidence::instance(i, m->sigma, m->backward);
      return out;
    }
  }
  NormalizeResult nr = normalize_obj(eqs, r, cfg);
  NormalizeResult ns = normalize_obj(eqs, s, cfg);
  if (nr.fuel_exhausted || ns.fuel_exhausted) {
    out.status = DeriveStatus::FuelExhausted;
    return out;
  }
  if (nr.term != ns.term) {
    out.status = DeriveStatus::NotDerivable;
    return out;
  }
  // r ->* nf and s ->* nf; assemble r = nf ; nf = s
  std::optional<EqEvidence> left = chain_forward(r, nr.trace);
  std::optional<EqEvidence> right = chain_reversed(s, ns.trace);
  if (left && right)
    out.evidence = EqEvidence::trans(std::move(*left), std::move(*right), nr.term);
  else if (left)
    out.evidence = std::move(*left);
  else if (right)
    out.evidence = std::move(*right);
  else
    out.evidence = EqEvidence::refl(r);
  out.status = DeriveStatus::Derived;
  return out;
}

std::variant<std::pair<ObjTerm, ObjTerm>, ReplayError> replay_evidence(
    const EquationSet& eqs, const EqEvidence& ev) {
  using Ret = std::variant<std::pair<ObjTerm, ObjTerm>, ReplayError>;
  switch (ev.kind) {
    case EqEvidence::Kind::Refl:
      return Ret{std::make_pair(ev.term, ev.term)};
    case EqEvidence::Kind::Instance: {
      if (ev.index >= eqs.size())
        return Ret{ReplayError{"instance index out of range"}};
      const Equation& eq = eqs[ev.index];
      ObjTerm l = subst_obj_all(eq.lhs, ev.sigma);
      ObjTerm r = subst_obj_all(eq.rhs, ev.sigma);
      if (ev.backward) std::swap(l, r);
      return Ret{std::make_pair(std::move(l), std::move(r))};
    }
    case EqEvidence::Kind::Trans: {
      if (ev.children.size() != 2)
        return Ret{ReplayError{"trans node needs exactly two children"}};
      auto a = replay_evidence(eqs, ev.children[0]);
      if (std::holds_alternative<ReplayError>(a)) return a;
      auto b = replay_evidence(eqs, ev.children[1]);
      if (std::holds_alternative<ReplayError>(b)) return b;
      auto& [r1, s1] = std::get<0>(a);
      auto& [s2, t2] = std::get<0>(b);
      if (s1 != s2)
        return Ret{ReplayError{"trans mid-term mismatch: " + show_term(s1) +
                               " vs " + show_term(s2)}};
      return Ret{std::make_pair(r1, t2)};
    }
    case EqEvidence::Kind::Cong: {
      std::vector<ObjTerm> ls, rs;
      for (const auto& c : ev.children) {
        auto sub = replay_evidence(eqs, c);
        if (std::holds_alternative<ReplayError>(sub)) return sub;
        auto& [l, r] = std::get<0>(sub);
        ls.push_back(l);
        rs.push_back(r);
      }
      return Ret{std::make_pair(ObjTerm::app(ev.fn, std::move(ls)),
                                ObjTerm::app(ev.fn, std::move(rs)))};
    }
  }
  return Ret{ReplayError{"malformed evidence node"}};
}

std::string show_evidence(const EqEvidence& ev) {
  switch (ev.kind) {
    case EqEvidence::Kind::Refl:
      return "refl(" + show_term(ev.term) + ")";
    case EqEvidence::Kind::Instance: {
      std::string s = "inst(" + std::to_string(ev.index) +
                      (ev.backward ? ", bwd" : ", fwd");
      for (const auto& [k, v] : ev.sigma) s += ", " + k + ":=" + show_term(v);
      return s + ")";
    }
    case EqEvidence::Kind::Trans:
      return "trans(" + show_evidence(ev.children[0]) + ", " +
             show_evidence(ev.children[1]) + ")";
    case EqEvidence::Kind::Cong: {
      std::string s = "cong(" + ev.fn;
      for (const auto& c : ev.children) s += ", " + show_evidence(c);
      return s + ")";
    }
  }
  return "?";
}

std::string show_equation(const Equation& eq) {
  return show_term(eq.lhs) + " = " + show_term(eq.rhs);
}

namespace {

nlohmann::json evidence_json(const EqEvidence& ev) {
  nlohmann::json j;
  switch (ev.kind) {
    case EqEvidence::Kind::Refl:
      j["rule"] = "refl";
      j["term"] = show_term(ev.term);
      break;
    case EqEvidence::Kind::Instance: {
      j["rule"] = "instance";
      j["index"] = ev.index;
      j["orientation"] = ev.backward ? "backward" : "forward";
      nlohmann::json sub = nlohmann::json::object();
      for (const auto& [k, v] : ev.sigma) sub[k] = show_term(v);
      j["subst"] = std::move(sub);
      break;
    }
    case EqEvidence::Kind::Trans:
      j["rule"] = "trans";
      j["mid"] = show_term(ev.mid);
      j["children"] = {evidence_json(ev.children[0]), evidence_json(ev.children[1])};
      break;
    case EqEvidence::Kind::Cong: {
      j["rule"] = "cong";
      j["fn"] = ev.fn;
      nlohmann::json kids = nlohmann::json::array();
      for (const auto& c : ev.children) kids.push_back(evidence_json(c));
      j["children"] = std::move(kids);
      break;
    }
  }
  return j;
}

}  // namespace

std::string evidence_to_json(const EqEvidence& ev) { return evidence_json(ev).dump(); }

bool equation_alpha_eq(const Equation& a, const Equation& b) {
  // canonical variable numbering in order of first occurrence
  auto canon = [](const Equation& e) {
    std::map<std::string, std::string> ren;
    auto go = [&](const ObjTerm& t, auto&& self) -> ObjTerm {
      if (t.is_var) {
        auto it = ren.find(t.head);
        if (it == ren.end())
          it = ren.emplace(t.head, "#" + std::to_string(ren.size())).first;
        return ObjTerm::var(it->second);
      }
      std::vector<ObjTerm> as;
      for (const auto& x : t.args) as.push_back(self(x, self));
      return ObjTerm::app(t.head, std::move(as));
    };
    Equation out;
    out.lhs = go(e.lhs, go);
    out.rhs = go(e.rhs, go);
    return out;
  };
  Equation ca = canon(a), cb = canon(b);
  return ca.lhs == cb.lhs && ca.rhs == cb.rhs;
}

}  // namespace af2m
