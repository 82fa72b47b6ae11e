#pragma once

// Stock operads: the one-object category, the free-living isomorphism, the
// commutative and associative operads, and the symmetric associative operad
// whose arity-n component is the symmetric group.

#include "operadforge/core.hpp"

namespace operadforge {

// 1: a single colour, only the unit operation.
inline FinOperad one_operad(int bound = 4, const std::string& colour = "0") {
  OperadRules r;
  Colour c{colour};
  r.ops = [&](const Signature& s) -> std::vector<OpId> {
    if (s.valence() == 1 && s.inputs[0] == c && s.output == c) return {"u"};
    return {};
  };
  r.unit = [](const Colour&) { return OpId("u"); };
  r.sym = [](const Signature&, const Perm&, const OpId& op) { return op; };
  r.compose = [](const Signature&, const std::vector<Signature>&, const OpId& op,
                 const std::vector<OpId>&) { return op; };
  return materialize_operad({c}, Variant::symmetric, bound, r);
}

// I: two colours 0,1, all four unary components are singletons. Every unary
// operation is invertible; there is nothing else.
inline FinOperad interval_operad(int bound = 4) {
  OperadRules r;
  r.ops = [](const Signature& s) -> std::vector<OpId> {
    if (s.valence() == 1) return {"u"};
    return {};
  };
  r.unit = [](const Colour&) { return OpId("u"); };
  r.sym = [](const Signature&, const Perm&, const OpId& op) { return op; };
  r.compose = [](const Signature&, const std::vector<Signature>&, const OpId& op,
                 const std::vector<OpId>&) { return op; };
  return materialize_operad({Colour{"0"}, Colour{"1"}}, Variant::symmetric, bound, r);
}

// Com: a singleton at every one-colour signature.
inline FinOperad com_operad(int bound = 4, const std::string& colour = "0") {
  OperadRules r;
  r.ops = [](const Signature&) -> std::vector<OpId> { return {"m"}; };
  r.unit = [](const Colour&) { return OpId("m"); };
  r.sym = [](const Signature&, const Perm&, const OpId& op) { return op; };
  r.compose = [](const Signature&, const std::vector<Signature>&, const OpId&,
                 const std::vector<OpId>&) { return OpId("m"); };
  return materialize_operad({Colour{colour}}, Variant::symmetric, bound, r);
}

// As: the nonsymmetric associative operad, one operation per arity.
inline FinOperad as_operad(int bound = 4, const std::string& colour = "0") {
  OperadRules r;
  r.ops = [](const Signature&) -> std::vector<OpId> { return {"m"}; };
  r.unit = [](const Colour&) { return OpId("m"); };
  r.compose = [](const Signature&, const std::vector<Signature>&, const OpId&,
                 const std::vector<OpId>&) { return OpId("m"); };
  return materialize_operad({Colour{colour}}, Variant::nonsymmetric, bound, r);
}

namespace detail {

inline OpId word_id(const Perm& w) {
  std::string s = "p";
  for (int v : w) s += static_cast<char>('0' + v);
  return s;
}

inline Perm word_of(const OpId& id) {
  Perm w;
  for (size_t i = 1; i < id.size(); ++i) w.push_back(id[i] - '0');
  return w;
}

}  // namespace detail

// As_Sigma: arity-n component is Sigma_n. An operation is stored as the word
// w with w[pos] = argument index, i.e. the product x_{w(0)} x_{w(1)} ...
// Composition is word substitution in blocks; sigma^* prefixes sigma^{-1}.
// This model pins the action conventions of the whole library.
inline FinOperad as_sigma_operad(int bound = 4, const std::string& colour = "0") {
  if (bound > 6) throw Error("OutOfBound", "as_sigma materialization capped at valence 6");
  OperadRules r;
  r.ops = [](const Signature& s) -> std::vector<OpId> {
    std::vector<OpId> out;
    for (const auto& w : all_perms(s.valence())) out.push_back(detail::word_id(w));
    return out;
  };
  r.unit = [](const Colour&) { return detail::word_id({0}); };
  r.sym = [](const Signature&, const Perm& sigma, const OpId& op) {
    return detail::word_id(perm_compose(perm_inverse(sigma), detail::word_of(op)));
  };
  r.compose = [](const Signature&, const std::vector<Signature>& ts, const OpId& op,
                 const std::vector<OpId>& ops) {
    Perm w = detail::word_of(op);
    std::vector<int> offset(ts.size() + 1, 0);
    for (size_t i = 0; i < ts.size(); ++i) offset[i + 1] = offset[i] + ts[i].valence();
    Perm out;
    for (int a : w) {
      Perm u = detail::word_of(ops[a]);
      for (int v : u) out.push_back(offset[a] + v);
    }
    return detail::word_id(out);
  };
  return materialize_operad({Colour{colour}}, Variant::symmetric, bound, r);
}

// j_!(1) and j_!(I) are one_operad and interval_operad themselves: the
// inclusion of categories into operads adds nothing outside the unary part.

inline FinOperad builtin(const std::string& name, int bound = 4) {
  if (name == "one") return one_operad(bound);
  if (name == "interval") return interval_operad(bound);
  if (name == "com") return com_operad(bound);
  if (name == "as") return as_operad(bound);
  if (name == "as_sigma") return as_sigma_operad(std::min(bound, 4));
  throw Error("UnknownBuiltin", name);
}

}  // namespace operadforge
