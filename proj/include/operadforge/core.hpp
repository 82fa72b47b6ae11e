#pragma once

// Finite coloured operads enriched in finite sets: signatures, operads,
// morphisms, algebras, multi-graphs, and validators for every axiom stated
// in prose. All values are immutable after construction and every operation
// here is a pure function.

#include <compare>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "operadforge/symm.hpp"

namespace operadforge {

struct Error : std::runtime_error {
  std::string code;
  Error(std::string c, const std::string& msg) : std::runtime_error(c + ": " + msg), code(std::move(c)) {}
};

struct Colour {
  std::string id;
  Colour() = default;
  explicit Colour(std::string s) : id(std::move(s)) {}
  auto operator<=>(const Colour&) const = default;
};

// Colour ids are restricted so that the "a,b->c" signature keys stay
// unambiguous.
inline bool colour_id_ok(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return true;
}

struct Signature {
  std::vector<Colour> inputs;
  Colour output;
  Signature() = default;
  Signature(std::vector<Colour> in, Colour out) : inputs(std::move(in)), output(std::move(out)) {}
  int valence() const { return static_cast<int>(inputs.size()); }
  auto operator<=>(const Signature&) const = default;

  Signature permuted(const Perm& sigma) const {
    Signature r;
    r.output = output;
    r.inputs.resize(inputs.size());
    for (size_t i = 0; i < sigma.size(); ++i) r.inputs[i] = inputs[sigma[i]];
    return r;
  }

  std::string key() const {
    std::string k;
    for (size_t i = 0; i < inputs.size(); ++i) {
      if (i) k += ',';
      k += inputs[i].id;
    }
    k += "->";
    k += output.id;
    return k;
  }
};

inline Signature parse_signature_key(const std::string& key) {
  auto arrow = key.find("->");
  if (arrow == std::string::npos) throw Error("SchemaError", "bad signature key '" + key + "'");
  Signature s;
  s.output = Colour(key.substr(arrow + 2));
  std::string ins = key.substr(0, arrow);
  size_t pos = 0;
  while (!ins.empty()) {
    size_t com = ins.find(',', pos);
    std::string tok = ins.substr(pos, com == std::string::npos ? std::string::npos : com - pos);
    s.inputs.emplace_back(tok);
    if (com == std::string::npos) break;
    pos = com + 1;
  }
  if (!colour_id_ok(s.output.id)) throw Error("SchemaError", "bad colour id in key '" + key + "'");
  for (auto& c : s.inputs)
    if (!colour_id_ok(c.id)) throw Error("SchemaError", "bad colour id in key '" + key + "'");
  return s;
}

// s o (t_1..t_n): the inner roots must match the outer inputs.
inline Signature compose_signatures(const Signature& s, const std::vector<Signature>& ts) {
  if (static_cast<int>(ts.size()) != s.valence())
    throw Error("NonComposable", "arity mismatch: outer valence " + std::to_string(s.valence()) +
                                     ", got " + std::to_string(ts.size()) + " inner signatures");
  Signature r;
  r.output = s.output;
  for (size_t i = 0; i < ts.size(); ++i) {
    if (ts[i].output != s.inputs[i])
      throw Error("NonComposable", "root of inner signature " + std::to_string(i) + " is " +
                                       ts[i].output.id + ", expected " + s.inputs[i].id);
    for (const auto& c : ts[i].inputs) r.inputs.push_back(c);
  }
  return r;
}

enum class Variant { symmetric, nonsymmetric, reduced };

inline std::string variant_name(Variant v) {
  switch (v) {
    case Variant::symmetric: return "symmetric";
    case Variant::nonsymmetric: return "nonsymmetric";
    case Variant::reduced: return "reduced";
  }
  return "?";
}

inline Variant variant_from_name(const std::string& s) {
  if (s == "symmetric") return Variant::symmetric;
  if (s == "nonsymmetric") return Variant::nonsymmetric;
  if (s == "reduced") return Variant::reduced;
  throw Error("SchemaError", "unknown variant '" + s + "'");
}

using OpId = std::string;

struct ComposeKey {
  Signature outer;
  OpId outer_op;
  std::vector<Signature> inner;
  std::vector<OpId> inner_ops;
  auto operator<=>(const ComposeKey&) const = default;
};

struct SymKey {
  Signature sig;
  Perm sigma;
  OpId op;
  auto operator<=>(const SymKey&) const = default;
};

// The structureless underlying data of an operad.
struct MultiGraph {
  std::vector<Colour> colours;
  Variant variant = Variant::symmetric;
  int max_valence = 4;
  std::map<Signature, std::vector<OpId>> components;

  const std::vector<OpId>& component(const Signature& s) const {
    static const std::vector<OpId> empty;
    if (s.valence() > max_valence)
      throw Error("OutOfBound", "signature valence " + std::to_string(s.valence()) +
                                    " exceeds bound " + std::to_string(max_valence));
    auto it = components.find(s);
    return it == components.end() ? empty : it->second;
  }

  bool has_op(const Signature& s, const OpId& op) const {
    const auto& c = component(s);
    return std::find(c.begin(), c.end(), op) != c.end();
  }

  bool has_colour(const Colour& c) const {
    return std::find(colours.begin(), colours.end(), c) != colours.end();
  }
};

// A coloured operad with fully materialized composition, symmetry and unit
// tables up to max_valence. Signatures above the bound raise OutOfBound and
// are never silently empty.
struct FinOperad {
  std::vector<Colour> colours;
  Variant variant = Variant::symmetric;
  int max_valence = 4;
  std::map<Signature, std::vector<OpId>> components;  // explicit empties are preserved
  std::map<ComposeKey, OpId> compose_table;
  std::map<SymKey, OpId> symmetry_table;  // empty for the nonsymmetric variant
  std::map<Colour, OpId> units;

  const std::vector<OpId>& component(const Signature& s) const {
    static const std::vector<OpId> empty;
    if (s.valence() > max_valence)
      throw Error("OutOfBound", "signature valence " + std::to_string(s.valence()) +
                                    " exceeds bound " + std::to_string(max_valence));
    auto it = components.find(s);
    return it == components.end() ? empty : it->second;
  }

  bool has_op(const Signature& s, const OpId& op) const {
    const auto& c = component(s);
    return std::find(c.begin(), c.end(), op) != c.end();
  }

  bool has_colour(const Colour& c) const {
    return std::find(colours.begin(), colours.end(), c) != colours.end();
  }

  OpId unit(const Colour& c) const {
    auto it = units.find(c);
    if (it == units.end()) throw Error("MissingUnit", "no unit for colour " + c.id);
    return it->second;
  }

  OpId compose(const Signature& s, const std::vector<Signature>& ts, const OpId& op,
               const std::vector<OpId>& ops) const {
    Signature r = compose_signatures(s, ts);
    if (r.valence() > max_valence)
      throw Error("OutOfBound", "composite valence " + std::to_string(r.valence()) +
                                    " exceeds bound " + std::to_string(max_valence));
    auto it = compose_table.find(ComposeKey{s, op, ts, ops});
    if (it == compose_table.end())
      throw Error("NonComposable", "no composition entry at " + s.key() + " / op " + op);
    return it->second;
  }

  OpId sym(const Signature& s, const Perm& sigma, const OpId& op) const {
    if (variant == Variant::nonsymmetric)
      throw Error("NoSymmetry", "nonsymmetric operad has no symmetry action");
    auto it = symmetry_table.find(SymKey{s, sigma, op});
    if (it == symmetry_table.end())
      throw Error("MissingSymmetry", "no symmetry entry at " + s.key() + " / " + perm_to_string(sigma));
    return it->second;
  }

  MultiGraph underlying_multigraph() const {
    return MultiGraph{colours, variant, max_valence, components};
  }
};

// A morphism (f, f-hat): a colour map plus componentwise maps into the
// inverse image.
struct OperadMorphism {
  FinOperad source;
  FinOperad target;
  std::map<Colour, Colour> colour_map;
  std::map<Signature, std::map<OpId, OpId>> components;  // keyed by source signatures

  Colour map_colour(const Colour& c) const {
    auto it = colour_map.find(c);
    if (it == colour_map.end()) throw Error("DanglingReference", "colour map undefined at " + c.id);
    return it->second;
  }

  Signature map_signature(const Signature& s) const {
    Signature r;
    r.output = map_colour(s.output);
    for (const auto& c : s.inputs) r.inputs.push_back(map_colour(c));
    return r;
  }

  OpId map_op(const Signature& s, const OpId& op) const {
    auto it = components.find(s);
    if (it == components.end())
      throw Error("SignatureMismatch", "morphism has no component at " + s.key());
    auto jt = it->second.find(op);
    if (jt == it->second.end())
      throw Error("SignatureMismatch", "morphism undefined on op " + op + " at " + s.key());
    return jt->second;
  }
};

struct FinAlgebra {
  FinOperad operad;
  std::map<Colour, std::vector<std::string>> carrier;
  // action entries: (signature, op, argument tuple) -> carrier element
  std::map<std::tuple<Signature, OpId, std::vector<std::string>>, std::string> actions;

  const std::vector<std::string>& carrier_of(const Colour& c) const {
    auto it = carrier.find(c);
    if (it == carrier.end()) throw Error("CarrierMismatch", "no carrier at colour " + c.id);
    return it->second;
  }

  std::string act(const Signature& s, const OpId& op, const std::vector<std::string>& args) const {
    auto it = actions.find(std::make_tuple(s, op, args));
    if (it == actions.end())
      throw Error("CarrierMismatch", "action undefined at " + s.key() + " / " + op);
    return it->second;
  }
};

// ---------------------------------------------------------------------------
// Reports

struct Violation {
  std::string kind;
  std::string detail;
};

struct AxiomReport {
  std::vector<Violation> violations;
  bool pass() const { return violations.empty(); }
  void add(const std::string& kind, const std::string& detail) { violations.push_back({kind, detail}); }
  std::string summary() const {
    if (pass()) return "pass";
    std::ostringstream os;
    os << violations.size() << " violation(s)";
    for (const auto& v : violations) os << "\n  [" << v.kind << "] " << v.detail;
    return os.str();
  }
};

// ---------------------------------------------------------------------------
// Signature enumeration

inline std::vector<Signature> all_signatures(const std::vector<Colour>& colours, int max_valence,
                                             bool reduced = false) {
  std::vector<Signature> out;
  for (int n = reduced ? 1 : 0; n <= max_valence; ++n) {
    std::vector<int> idx(n, 0);
    while (true) {
      for (const auto& c : colours) {
        Signature s;
        s.output = c;
        for (int i = 0; i < n; ++i) s.inputs.push_back(colours[idx[i]]);
        out.push_back(std::move(s));
      }
      int i = n - 1;
      while (i >= 0 && idx[i] + 1 == static_cast<int>(colours.size())) idx[i--] = 0;
      if (i < 0) break;
      ++idx[i];
    }
    if (n == 0 && colours.empty()) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

// All composable inner-signature tuples for s whose composite stays within
// the bound and whose components are all non-empty in g.
template <typename HasComponent>
inline void for_each_composable(const std::vector<Signature>& sigs, const Signature& s, int bound,
                                const HasComponent& nonempty,
                                const std::function<void(const std::vector<Signature>&)>& fn) {
  std::vector<Signature> acc;
  int used = 0;
  std::function<void(int)> rec = [&](int i) {
    if (i == s.valence()) {
      fn(acc);
      return;
    }
    for (const auto& t : sigs) {
      if (t.output != s.inputs[i]) continue;
      if (used + t.valence() > bound) continue;
      if (!nonempty(t)) continue;
      acc.push_back(t);
      used += t.valence();
      rec(i + 1);
      used -= t.valence();
      acc.pop_back();
    }
  };
  rec(0);
}

// ---------------------------------------------------------------------------
// Materialization from rules

struct OperadRules {
  std::function<std::vector<OpId>(const Signature&)> ops;
  std::function<OpId(const Signature&, const std::vector<Signature>&, const OpId&,
                     const std::vector<OpId>&)>
      compose;
  std::function<OpId(const Signature&, const Perm&, const OpId&)> sym;  // ignored if nonsymmetric
  std::function<OpId(const Colour&)> unit;
};

inline FinOperad materialize_operad(std::vector<Colour> colours, Variant variant, int bound,
                                    const OperadRules& rules) {
  FinOperad o;
  std::sort(colours.begin(), colours.end());
  colours.erase(std::unique(colours.begin(), colours.end()), colours.end());
  o.colours = colours;
  o.variant = variant;
  o.max_valence = bound;
  auto sigs = all_signatures(colours, bound, variant == Variant::reduced);
  for (const auto& s : sigs) {
    auto ops = rules.ops(s);
    if (!ops.empty()) o.components[s] = ops;
  }
  for (const auto& c : colours) o.units[c] = rules.unit(c);
  auto nonempty = [&](const Signature& s) { return o.components.count(s) > 0; };
  for (const auto& [s, ops] : o.components) {
    if (variant != Variant::nonsymmetric) {
      for (const auto& sigma : all_perms(s.valence()))
        for (const auto& op : ops) o.symmetry_table[SymKey{s, sigma, op}] = rules.sym(s, sigma, op);
    }
    for_each_composable(sigs, s, bound, nonempty, [&](const std::vector<Signature>& ts) {
      std::vector<const std::vector<OpId>*> choices;
      for (const auto& t : ts) choices.push_back(&o.components.at(t));
      std::vector<OpId> pick(ts.size());
      std::function<void(size_t)> rec = [&](size_t i) {
        if (i == ts.size()) {
          for (const auto& op : ops)
            o.compose_table[ComposeKey{s, op, ts, pick}] = rules.compose(s, ts, op, pick);
          return;
        }
        for (const auto& x : *choices[i]) {
          pick[i] = x;
          rec(i + 1);
        }
      };
      rec(0);
    });
  }
  return o;
}

// ---------------------------------------------------------------------------
// Validators

inline AxiomReport validate_operad(const FinOperad& o) {
  AxiomReport rep;
  const int bound = o.max_valence;

  for (const auto& [s, ops] : o.components) {
    if (o.variant == Variant::reduced && s.valence() == 0 && !ops.empty())
      rep.add("reduced_nullary", "valence-0 component " + s.key() + " in reduced operad");
    if (!o.has_colour(s.output)) rep.add("foreign_colour", "output of " + s.key());
    for (const auto& c : s.inputs)
      if (!o.has_colour(c)) rep.add("foreign_colour", "input of " + s.key());
    std::set<OpId> seen(ops.begin(), ops.end());
    if (seen.size() != ops.size()) rep.add("duplicate_op", "repeated op id in " + s.key());
  }

  // units are present and well-typed
  for (const auto& c : o.colours) {
    auto it = o.units.find(c);
    if (it == o.units.end()) {
      if (o.variant != Variant::reduced || bound >= 1) rep.add("missing_unit", c.id);
      continue;
    }
    Signature uc{{c}, c};
    if (!o.has_op(uc, it->second)) rep.add("missing_unit", "unit of " + c.id + " not in O(" + uc.key() + ")");
  }

  auto sigs = all_signatures(o.colours, bound, o.variant == Variant::reduced);
  auto nonempty = [&](const Signature& s) {
    auto it = o.components.find(s);
    return it != o.components.end() && !it->second.empty();
  };

  // composition totality and typing
  for (const auto& [s, ops] : o.components) {
    if (ops.empty()) continue;
    for_each_composable(sigs, s, bound, nonempty, [&](const std::vector<Signature>& ts) {
      Signature r = compose_signatures(s, ts);
      std::vector<OpId> pick(ts.size());
      std::function<void(size_t)> rec = [&](size_t i) {
        if (i == ts.size()) {
          for (const auto& op : ops) {
            auto it = o.compose_table.find(ComposeKey{s, op, ts, pick});
            if (it == o.compose_table.end())
              rep.add("compose_missing", s.key() + " / " + op);
            else if (!o.has_op(r, it->second))
              rep.add("compose_typing", s.key() + " / " + op + " -> " + it->second + " not in " + r.key());
          }
          return;
        }
        for (const auto& x : o.components.at(ts[i])) {
          pick[i] = x;
          rec(i + 1);
        }
      };
      rec(0);
    });
  }
  for (const auto& [k, v] : o.compose_table) {
    try {
      Signature r = compose_signatures(k.outer, k.inner);
      bool ok = o.has_op(k.outer, k.outer_op) && r.valence() <= bound;
      for (size_t i = 0; ok && i < k.inner.size(); ++i) ok = o.has_op(k.inner[i], k.inner_ops[i]);
      if (!ok) rep.add("compose_domain", "entry outside composable tuples at " + k.outer.key());
    } catch (const Error&) {
      rep.add("compose_domain", "non-composable entry at " + k.outer.key());
    }
  }

  // unitality, both sides
  for (const auto& [s, ops] : o.components) {
    if (ops.empty()) continue;
    // inner units: x o (u_{c_1},...,u_{c_n}) = x
    bool units_ok = true;
    std::vector<Signature> uts;
    std::vector<OpId> uops;
    for (const auto& c : s.inputs) {
      uts.push_back(Signature{{c}, c});
      auto it = o.units.find(c);
      if (it == o.units.end()) {
        units_ok = false;
        break;
      }
      uops.push_back(it->second);
    }
    if (units_ok && o.variant != Variant::reduced) {
      for (const auto& op : ops) {
        auto it = o.compose_table.find(ComposeKey{s, op, uts, uops});
        if (it == o.compose_table.end() || it->second != op)
          rep.add("unitality", "inner units at " + s.key() + " / " + op);
      }
    } else if (units_ok) {
      for (const auto& op : ops) {
        auto it = o.compose_table.find(ComposeKey{s, op, uts, uops});
        if (s.valence() >= 1 && (it == o.compose_table.end() || it->second != op))
          rep.add("unitality", "inner units at " + s.key() + " / " + op);
      }
    }
    // outer unit: u_c o (x) = x
    auto uit = o.units.find(s.output);
    if (uit != o.units.end()) {
      Signature uc{{s.output}, s.output};
      for (const auto& op : ops) {
        auto it = o.compose_table.find(ComposeKey{uc, uit->second, {s}, {op}});
        if (it == o.compose_table.end() || it->second != op)
          rep.add("unitality", "outer unit at " + s.key() + " / " + op);
      }
    }
  }

  // associativity: (x o ys) o zs == x o (y_i o zs_i). Entries already
  // reported missing by the totality pass are skipped here.
  for (const auto& [s, ops] : o.components) {
    if (ops.empty()) continue;
    for_each_composable(sigs, s, bound, nonempty, [&](const std::vector<Signature>& ts) {
      Signature st = compose_signatures(s, ts);
      for_each_composable(sigs, st, bound, nonempty, [&](const std::vector<Signature>& us) {
        // split us along the blocks of ts
        std::vector<std::vector<Signature>> blocks;
        size_t pos = 0;
        for (const auto& t : ts) {
          blocks.emplace_back(us.begin() + pos, us.begin() + pos + t.valence());
          pos += t.valence();
        }
        std::vector<OpId> ypick(ts.size()), zpick(us.size());
        std::function<void(size_t)> recz = [&](size_t zi) {
          if (zi == us.size()) {
            for (const auto& x : ops) {
              try {
                OpId lhs_inner = o.compose(s, ts, x, ypick);
                OpId lhs = o.compose(st, us, lhs_inner, zpick);
                std::vector<Signature> tz;
                std::vector<OpId> yz;
                size_t q = 0;
                for (size_t i = 0; i < ts.size(); ++i) {
                  std::vector<OpId> zi_ops(zpick.begin() + q, zpick.begin() + q + ts[i].valence());
                  q += ts[i].valence();
                  tz.push_back(compose_signatures(ts[i], blocks[i]));
                  yz.push_back(o.compose(ts[i], blocks[i], ypick[i], zi_ops));
                }
                OpId rhs = o.compose(s, tz, x, yz);
                if (lhs != rhs)
                  rep.add("associativity", s.key() + " / " + x + ": " + lhs + " != " + rhs);
              } catch (const Error&) {
              }
            }
            return;
          }
          for (const auto& z : o.components.at(us[zi])) {
            zpick[zi] = z;
            recz(zi + 1);
          }
        };
        std::function<void(size_t)> recy = [&](size_t yi) {
          if (yi == ts.size()) {
            recz(0);
            return;
          }
          for (const auto& y : o.components.at(ts[yi])) {
            ypick[yi] = y;
            recy(yi + 1);
          }
        };
        recy(0);
      });
    });
  }

  if (o.variant != Variant::nonsymmetric) {
    // action totality, identity, contravariance
    for (const auto& [s, ops] : o.components) {
      if (ops.empty()) continue;
      auto perms = all_perms(s.valence());
      for (const auto& op : ops) {
        for (const auto& sigma : perms) {
          auto it = o.symmetry_table.find(SymKey{s, sigma, op});
          if (it == o.symmetry_table.end()) {
            rep.add("symmetry_missing", s.key() + " / " + op + " / " + perm_to_string(sigma));
            continue;
          }
          if (!o.has_op(s.permuted(sigma), it->second))
            rep.add("symmetry_typing", s.key() + " / " + op + " / " + perm_to_string(sigma));
        }
        auto idit = o.symmetry_table.find(SymKey{s, perm_identity(s.valence()), op});
        if (idit == o.symmetry_table.end() || idit->second != op)
          rep.add("symmetry_identity", s.key() + " / " + op);
      }
      for (const auto& sigma : perms)
        for (const auto& tau : perms)
          for (const auto& op : ops) {
            // (sigma o tau)^* = tau^* sigma^*
            OpId via = o.sym(s.permuted(sigma), tau, o.sym(s, sigma, op));
            OpId direct = o.sym(s, perm_compose(sigma, tau), op);
            if (via != direct)
              rep.add("symmetry_action", s.key() + " / " + op + ": " + perm_to_string(sigma) + "," +
                                             perm_to_string(tau));
          }
    }

    // equivariance of composition
    for (const auto& [s, ops] : o.components) {
      if (ops.empty() || s.valence() == 0) continue;
      for_each_composable(sigs, s, bound, nonempty, [&](const std::vector<Signature>& ts) {
        std::vector<int> sizes;
        for (const auto& t : ts) sizes.push_back(t.valence());
        std::vector<OpId> ypick(ts.size());
        std::function<void(size_t)> recy = [&](size_t yi) {
          if (yi < ts.size()) {
            for (const auto& y : o.components.at(ts[yi])) {
              ypick[yi] = y;
              recy(yi + 1);
            }
            return;
          }
          for (const auto& x : ops) try {
            OpId base = o.compose(s, ts, x, ypick);
            // (sigma^* x) o (y_{sigma(1)},..) = block_perm(sigma)^* (x o ys)
            for (const auto& sigma : all_perms(s.valence())) {
              std::vector<Signature> tperm(ts.size());
              std::vector<OpId> yperm(ts.size());
              for (size_t i = 0; i < ts.size(); ++i) {
                tperm[i] = ts[sigma[i]];
                yperm[i] = ypick[sigma[i]];
              }
              OpId lhs = o.compose(s.permuted(sigma), tperm, o.sym(s, sigma, x), yperm);
              Signature r = compose_signatures(s, ts);
              OpId rhs = o.sym(r, block_perm(sigma, sizes), base);
              if (lhs != rhs)
                rep.add("equivariance_outer", s.key() + " / " + x + " / " + perm_to_string(sigma));
            }
            // x o (tau_i^* y_i) = block_sum(taus)^* (x o ys)
            std::vector<std::vector<Perm>> tau_choices;
            long comb = 1;
            for (const auto& t : ts) {
              tau_choices.push_back(all_perms(t.valence()));
              comb *= static_cast<long>(tau_choices.back().size());
            }
            std::vector<Perm> taus(ts.size());
            std::function<void(size_t)> rect = [&](size_t i) {
              if (i == ts.size()) {
                std::vector<Signature> tsp(ts.size());
                std::vector<OpId> ysp(ts.size());
                for (size_t j = 0; j < ts.size(); ++j) {
                  tsp[j] = ts[j].permuted(taus[j]);
                  ysp[j] = o.sym(ts[j], taus[j], ypick[j]);
                }
                OpId lhs = o.compose(s, tsp, x, ysp);
                Signature r = compose_signatures(s, ts);
                OpId rhs = o.sym(r, block_sum(taus), base);
                if (lhs != rhs) rep.add("equivariance_inner", s.key() + " / " + x);
                return;
              }
              for (const auto& t : tau_choices[i]) {
                taus[i] = t;
                rect(i + 1);
              }
            };
            if (comb <= 256) {
              rect(0);
            } else {
              // one non-identity slot at a time keeps large cases tractable
              for (size_t j = 0; j < ts.size(); ++j)
                for (const auto& t : tau_choices[j]) {
                  for (size_t m = 0; m < ts.size(); ++m) taus[m] = perm_identity(ts[m].valence());
                  taus[j] = t;
                  std::vector<Signature> tsp(ts.size());
                  std::vector<OpId> ysp(ts.size());
                  for (size_t m = 0; m < ts.size(); ++m) {
                    tsp[m] = ts[m].permuted(taus[m]);
                    ysp[m] = o.sym(ts[m], taus[m], ypick[m]);
                  }
                  OpId lhs = o.compose(s, tsp, x, ysp);
                  Signature r = compose_signatures(s, ts);
                  OpId rhs = o.sym(r, block_sum(taus), base);
                  if (lhs != rhs) rep.add("equivariance_inner", s.key() + " / " + x);
                }
            }
          } catch (const Error&) {
          }
        };
        recy(0);
      });
    }
  }

  return rep;
}

inline AxiomReport validate_morphism(const OperadMorphism& phi) {
  AxiomReport rep;
  const FinOperad& p = phi.source;
  const FinOperad& q = phi.target;

  for (const auto& c : p.colours) {
    auto it = phi.colour_map.find(c);
    if (it == phi.colour_map.end()) {
      rep.add("colour_map", "undefined at " + c.id);
      continue;
    }
    if (!q.has_colour(it->second)) rep.add("colour_map", "image " + it->second.id + " not a target colour");
  }
  if (!rep.pass()) return rep;

  for (const auto& [s, m] : phi.components)
    if (!p.components.count(s))
      throw Error("SignatureMismatch", "component keyed at non-source signature " + s.key());

  for (const auto& [s, ops] : p.components) {
    Signature fs = phi.map_signature(s);
    for (const auto& op : ops) {
      OpId im;
      try {
        im = phi.map_op(s, op);
      } catch (const Error& e) {
        rep.add("component_total", s.key() + " / " + op);
        continue;
      }
      if (!q.has_op(fs, im)) rep.add("component_typing", s.key() + " / " + op + " -> " + im);
    }
  }
  if (!rep.pass()) return rep;

  for (const auto& [c, u] : p.units) {
    if (!p.has_colour(c)) continue;
    if (phi.map_op(Signature{{c}, c}, u) != q.unit(phi.map_colour(c)))
      rep.add("unit", "unit of " + c.id + " not sent to a unit");
  }

  for (const auto& [k, v] : p.compose_table) {
    Signature fs = phi.map_signature(k.outer);
    std::vector<Signature> fts;
    std::vector<OpId> fops;
    for (size_t i = 0; i < k.inner.size(); ++i) {
      fts.push_back(phi.map_signature(k.inner[i]));
      fops.push_back(phi.map_op(k.inner[i], k.inner_ops[i]));
    }
    OpId lhs = phi.map_op(compose_signatures(k.outer, k.inner), v);
    OpId rhs;
    try {
      rhs = q.compose(fs, fts, phi.map_op(k.outer, k.outer_op), fops);
    } catch (const Error& e) {
      rep.add("compose", k.outer.key() + ": target composition missing");
      continue;
    }
    if (lhs != rhs) rep.add("compose", k.outer.key() + " / " + k.outer_op);
  }

  if (p.variant != Variant::nonsymmetric && q.variant != Variant::nonsymmetric) {
    for (const auto& [k, v] : p.symmetry_table) {
      OpId lhs = phi.map_op(k.sig.permuted(k.sigma), v);
      OpId rhs = q.sym(phi.map_signature(k.sig), k.sigma, phi.map_op(k.sig, k.op));
      if (lhs != rhs) rep.add("symmetry", k.sig.key() + " / " + k.op + " / " + perm_to_string(k.sigma));
    }
  }
  return rep;
}

inline AxiomReport validate_algebra(const FinAlgebra& a) {
  AxiomReport rep;
  const FinOperad& o = a.operad;
  for (const auto& c : o.colours)
    if (!a.carrier.count(c)) rep.add("carrier", "missing at colour " + c.id);
  if (!rep.pass()) return rep;
  for (const auto& [k, v] : a.actions) {
    const auto& [s, op, args] = k;
    if (!o.components.count(s)) throw Error("CarrierMismatch", "action keyed off operad signature " + s.key());
  }

  auto tuples_of = [&](const Signature& s, const std::function<void(const std::vector<std::string>&)>& fn) {
    std::vector<std::string> acc(s.valence());
    std::function<void(int)> rec = [&](int i) {
      if (i == s.valence()) {
        fn(acc);
        return;
      }
      for (const auto& e : a.carrier_of(s.inputs[i])) {
        acc[i] = e;
        rec(i + 1);
      }
    };
    rec(0);
  };

  // totality and typing
  for (const auto& [s, ops] : o.components) {
    for (const auto& op : ops) {
      tuples_of(s, [&](const std::vector<std::string>& args) {
        auto it = a.actions.find(std::make_tuple(s, op, args));
        if (it == a.actions.end()) {
          rep.add("action_total", s.key() + " / " + op);
          return;
        }
        const auto& out = a.carrier_of(s.output);
        if (std::find(out.begin(), out.end(), it->second) == out.end())
          rep.add("action_typing", s.key() + " / " + op);
      });
    }
  }
  if (!rep.pass()) return rep;

  // unitality
  for (const auto& [c, u] : o.units) {
    Signature uc{{c}, c};
    for (const auto& e : a.carrier_of(c))
      if (a.act(uc, u, {e}) != e) rep.add("unitality", c.id + " / " + e);
  }

  // associativity against the composition table
  for (const auto& [k, v] : o.compose_table) {
    Signature r = compose_signatures(k.outer, k.inner);
    tuples_of(r, [&](const std::vector<std::string>& args) {
      std::vector<std::string> mids;
      size_t pos = 0;
      for (size_t i = 0; i < k.inner.size(); ++i) {
        std::vector<std::string> sub(args.begin() + pos, args.begin() + pos + k.inner[i].valence());
        pos += k.inner[i].valence();
        mids.push_back(a.act(k.inner[i], k.inner_ops[i], sub));
      }
      std::string lhs = a.act(r, v, args);
      std::string rhs = a.act(k.outer, k.outer_op, mids);
      if (lhs != rhs) rep.add("associativity", k.outer.key() + " / " + k.outer_op);
    });
  }

  // equivariance: alpha(sigma^* x, ys) = alpha(x, ys o sigma^{-1})
  if (o.variant != Variant::nonsymmetric) {
    for (const auto& [k, v] : o.symmetry_table) {
      Signature ss = k.sig.permuted(k.sigma);
      tuples_of(ss, [&](const std::vector<std::string>& args) {
        std::string lhs = a.act(ss, v, args);
        std::string rhs = a.act(k.sig, k.op, perm_apply_positions(args, perm_inverse(k.sigma)));
        if (lhs != rhs) rep.add("equivariance", k.sig.key() + " / " + k.op);
      });
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Functors on the colour bifibration

inline OperadMorphism identity_morphism(const FinOperad& o) {
  OperadMorphism m;
  m.source = o;
  m.target = o;
  for (const auto& c : o.colours) m.colour_map[c] = c;
  for (const auto& [s, ops] : o.components)
    for (const auto& op : ops) m.components[s][op] = op;
  return m;
}

inline OperadMorphism compose_morphisms(const OperadMorphism& g, const OperadMorphism& f) {
  OperadMorphism m;
  m.source = f.source;
  m.target = g.target;
  for (const auto& [c, d] : f.colour_map) m.colour_map[c] = g.map_colour(d);
  for (const auto& [s, comp] : f.components)
    for (const auto& [op, im] : comp) m.components[s][op] = g.map_op(f.map_signature(s), im);
  return m;
}

// f^* O over C for f : C -> D
inline FinOperad inverse_image(const std::map<Colour, Colour>& f, const std::vector<Colour>& domain,
                               const FinOperad& o) {
  auto fc = [&](const Colour& c) {
    auto it = f.find(c);
    if (it == f.end()) throw Error("DanglingReference", "colour map undefined at " + c.id);
    return it->second;
  };
  auto fs = [&](const Signature& s) {
    Signature r;
    r.output = fc(s.output);
    for (const auto& c : s.inputs) r.inputs.push_back(fc(c));
    return r;
  };
  OperadRules rules;
  rules.ops = [&](const Signature& s) { return o.component(fs(s)); };
  rules.unit = [&](const Colour& c) { return o.unit(fc(c)); };
  rules.sym = [&](const Signature& s, const Perm& sigma, const OpId& op) {
    return o.sym(fs(s), sigma, op);
  };
  rules.compose = [&](const Signature& s, const std::vector<Signature>& ts, const OpId& op,
                      const std::vector<OpId>& ops) {
    std::vector<Signature> fts;
    for (const auto& t : ts) fts.push_back(fs(t));
    return o.compose(fs(s), fts, op, ops);
  };
  return materialize_operad(domain, o.variant, o.max_valence, rules);
}

// f_! O over D for injective f : C -> D. Outside the image only the new
// units appear; see the explicit description of g_! i_! A.
inline FinOperad direct_image_injective(const std::map<Colour, Colour>& f,
                                        const std::vector<Colour>& codomain, const FinOperad& o,
                                        const OpId& fresh_unit_id = "u") {
  std::map<Colour, Colour> back;
  for (const auto& [c, d] : f) {
    if (back.count(d)) throw Error("NotInjective", "colour map repeats " + d.id);
    back[d] = c;
  }
  auto pre = [&](const Colour& d) -> std::optional<Colour> {
    auto it = back.find(d);
    if (it == back.end()) return std::nullopt;
    return it->second;
  };
  auto pre_sig = [&](const Signature& S) -> std::optional<Signature> {
    Signature s;
    auto r = pre(S.output);
    if (!r) return std::nullopt;
    s.output = *r;
    for (const auto& d : S.inputs) {
      auto x = pre(d);
      if (!x) return std::nullopt;
      s.inputs.push_back(*x);
    }
    return s;
  };
  OperadRules rules;
  rules.ops = [&](const Signature& S) -> std::vector<OpId> {
    if (auto s = pre_sig(S)) return o.component(*s);
    if (S.valence() == 1 && S.inputs[0] == S.output && !pre(S.output)) return {fresh_unit_id};
    return {};
  };
  rules.unit = [&](const Colour& d) -> OpId {
    if (auto c = pre(d)) return o.unit(*c);
    return fresh_unit_id;
  };
  rules.sym = [&](const Signature& S, const Perm& sigma, const OpId& op) -> OpId {
    if (auto s = pre_sig(S)) return o.sym(*s, sigma, op);
    return op;  // new units are fixed by the (trivial) unary action
  };
  rules.compose = [&](const Signature& S, const std::vector<Signature>& Ts, const OpId& op,
                      const std::vector<OpId>& ops) -> OpId {
    auto s = pre_sig(S);
    if (!s) return op;  // unit composed with units at a new colour
    bool all_old = true;
    std::vector<Signature> ts;
    for (const auto& T : Ts) {
      auto t = pre_sig(T);
      if (!t) {
        all_old = false;
        break;
      }
      ts.push_back(*t);
    }
    if (all_old) return o.compose(*s, ts, op, ops);
    // only reachable when an inner op is a new-colour unit, which cannot
    // plug into an old-colour input
    throw Error("NonComposable", "mixed composition in direct image at " + S.key());
  };
  return materialize_operad(codomain, o.variant, o.max_valence, rules);
}

// Restrict an operad to the signatures of valence at most `cap`.
inline FinOperad truncate_operad(const FinOperad& p, int cap) {
  if (cap >= p.max_valence) return p;
  FinOperad o;
  o.colours = p.colours;
  o.variant = p.variant;
  o.max_valence = cap;
  o.units = p.units;
  for (const auto& [s, ops] : p.components)
    if (s.valence() <= cap) o.components[s] = ops;
  for (const auto& [k, v] : p.compose_table) {
    if (k.outer.valence() > cap) continue;
    if (compose_signatures(k.outer, k.inner).valence() > cap) continue;
    bool ok = true;
    for (const auto& t : k.inner)
      if (t.valence() > cap) ok = false;
    if (ok) o.compose_table[k] = v;
  }
  for (const auto& [k, v] : p.symmetry_table)
    if (k.sig.valence() <= cap) o.symmetry_table[k] = v;
  return o;
}

// j^*: restrict to the unary part.
inline FinOperad underlying_category(const FinOperad& p) {
  FinOperad o;
  o.colours = p.colours;
  o.variant = p.variant;
  o.max_valence = p.max_valence;
  o.units = p.units;
  for (const auto& [s, ops] : p.components)
    if (s.valence() == 1) o.components[s] = ops;
  for (const auto& [k, v] : p.compose_table) {
    if (k.outer.valence() != 1) continue;
    bool unary = true;
    for (const auto& t : k.inner)
      if (t.valence() != 1) unary = false;
    if (unary) o.compose_table[k] = v;
  }
  for (const auto& [k, v] : p.symmetry_table)
    if (k.sig.valence() == 1) o.symmetry_table[k] = v;
  return o;
}

// The inclusion underlying_category(P) -> P.
inline OperadMorphism underlying_inclusion(const FinOperad& p) {
  OperadMorphism m;
  m.source = underlying_category(p);
  m.target = p;
  for (const auto& c : p.colours) m.colour_map[c] = c;
  for (const auto& [s, ops] : m.source.components)
    for (const auto& op : ops) m.components[s][op] = op;
  return m;
}

// ---------------------------------------------------------------------------
// Morphism search

struct MorphismSearchOptions {
  std::optional<std::map<Colour, Colour>> colour_map;  // fix the colour map
  bool require_colour_bijection = false;
  bool require_component_bijections = false;
  long budget = 2000000;  // explored assignment nodes
  long max_results = -1;  // -1: all
};

// Exhaustive, deterministic enumeration of operad morphisms P -> Q.
inline std::vector<OperadMorphism> enumerate_operad_morphisms(const FinOperad& p, const FinOperad& q,
                                                              MorphismSearchOptions opt = {}) {
  std::vector<OperadMorphism> found;
  long nodes = 0;

  std::vector<std::map<Colour, Colour>> colour_maps;
  if (opt.colour_map) {
    colour_maps.push_back(*opt.colour_map);
  } else {
    std::map<Colour, Colour> acc;
    std::function<void(size_t)> rec = [&](size_t i) {
      if (i == p.colours.size()) {
        colour_maps.push_back(acc);
        return;
      }
      for (const auto& d : q.colours) {
        acc[p.colours[i]] = d;
        rec(i + 1);
      }
      acc.erase(p.colours[i]);
    };
    rec(0);
    if (p.colours.empty()) colour_maps.push_back({});
  }

  for (const auto& cmap : colour_maps) {
    if (opt.require_colour_bijection) {
      std::set<Colour> img;
      for (const auto& [c, d] : cmap) img.insert(d);
      if (img.size() != q.colours.size() || cmap.size() != p.colours.size()) continue;
    }
    OperadMorphism m;
    m.source = p;
    m.target = q;
    m.colour_map = cmap;
    bool feasible = true;
    std::vector<std::pair<Signature, OpId>> slots;
    for (const auto& [s, ops] : p.components) {
      Signature fs = m.map_signature(s);
      if (fs.valence() > q.max_valence) {
        feasible = false;
        break;
      }
      const auto& tgt = q.component(fs);
      if (!ops.empty() && tgt.empty()) {
        feasible = false;
        break;
      }
      if (opt.require_component_bijections && ops.size() != tgt.size()) {
        feasible = false;
        break;
      }
      for (const auto& op : ops) slots.emplace_back(s, op);
    }
    if (!feasible) continue;

    // units are forced
    std::map<std::pair<Signature, OpId>, OpId> assign;
    bool unit_ok = true;
    for (const auto& c : p.colours) {
      Signature uc{{c}, c};
      OpId u = p.unit(c);
      OpId qu;
      try {
        qu = q.unit(m.map_colour(c));
      } catch (const Error&) {
        unit_ok = false;
        break;
      }
      assign[{uc, u}] = qu;
    }
    if (!unit_ok) continue;

    // incremental consistency on the compose/symmetry tables
    auto check_partial = [&](const std::pair<Signature, OpId>& just) -> bool {
      for (const auto& [k, v] : p.compose_table) {
        bool involves = (k.outer == just.first && k.outer_op == just.second) ||
                        (compose_signatures(k.outer, k.inner) == just.first && v == just.second);
        for (size_t i = 0; !involves && i < k.inner.size(); ++i)
          involves = k.inner[i] == just.first && k.inner_ops[i] == just.second;
        if (!involves) continue;
        auto a = assign.find({k.outer, k.outer_op});
        if (a == assign.end()) continue;
        std::vector<OpId> fops;
        bool all = true;
        for (size_t i = 0; i < k.inner.size(); ++i) {
          auto b = assign.find({k.inner[i], k.inner_ops[i]});
          if (b == assign.end()) {
            all = false;
            break;
          }
          fops.push_back(b->second);
        }
        if (!all) continue;
        Signature r = compose_signatures(k.outer, k.inner);
        auto c = assign.find({r, v});
        if (c == assign.end()) continue;
        std::vector<Signature> fts;
        for (const auto& t : k.inner) fts.push_back(m.map_signature(t));
        OpId rhs;
        try {
          rhs = q.compose(m.map_signature(k.outer), fts, a->second, fops);
        } catch (const Error&) {
          return false;
        }
        if (rhs != c->second) return false;
      }
      if (p.variant != Variant::nonsymmetric && q.variant != Variant::nonsymmetric) {
        for (const auto& [k, v] : p.symmetry_table) {
          bool involves = (k.sig == just.first && k.op == just.second) ||
                          (k.sig.permuted(k.sigma) == just.first && v == just.second);
          if (!involves) continue;
          auto a = assign.find({k.sig, k.op});
          auto b = assign.find({k.sig.permuted(k.sigma), v});
          if (a == assign.end() || b == assign.end()) continue;
          OpId rhs;
          try {
            rhs = q.sym(m.map_signature(k.sig), k.sigma, a->second);
          } catch (const Error&) {
            return false;
          }
          if (rhs != b->second) return false;
        }
      }
      return true;
    };

    bool pruned_unit = true;
    for (const auto& [slot, im] : assign)
      if (!check_partial(slot)) pruned_unit = false;
    if (!pruned_unit) continue;

    std::function<bool(size_t)> rec = [&](size_t i) -> bool {
      if (opt.max_results >= 0 && static_cast<long>(found.size()) >= opt.max_results) return false;
      if (++nodes > opt.budget)
        throw Error("SearchBudgetExceeded", "explored " + std::to_string(nodes) + " nodes");
      if (i == slots.size()) {
        OperadMorphism cand = m;
        for (const auto& [slot, im] : assign) cand.components[slot.first][slot.second] = im;
        if (opt.require_component_bijections) {
          for (const auto& [s, ops] : p.components) {
            std::set<OpId> img;
            for (const auto& op : ops) img.insert(cand.components[s][op]);
            if (img.size() != ops.size()) return true;
          }
        }
        if (validate_morphism(cand).pass()) found.push_back(std::move(cand));
        return true;
      }
      if (assign.count(slots[i])) return rec(i + 1);
      Signature fs = m.map_signature(slots[i].first);
      for (const auto& cand : q.component(fs)) {
        assign[slots[i]] = cand;
        if (check_partial(slots[i])) {
          if (!rec(i + 1)) {
            assign.erase(slots[i]);
            return false;
          }
        }
        assign.erase(slots[i]);
      }
      return true;
    };
    rec(0);
  }
  return found;
}

// Componentwise-bijection comparison "up to listed isomorphism".
inline std::optional<OperadMorphism> find_isomorphism(const FinOperad& p, const FinOperad& q) {
  if (p.colours.size() != q.colours.size() || p.variant != q.variant) return std::nullopt;
  MorphismSearchOptions opt;
  opt.require_colour_bijection = true;
  opt.require_component_bijections = true;
  opt.max_results = 1;
  auto r = enumerate_operad_morphisms(p, q, opt);
  if (r.empty()) return std::nullopt;
  return r.front();
}

inline bool isomorphic(const FinOperad& p, const FinOperad& q) { return find_isomorphism(p, q).has_value(); }

}  // namespace operadforge
