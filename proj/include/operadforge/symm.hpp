#pragma once

// Finite permutations and the group-action conventions used across the
// library.
//
// A Perm p of degree n is stored as a vector with p[i] = image of i
// (0-based). perm_compose(p, q) is "p after q".
//
// Conventions, fixed once and used everywhere:
//  * s.sigma permutes signature inputs: (s.sigma).inputs[i] = s.inputs[sigma[i]].
//  * The symmetry structure map sigma^* sends O(s) to O(s.sigma) and is
//    contravariant: (perm_compose(s, t))^* = t^* followed by s^*.
//  * A seating of an operation on a leaf set is a position vector
//    P (position -> leaf). Applying sigma^* re-seats from P to
//    perm_apply_positions(P, sigma) = P o sigma.
//  * reseat_perm(P_from, P_to) is the sigma whose sigma^* moves a seating
//    from P_from to P_to, i.e. P_from o sigma = P_to.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace operadforge {

using Perm = std::vector<int>;

inline Perm perm_identity(int n) {
  Perm p(n);
  std::iota(p.begin(), p.end(), 0);
  return p;
}

inline bool perm_is_identity(const Perm& p) {
  for (int i = 0; i < static_cast<int>(p.size()); ++i)
    if (p[i] != i) return false;
  return true;
}

inline bool perm_valid(const Perm& p) {
  std::vector<char> seen(p.size(), 0);
  for (int v : p) {
    if (v < 0 || v >= static_cast<int>(p.size()) || seen[v]) return false;
    seen[v] = 1;
  }
  return true;
}

// (p o q)[i] = p[q[i]]
inline Perm perm_compose(const Perm& p, const Perm& q) {
  Perm r(q.size());
  for (size_t i = 0; i < q.size(); ++i) r[i] = p[q[i]];
  return r;
}

inline Perm perm_inverse(const Perm& p) {
  Perm r(p.size());
  for (int i = 0; i < static_cast<int>(p.size()); ++i) r[p[i]] = i;
  return r;
}

// All permutations of degree n in lexicographic order.
inline std::vector<Perm> all_perms(int n) {
  std::vector<Perm> out;
  Perm p = perm_identity(n);
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

// Re-seat a position vector: result[i] = positions[sigma[i]].
template <typename T>
inline std::vector<T> perm_apply_positions(const std::vector<T>& positions, const Perm& sigma) {
  if (positions.size() != sigma.size())
    throw std::invalid_argument("perm_apply_positions: size mismatch");
  std::vector<T> out(positions.size());
  for (size_t i = 0; i < sigma.size(); ++i) out[i] = positions[sigma[i]];
  return out;
}

// The sigma with from o sigma = to (both are position -> leaf vectors over
// the same leaf set).
template <typename T>
inline Perm reseat_perm(const std::vector<T>& from, const std::vector<T>& to) {
  if (from.size() != to.size()) throw std::invalid_argument("reseat_perm: size mismatch");
  Perm sigma(from.size());
  for (size_t i = 0; i < to.size(); ++i) {
    auto it = std::find(from.begin(), from.end(), to[i]);
    if (it == from.end()) throw std::invalid_argument("reseat_perm: leaf sets differ");
    sigma[i] = static_cast<int>(it - from.begin());
  }
  return sigma;
}

// Block permutation: permutes n blocks of sizes k_i according to sigma while
// keeping each block internally ordered. Satisfies, for signatures,
//   (s o (t_1..t_n)) . block_perm(sigma, k) = s.sigma o (t_sigma(1)..t_sigma(n)).
inline Perm block_perm(const Perm& sigma, const std::vector<int>& sizes) {
  std::vector<int> offset(sizes.size() + 1, 0);
  for (size_t i = 0; i < sizes.size(); ++i) offset[i + 1] = offset[i] + sizes[i];
  Perm out;
  out.reserve(offset.back());
  for (size_t j = 0; j < sizes.size(); ++j) {
    int b = sigma[j];
    for (int p = 0; p < sizes[b]; ++p) out.push_back(offset[b] + p);
  }
  return out;
}

// Block-diagonal sum of permutations.
inline Perm block_sum(const std::vector<Perm>& parts) {
  Perm out;
  int off = 0;
  for (const auto& t : parts) {
    for (int v : t) out.push_back(off + v);
    off += static_cast<int>(t.size());
  }
  return out;
}

inline std::string perm_to_string(const Perm& p) {
  std::string s;
  for (size_t i = 0; i < p.size(); ++i) {
    if (i) s += '_';
    s += std::to_string(p[i]);
  }
  return s;
}

inline Perm perm_from_string(const std::string& s, bool* ok = nullptr) {
  Perm p;
  if (ok) *ok = true;
  if (s.empty()) return p;
  size_t pos = 0;
  while (pos <= s.size()) {
    size_t next = s.find('_', pos);
    std::string tok = s.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
    try {
      p.push_back(std::stoi(tok));
    } catch (...) {
      if (ok) *ok = false;
      return {};
    }
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  if (!perm_valid(p) && ok) *ok = false;
  return p;
}

}  // namespace operadforge
