#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace exchangelab {

// Symbols are 0 .. size-1.
struct Alphabet {
  int size = 2;

  explicit Alphabet(int k = 2) : size(k) {
    if (k < 2) throw std::invalid_argument("alphabet needs at least 2 symbols");
  }
  bool contains(int s) const { return 0 <= s && s < size; }
};

// Closed integer interval of coordinates.
struct Window {
  int t_min = 0;
  int t_max = 0;

  Window() = default;
  Window(int lo, int hi) : t_min(lo), t_max(hi) {
    if (lo > hi) throw std::invalid_argument("empty window");
  }
  int length() const { return t_max - t_min + 1; }
  bool contains(int t) const { return t_min <= t && t <= t_max; }
};

// Word w pinned on the consecutive coordinates offset .. offset+len-1:
// the event {omega : omega_{offset+i} = word[i] for all i}.
struct Cylinder {
  int offset = 0;
  std::vector<int> word;

  Cylinder() = default;
  Cylinder(int t, std::vector<int> w) : offset(t), word(std::move(w)) {
    if (word.empty()) throw std::invalid_argument("empty cylinder word");
  }
  int length() const { return static_cast<int>(word.size()); }
  Window window() const { return Window(offset, offset + length() - 1); }

  bool operator==(const Cylinder&) const = default;
};

// One pinned coordinate: (coordinate, symbol).
using Constraint = std::pair<int, int>;

// Finite event on scattered coordinates, sorted by coordinate, at most one
// constraint per coordinate. The permuted image of a cylinder lives here
// when its support is no longer contiguous.
using Constraints = std::vector<Constraint>;

struct ScatteredCylinderError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bijection of the integers fixing all but finitely many points. Stored
// sparsely; default-constructed value is the identity.
class FinitePermutation {
 public:
  FinitePermutation() = default;

  // images maps j -> sigma(j) for the moved points; fixed points may be
  // included and are dropped. Throws std::invalid_argument unless the map
  // extends to a bijection (injective, image set equal to key set).
  static FinitePermutation from_map(const std::map<int, int>& images);

  int operator()(int j) const;
  FinitePermutation inverse() const;

  // Moved points, sorted.
  std::vector<int> support() const;
  bool is_identity() const { return images_.empty(); }

  bool operator==(const FinitePermutation&) const = default;

 private:
  std::map<int, int> images_;
};

// Swaps the blocks [1, k] and [P+1, P+k]: j <-> P+j for 1 <= j <= k.
// Requires 1 <= k < P so the blocks are disjoint.
FinitePermutation perm_block_swap(int P, int k);

// Exchanges the coordinates a and b; identity when they coincide.
FinitePermutation perm_transposition(int a, int b);

// (sigma . tau)(j) = sigma(tau(j)).
FinitePermutation perm_compose(const FinitePermutation& sigma,
                               const FinitePermutation& tau);

// Preimage of the cylinder under the coordinate action of sigma,
// (T_sigma omega)_n = omega_{sigma(n)}: each pinned pair (j, s) moves to
// (sigma(j), s). The result is a plain cylinder exactly when sigma maps the
// support onto a contiguous block; use as_cylinder to reclaim it.
Constraints perm_apply_to_cylinder(const FinitePermutation& sigma,
                                   const Cylinder& c);

// Translates the cylinder by m: the event that the shifted path lies in c.
Cylinder shift_cylinder(const Cylinder& c, int m);

Constraints constraints_of(const Cylinder& c);

// Sorts and deduplicates; nullopt when two constraints pin one coordinate
// to different symbols (the event is empty).
std::optional<Constraints> normalize_constraints(Constraints cs);

// Contiguous, conflict-free constraints as a Cylinder. Throws
// ScatteredCylinderError on gaps, std::invalid_argument on conflicts.
Cylinder as_cylinder(const Constraints& cs);

// Text forms. Cylinders read "offset:word" with the word written as digits
// ("0:011", "-2:10") or comma-separated symbols ("0:0,1,1", required once
// symbols exceed one digit). Permutations read disjoint-cycle notation
// "(0 1)(4 5)"; "()" and "id" name the identity.
Cylinder parse_cylinder(const std::string& text);
std::string to_string(const Cylinder& c);
FinitePermutation parse_permutation(const std::string& text);
std::string to_string(const FinitePermutation& p);

// Odometer step through words over {0..k-1}: advances w in lexicographic
// order, false once it wraps back to all zeros. Start from all zeros.
bool next_word(std::vector<int>& w, int k);

// Lexicographic rank of a word over {0..k-1} (big-endian base-k value),
// and its inverse. Rank order matches next_word's enumeration order.
long word_rank(const std::vector<int>& w, int k);
std::vector<int> word_unrank(long rank, int len, int k);

}  // namespace exchangelab
