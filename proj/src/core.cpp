#include "exchangelab/core.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace exchangelab {

FinitePermutation FinitePermutation::from_map(
    const std::map<int, int>& images) {
  FinitePermutation p;
  std::set<int> keys, values;
  for (auto [j, img] : images) {
    if (j == img) continue;
    p.images_[j] = img;
    keys.insert(j);
    if (!values.insert(img).second)
      throw std::invalid_argument("permutation map is not injective");
  }
  if (keys != values)
    throw std::invalid_argument(
        "permutation must map its moved points onto themselves");
  return p;
}

int FinitePermutation::operator()(int j) const {
  auto it = images_.find(j);
  return it == images_.end() ? j : it->second;
}

FinitePermutation FinitePermutation::inverse() const {
  FinitePermutation p;
  for (auto [j, img] : images_) p.images_[img] = j;
  return p;
}

std::vector<int> FinitePermutation::support() const {
  std::vector<int> s;
  s.reserve(images_.size());
  for (auto [j, img] : images_) s.push_back(j);
  return s;
}

FinitePermutation perm_block_swap(int P, int k) {
  if (k < 1 || k >= P)
    throw std::invalid_argument("block swap requires 1 <= k < P");
  std::map<int, int> m;
  for (int j = 1; j <= k; ++j) {
    m[j] = P + j;
    m[P + j] = j;
  }
  return FinitePermutation::from_map(m);
}

FinitePermutation perm_transposition(int a, int b) {
  if (a == b) return FinitePermutation();
  return FinitePermutation::from_map({{a, b}, {b, a}});
}

FinitePermutation perm_compose(const FinitePermutation& sigma,
                               const FinitePermutation& tau) {
  std::set<int> pts;
  for (int j : sigma.support()) pts.insert(j);
  for (int j : tau.support()) pts.insert(j);
  std::map<int, int> m;
  for (int j : pts) m[j] = sigma(tau(j));
  return FinitePermutation::from_map(m);
}

Constraints perm_apply_to_cylinder(const FinitePermutation& sigma,
                                   const Cylinder& c) {
  Constraints out;
  out.reserve(c.word.size());
  for (int i = 0; i < c.length(); ++i)
    out.emplace_back(sigma(c.offset + i), c.word[i]);
  std::sort(out.begin(), out.end());
  return out;
}

Cylinder shift_cylinder(const Cylinder& c, int m) {
  return Cylinder(c.offset + m, c.word);
}

Constraints constraints_of(const Cylinder& c) {
  Constraints out;
  out.reserve(c.word.size());
  for (int i = 0; i < c.length(); ++i)
    out.emplace_back(c.offset + i, c.word[i]);
  return out;
}

std::optional<Constraints> normalize_constraints(Constraints cs) {
  std::sort(cs.begin(), cs.end());
  Constraints out;
  out.reserve(cs.size());
  for (const auto& c : cs) {
    if (!out.empty() && out.back().first == c.first) {
      if (out.back().second != c.second) return std::nullopt;
      continue;
    }
    out.push_back(c);
  }
  return out;
}

Cylinder as_cylinder(const Constraints& cs) {
  auto norm = normalize_constraints(cs);
  if (!norm)
    throw std::invalid_argument("conflicting constraints form no cylinder");
  if (norm->empty()) throw std::invalid_argument("empty constraint set");
  std::vector<int> word;
  word.reserve(norm->size());
  int offset = norm->front().first;
  int expect = offset;
  for (const auto& [coord, sym] : *norm) {
    if (coord != expect)
      throw ScatteredCylinderError("constraint support is not contiguous");
    word.push_back(sym);
    ++expect;
  }
  return Cylinder(offset, std::move(word));
}

namespace {

int parse_int(const std::string& s) {
  std::size_t pos = 0;
  int v;
  try {
    v = std::stoi(s, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("expected an integer, got '" + s + "'");
  }
  if (pos != s.size())
    throw std::invalid_argument("expected an integer, got '" + s + "'");
  return v;
}

std::vector<std::string> split_items(const std::string& s) {
  std::vector<std::string> items;
  std::string cur;
  for (char c : s) {
    if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) items.push_back(std::move(cur)), cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) items.push_back(std::move(cur));
  return items;
}

}  // namespace

Cylinder parse_cylinder(const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos)
    throw std::invalid_argument("cylinder must read 'offset:word': " + text);
  int offset = parse_int(text.substr(0, colon));
  std::string body = text.substr(colon + 1);
  std::vector<int> word;
  if (body.find(',') != std::string::npos) {
    for (const auto& item : split_items(body)) word.push_back(parse_int(item));
  } else {
    for (char c : body) {
      if (std::isspace(static_cast<unsigned char>(c))) continue;
      if (!std::isdigit(static_cast<unsigned char>(c)))
        throw std::invalid_argument("bad symbol '" + std::string(1, c) +
                                    "' in cylinder word");
      word.push_back(c - '0');
    }
  }
  if (word.empty()) throw std::invalid_argument("empty cylinder word");
  for (int s : word)
    if (s < 0) throw std::invalid_argument("negative symbol in cylinder word");
  return Cylinder(offset, std::move(word));
}

std::string to_string(const Cylinder& c) {
  std::ostringstream os;
  os << c.offset << ':';
  bool digits = std::all_of(c.word.begin(), c.word.end(),
                            [](int s) { return s <= 9; });
  for (int i = 0; i < c.length(); ++i) {
    if (!digits && i) os << ',';
    os << c.word[i];
  }
  return os.str();
}

FinitePermutation parse_permutation(const std::string& text) {
  auto first = text.find_first_not_of(" \t\n\r");
  if (first == std::string::npos)
    throw std::invalid_argument("empty permutation text");
  auto last = text.find_last_not_of(" \t\n\r");
  std::string s = text.substr(first, last - first + 1);
  if (s == "id") return FinitePermutation();

  std::map<int, int> images;
  std::set<int> seen;
  std::size_t i = 0;
  bool any_cycle = false;
  while (i < s.size()) {
    if (std::isspace(static_cast<unsigned char>(s[i]))) {
      ++i;
      continue;
    }
    if (s[i] != '(')
      throw std::invalid_argument("expected '(' in permutation: " + text);
    auto close = s.find(')', i);
    if (close == std::string::npos)
      throw std::invalid_argument("unbalanced '(' in permutation: " + text);
    auto items = split_items(s.substr(i + 1, close - i - 1));
    std::vector<int> cycle;
    cycle.reserve(items.size());
    for (const auto& item : items) {
      int v = parse_int(item);
      if (!seen.insert(v).second)
        throw std::invalid_argument("cycles are not disjoint in: " + text);
      cycle.push_back(v);
    }
    if (cycle.size() >= 2)
      for (std::size_t j = 0; j < cycle.size(); ++j)
        images[cycle[j]] = cycle[(j + 1) % cycle.size()];
    any_cycle = true;
    i = close + 1;
  }
  if (!any_cycle)
    throw std::invalid_argument("empty permutation text: " + text);
  return FinitePermutation::from_map(images);
}

std::string to_string(const FinitePermutation& p) {
  auto sup = p.support();
  if (sup.empty()) return "()";
  std::set<int> remaining(sup.begin(), sup.end());
  std::ostringstream os;
  while (!remaining.empty()) {
    int start = *remaining.begin();
    os << '(';
    int j = start;
    bool first = true;
    do {
      if (!first) os << ' ';
      os << j;
      remaining.erase(j);
      j = p(j);
      first = false;
    } while (j != start);
    os << ')';
  }
  return os.str();
}

bool next_word(std::vector<int>& w, int k) {
  for (int i = static_cast<int>(w.size()) - 1; i >= 0; --i) {
    if (++w[i] < k) return true;
    w[i] = 0;
  }
  return false;
}

long word_rank(const std::vector<int>& w, int k) {
  long r = 0;
  for (int s : w) r = r * k + s;
  return r;
}

std::vector<int> word_unrank(long rank, int len, int k) {
  std::vector<int> w(len);
  for (int i = len - 1; i >= 0; --i) {
    w[i] = static_cast<int>(rank % k);
    rank /= k;
  }
  return w;
}

}  // namespace exchangelab
