#pragma once

// Pauli-sum expressions: expr := term (('+'|'-') term)*, term := [coeff '*']
// word, word := [IXYZ]{n}. Whitespace is ignored everywhere and a leading
// sign is accepted. Character 0 of a word acts on the leftmost tensor factor.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "lindblad/errors.hpp"
#include "lindblad/linalg.hpp"

namespace lindblad {

struct PauliTerm {
  double coefficient = 0.0;
  std::string word;

  friend bool operator==(const PauliTerm&, const PauliTerm&) = default;
};

/// Canonical form: like words merged, zero coefficients dropped, words in
/// ascending I < X < Y < Z lexicographic order.
struct PauliSumExpr {
  int n_qubits = 0;
  std::vector<PauliTerm> terms;

  friend bool operator==(const PauliSumExpr&, const PauliSumExpr&) = default;

  /// Text that parses back to the same canonical expression.
  std::string to_string() const {
    if (terms.empty()) return "0*" + std::string(n_qubits, 'I');
    std::string out;
    char buf[64];
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const double c = terms[i].coefficient;
      if (i > 0) out += c < 0.0 ? " - " : " + ";
      else if (c < 0.0) out += "-";
      std::snprintf(buf, sizeof buf, "%.17g", std::abs(c));
      out += buf;
      out += '*';
      out += terms[i].word;
    }
    return out;
  }
};

namespace detail {

class PauliParser {
 public:
  PauliParser(std::string_view text, int n) : n_(n) {
    for (std::size_t i = 0; i < text.size(); ++i) {
      if (!std::isspace(static_cast<unsigned char>(text[i]))) {
        chars_.push_back(text[i]);
        pos_.push_back(i);
      }
    }
    end_pos_ = text.size();
  }

  PauliSumExpr parse() {
    if (n_ < 1) throw ArgumentError("parse_pauli_sum: n must be >= 1");
    if (chars_.empty()) throw ParseError("empty expression", 0);
    std::map<std::string, double> merged;
    std::map<std::string, double> scale;
    double sign = 1.0;
    if (peek() == '+' || peek() == '-') {
      sign = peek() == '-' ? -1.0 : 1.0;
      ++i_;
    }
    while (true) {
      auto [c, word] = term();
      merged[word] += sign * c;
      scale[word] += std::abs(c);
      if (i_ == chars_.size()) break;
      const char op = chars_[i_];
      if (op != '+' && op != '-') {
        throw ParseError(std::string("unexpected character '") + op + "'",
                         here());
      }
      sign = op == '-' ? -1.0 : 1.0;
      ++i_;
    }
    PauliSumExpr out{n_, {}};
    for (const auto& [word, c] : merged) {
      if (std::abs(c) <= 1e-15 * scale[word]) continue;
      out.terms.push_back({c, word});
    }
    return out;
  }

 private:
  char peek() const { return i_ < chars_.size() ? chars_[i_] : '\0'; }
  std::size_t here() const { return i_ < pos_.size() ? pos_[i_] : end_pos_; }

  static bool is_pauli(char c) {
    return c == 'I' || c == 'X' || c == 'Y' || c == 'Z';
  }

  std::pair<double, std::string> term() {
    if (i_ == chars_.size() || peek() == '+' || peek() == '-') {
      throw ParseError("empty term", here());
    }
    double coeff = 1.0;
    if (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.') {
      coeff = number();
      if (peek() != '*') {
        throw ParseError("expected '*' after coefficient", here());
      }
      ++i_;
    }
    const std::size_t start = here();
    std::string word;
    while (is_pauli(peek())) word += chars_[i_++];
    if (word.empty()) {
      if (i_ == chars_.size()) throw ParseError("missing Pauli word", here());
      throw ParseError(std::string("bad character '") + peek() + "'", here());
    }
    if (i_ < chars_.size() && peek() != '+' && peek() != '-') {
      throw ParseError(std::string("bad character '") + peek() + "'", here());
    }
    if (static_cast<int>(word.size()) != n_) {
      throw ParseError("Pauli word of length " + std::to_string(word.size()) +
                           " where " + std::to_string(n_) + " was expected",
                       start);
    }
    return {coeff, word};
  }

  double number() {
    const std::size_t start = i_;
    auto digits = [&] {
      std::size_t k = 0;
      while (std::isdigit(static_cast<unsigned char>(peek()))) {
        ++i_;
        ++k;
      }
      return k;
    };
    std::size_t nd = digits();
    if (peek() == '.') {
      ++i_;
      nd += digits();
    }
    if (nd == 0) throw ParseError("malformed number", pos_[start]);
    if (peek() == 'e' || peek() == 'E') {
      ++i_;
      if (peek() == '+' || peek() == '-') ++i_;
      if (digits() == 0) throw ParseError("malformed exponent", here());
    }
    const std::string s(chars_.begin() + static_cast<std::ptrdiff_t>(start),
                        chars_.begin() + static_cast<std::ptrdiff_t>(i_));
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) {
      throw ParseError("coefficient is not a finite number", pos_[start]);
    }
    return v;
  }

  int n_;
  std::vector<char> chars_;
  std::vector<std::size_t> pos_;
  std::size_t end_pos_ = 0;
  std::size_t i_ = 0;
};

inline Matrix pauli_matrix(char c) {
  Matrix m = Matrix::Zero(2, 2);
  switch (c) {
    case 'I': m << 1, 0, 0, 1; break;
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, -kI, kI, 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: throw ArgumentError(std::string("not a Pauli letter: ") + c);
  }
  return m;
}

}  // namespace detail

inline PauliSumExpr parse_pauli_sum(std::string_view text, int n) {
  return detail::PauliParser(text, n).parse();
}

inline Matrix pauli_word_matrix(std::string_view word) {
  Matrix out = Matrix::Identity(1, 1);
  for (char c : word) out = kron(out, detail::pauli_matrix(c));
  return out;
}

inline Matrix materialize(const PauliSumExpr& expr) {
  const Eigen::Index d = Eigen::Index{1} << expr.n_qubits;
  Matrix out = Matrix::Zero(d, d);
  for (const auto& t : expr.terms) {
    out += t.coefficient * pauli_word_matrix(t.word);
  }
  return out;
}

}  // namespace lindblad
