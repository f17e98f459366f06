#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>

namespace mlm {

// Admissibility constraint on +/-1 symbol words. The RLL d=1 code forbids two
// consecutive transitions; custom constraints supply a whole-word predicate.
struct Constraint {
  enum class Kind { none, rll_d1, custom };

  Kind kind = Kind::none;
  std::function<bool(std::span<const std::int8_t>)> predicate;  // custom only

  static Constraint none() { return {}; }
  static Constraint rll_d1() {
    Constraint c;
    c.kind = Kind::rll_d1;
    return c;
  }
  static Constraint custom(std::function<bool(std::span<const std::int8_t>)> p) {
    Constraint c;
    c.kind = Kind::custom;
    c.predicate = std::move(p);
    return c;
  }

  bool unconstrained() const { return kind == Kind::none; }

  // Whether the word can occur as a subword of an admissible sequence.
  bool word_admissible(std::span<const std::int8_t> word) const;
};

std::string to_string(Constraint::Kind kind);

}  // namespace mlm
