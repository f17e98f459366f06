#include "mlm/constraint.hpp"

#include <stdexcept>

namespace mlm {

bool Constraint::word_admissible(std::span<const std::int8_t> word) const {
  switch (kind) {
    case Kind::none:
      return true;
    case Kind::rll_d1:
      for (size_t j = 1; j + 1 < word.size(); ++j)
        if (word[j - 1] != word[j] && word[j] != word[j + 1]) return false;
      return true;
    case Kind::custom:
      if (!predicate) throw std::logic_error("custom constraint has no predicate");
      return predicate(word);
  }
  return true;
}

std::string to_string(Constraint::Kind kind) {
  switch (kind) {
    case Constraint::Kind::none:
      return "none";
    case Constraint::Kind::rll_d1:
      return "rll-d1";
    case Constraint::Kind::custom:
      return "custom";
  }
  return "?";
}

}  // namespace mlm
