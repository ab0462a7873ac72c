#include "adgac/constants.hpp"

#include <stdexcept>

namespace adgac {

namespace {

template <typename Visit>
void for_each_constant(TunableConstants& c, Visit&& visit) {
  visit("C1", c.C1);
  visit("C2", c.C2);
  visit("C3", c.C3);
  visit("C4", c.C4);
  visit("c0", c.c0);
  visit("c1", c.c1);
  visit("c2", c.c2);
  visit("c3", c.c3);
  visit("c4", c.c4);
  visit("c1_prime", c.c1_prime);
  visit("a2_n_multiplier", c.a2_n_multiplier);
  visit("a2_tnc_multiplier", c.a2_tnc_multiplier);
  visit("margin_n_multiplier", c.margin_n_multiplier);
}

}  // namespace

void TunableConstants::validate() const {
  auto copy = *this;
  for_each_constant(copy, [](const char* name, double value) {
    if (!(value > 0.0)) throw std::invalid_argument(std::string("constant ") + name + " must be positive");
  });
}

std::map<std::string, double> TunableConstants::to_map() const {
  std::map<std::string, double> out;
  auto copy = *this;
  for_each_constant(copy, [&](const char* name, double value) { out[name] = value; });
  return out;
}

void TunableConstants::apply(const std::map<std::string, double>& values) {
  for (const auto& [key, value] : values) {
    bool found = false;
    for_each_constant(*this, [&](const char* name, double& slot) {
      if (key == name) {
        slot = value;
        found = true;
      }
    });
    if (!found) throw std::invalid_argument("unknown constant '" + key + "'");
  }
}

}  // namespace adgac
