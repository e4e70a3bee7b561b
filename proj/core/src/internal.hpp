#pragma once

#include <span>

#include "decarb/economy.hpp"

namespace decarb::detail {

enum class Delivery {
  Backorder,  // buyer pays in full; units beyond inventory are owed as backlog
  Rationed,   // buyer pays only for units available now
};

/// Buys `budget` cents of output from a sector's firms in proportion to
/// their available inventory. Credits sellers under `flow` and returns the
/// amount spent; the caller debits the buyer.
Cents sector_purchase(EconomyState& state, int sector, Cents budget, Flow flow, Delivery delivery);

double sector_price(const EconomyState& state, int sector);

}  // namespace decarb::detail
