#pragma once

#include <string>
#include <vector>

#include "smilefx/errors.hpp"
#include "smilefx/market.hpp"
#include "smilefx/sabr.hpp"

namespace smilefx {

// One row per trading day: the desk's SABR triplet and the market inputs
// that fix the forward. Dates are ISO-8601 labels; row order is what counts.
struct Dataset {
  std::vector<std::string> dates;
  std::vector<SabrParams> params;
  std::vector<MarketSnapshot> snapshots;

  std::size_t size() const { return params.size(); }

  void validate() const {
    if (dates.size() != params.size() || params.size() != snapshots.size())
      fail(ErrorKind::InvalidInput, "dataset columns have different lengths");
    for (std::size_t i = 0; i < params.size(); ++i) {
      params[i].validate();
      snapshots[i].validate();
      if (i > 0 && !(dates[i - 1] < dates[i]))
        fail(ErrorKind::OutOfOrder, "dates not strictly increasing at row " + std::to_string(i));
    }
  }

  bool operator==(const Dataset&) const = default;
};

}  // namespace smilefx
