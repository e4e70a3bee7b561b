#pragma once

#include <array>
#include <cstddef>
#include <string_view>

#include "decarb/money.hpp"

namespace decarb {

/// Monetary flow channels recorded by the per-step audit ledger.
enum class Flow : std::size_t {
  Wages,
  Intermediate,
  Consumption,
  GovernmentPurchases,
  LeverA,
  LeverB,
  Adoption,
  AdoptionSubsidy,
  Dividends,
  Tax,
  Transfers,
  Subsidies,
  DebtInterest,
  DepositInterest,
  kCount,
};

inline constexpr std::size_t kFlowCount = static_cast<std::size_t>(Flow::kCount);

std::string_view flow_name(Flow flow);

struct FlowTotals {
  Cents debited = 0;   // taken from deposit accounts
  Cents credited = 0;  // added to deposit accounts
  Cents issued = 0;    // net central-bank money creation (negative = destruction)

  Cents residual() const { return credited - debited - issued; }
};

/// Flow audit of a single step. Every deposit change is recorded here at the
/// point it is applied; the audit then checks the books close to the cent.
class Ledger {
 public:
  void open(Cents money_stock);
  void close(Cents money_stock);
  bool is_open() const { return open_; }
  bool is_closed() const { return closed_; }

  void debit(Flow flow, Cents amount) { totals_[index(flow)].debited += amount; }
  void credit(Flow flow, Cents amount) { totals_[index(flow)].credited += amount; }
  void issue(Flow flow, Cents amount) { totals_[index(flow)].issued += amount; }

  const FlowTotals& operator[](Flow flow) const { return totals_[index(flow)]; }
  FlowTotals& operator[](Flow flow) { return totals_[index(flow)]; }

  Cents opening_money() const { return opening_; }
  Cents closing_money() const { return closing_; }
  Cents total_issued() const;

 private:
  static std::size_t index(Flow flow) { return static_cast<std::size_t>(flow); }

  std::array<FlowTotals, kFlowCount> totals_{};
  Cents opening_ = 0;
  Cents closing_ = 0;
  bool open_ = false;
  bool closed_ = false;
};

}  // namespace decarb
