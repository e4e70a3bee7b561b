#include "decarb/ledger.hpp"

namespace decarb {

std::string_view flow_name(Flow flow) {
  switch (flow) {
    case Flow::Wages: return "wages";
    case Flow::Intermediate: return "intermediate";
    case Flow::Consumption: return "consumption";
    case Flow::GovernmentPurchases: return "government_purchases";
    case Flow::LeverA: return "lever_a";
    case Flow::LeverB: return "lever_b";
    case Flow::Adoption: return "adoption";
    case Flow::AdoptionSubsidy: return "adoption_subsidy";
    case Flow::Dividends: return "dividends";
    case Flow::Tax: return "tax";
    case Flow::Transfers: return "transfers";
    case Flow::Subsidies: return "subsidies";
    case Flow::DebtInterest: return "debt_interest";
    case Flow::DepositInterest: return "deposit_interest";
    case Flow::kCount: break;
  }
  return "unknown";
}

void Ledger::open(Cents money_stock) {
  totals_ = {};
  opening_ = money_stock;
  closing_ = 0;
  open_ = true;
  closed_ = false;
}

void Ledger::close(Cents money_stock) {
  closing_ = money_stock;
  open_ = false;
  closed_ = true;
}

Cents Ledger::total_issued() const {
  Cents sum = 0;
  for (const auto& t : totals_) sum += t.issued;
  return sum;
}

}  // namespace decarb
