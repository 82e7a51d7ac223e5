// Four districts, North slightly larger than the rest. GreedCost spends the whole
// budget in North; MES gives each district a share.
#include "pbeval.hpp"

#include <iostream>

int main() {
  using namespace pbeval;
  CostModel costs;
  costs.fraction = Rational(1) / 8;
  auto [instance, profile] = build_district_example({10000, 9900, 9800, 9700}, Money(10000), 10, costs);

  for (const auto variant : {RuleVariant::kGreedCost, RuleVariant::kMes, RuleVariant::kMesPlus}) {
    RuleSpec spec;
    spec.variant = variant;
    const RuleOutcome out = run_rule(spec, instance, profile);
    std::cout << spec.name() << ":";
    for (const auto& id : out.allocation.selected()) std::cout << ' ' << id;
    std::cout << "\n  happiness " << happiness(profile, out.allocation).get_d() << "\n";
  }

  const auto [allocation, ledger] = mes(instance, profile);
  std::cout << "\n" << emit_trace(ledger, instance);
}
