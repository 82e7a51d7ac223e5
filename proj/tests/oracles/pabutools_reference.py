"""Reference selections for the fixture files, computed with pabutools.

Run by hand when the fixtures change; the output is checked in as
tests/data/pabutools_reference.json. Not part of the ctest run.

    python3 tests/oracles/pabutools_reference.py tests/data > tests/data/pabutools_reference.json
"""

import json
import sys
from pabutools.fractions import frac
from pathlib import Path

from pabutools.election import Cost_Sat, parse_pabulib
from pabutools.rules import greedy_utilitarian_welfare, method_of_equal_shares
from pabutools.tiebreaking import TieBreakingRule

# lower cost first, then lexicographic project id
cost_then_id = TieBreakingRule(lambda inst, prof, proj: (proj.cost, proj.name))

FIXTURES = [
    "whole_budget.pb",
    "poland_swiecie_2023_.pb",
    "poland_wieliczka_2023_green-budget.pb",
    "poland_warszawa_2024_bemowo.pb",
]
# budgets, as multiples of the file's limit, at which plain MES is recorded
SCALES = [frac(1), frac(5, 4), frac(3, 2)]


def run(path):
    instance, profile = parse_pabulib(str(path))
    limit = frac(instance.budget_limit)
    out = {"file": path.name, "budget": str(limit)}
    greedy = greedy_utilitarian_welfare(instance, profile, sat_class=Cost_Sat, tie_breaking=cost_then_id)
    out["greedcost"] = sorted(p.name for p in greedy)
    out["mes"] = {}
    for scale in SCALES:
        instance.budget_limit = limit * scale
        sel = method_of_equal_shares(instance, profile, sat_class=Cost_Sat, tie_breaking=cost_then_id)
        out["mes"][str(scale)] = sorted(p.name for p in sel)
    instance.budget_limit = limit
    return out


def main():
    data = Path(sys.argv[1] if len(sys.argv) > 1 else "tests/data")
    print(json.dumps([run(data / f) for f in FIXTURES], indent=1))


if __name__ == "__main__":
    main()
