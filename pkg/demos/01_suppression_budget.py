#!/usr/bin/env python3
"""Front-end suppression budget.

How much attenuation has to happen before the receiver digitizes the
self-interference? The budget walks down from the transmit power to the
noise floor: the converter window must hold the residual interference
peak at the top while keeping quantization at or below thermal noise.
"""

from fdsic import BudgetInput, suppression_budget

print(__doc__)

for tx_power in (0.0, 10.0, 20.0):
    report = suppression_budget(BudgetInput(tx_power_dbm=tx_power))
    print(f"--- transmit power {tx_power:.0f} dBm ---")
    for label, value in report.breakdown:
        print(f"  {label:<48s} {value:8.1f}")
    print()

print(
    "At 20 dBm the passive and analog stages together must remove "
    f"{suppression_budget(BudgetInput()).required_suppression_db:.0f} dB "
    "before digital cancellation can do the rest."
)
