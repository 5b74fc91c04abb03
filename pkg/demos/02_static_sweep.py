"""
Static goal probability versus leaf probability
================================================

Sweep a common success probability over every attack leaf of the bundled
malicious-insider model and compare the three defender scenarios. Detection
pulls the curve down; mitigation on top of it pulls it down further than
detection alone only when detection is imperfect, which is why the
detect-only curve (perfect mitigation) sits lowest.
"""

import numpy as np

from actkit import Scenario, load_bundled, sweep_pleaf

act = load_bundled("mia")
grid = np.linspace(0.0, 1.0, 21)
results = {r.scenario: r for r in sweep_pleaf(act, grid)}

print(f"{'Pleaf':>6} {'no-cm':>10} {'detect-only':>12} {'full':>10}")
for i, x in enumerate(grid):
    row = (results[Scenario.NO_CM].pgoal[i],
           results[Scenario.DETECT_ONLY].pgoal[i],
           results[Scenario.FULL].pgoal[i])
    print(f"{x:6.2f} {row[0]:10.6f} {row[1]:12.6f} {row[2]:10.6f}")

# The ordering detect-only <= full <= no-cm holds pointwise.
for i in range(len(grid)):
    assert (results[Scenario.DETECT_ONLY].pgoal[i]
            <= results[Scenario.FULL].pgoal[i]
            <= results[Scenario.NO_CM].pgoal[i])

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    fig, ax = plt.subplots(figsize=(6, 4))
    for scenario, result in results.items():
        ax.plot(result.grid, result.pgoal, marker="o", ms=3, label=scenario.value)
    ax.set_xlabel("Pleaf")
    ax.set_ylabel("Pgoal")
    ax.set_title(act.title)
    ax.legend()
    fig.tight_layout()
    fig.savefig("static_sweep.png", dpi=120)
    print("\nwrote static_sweep.png")
