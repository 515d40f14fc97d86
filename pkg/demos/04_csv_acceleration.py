"""Accelerating a numeric trajectory from a CSV file, library and CLI.

The bundled file lowpass2_iterates.csv holds 41 iterates of a slowly
converging two-state linear recurrence.  The raw trajectory moves by
whole units per step and is nowhere near its limit after 40 steps; the
vector epsilon transform recovers the limit from the first handful of
rows.

The same operation is available from the command line:

    fixaccel accelerate lowpass2_iterates.csv --method vea --delta 1e-5

This script runs the transform through the library, then invokes the
CLI entry point on the same file and shows its report.

Run with:  python3 demos/04_csv_acceleration.py
"""
import numpy as np

import fixaccel as fa
from fixaccel.cli import main as cli_main

path = fa.bundled_path("lowpass2_iterates.csv")
rows = np.loadtxt(path, delimiter=",", skiprows=1)
print(f"{len(rows)} iterates of a 2-state recurrence, last row "
      f"({rows[-1][0]:.4f}, {rows[-1][1]:.4f})")

# --- library: the even epsilon diagonal ------------------------------
diag = fa.vector_epsilon_diagonal(rows)
print(f"\n{'k':>3} {'d_k[0]':>20} {'d_k[1]':>20} {'step to d_k-1':>14}")
prev = None
for k, el in enumerate(diag[:6]):
    v = np.asarray(el.value)
    step = "" if prev is None else f"{np.max(np.abs(v - prev)):14.3e}"
    print(f"{k:>3} {v[0]:20.10f} {v[1]:20.10f} {step}")
    prev = v

# Detection: the first element whose step to its predecessor is below
# the agreement tolerance is taken as the limit estimate.
for delta in (1e-3, 1e-5):
    vals = [np.asarray(el.value) for el in diag]
    hit = next(j for j in range(1, len(vals))
               if np.max(np.abs(vals[j] - vals[j - 1])) <= delta)
    print(f"delta {delta:g}: agreement at diagonal element {hit}, "
          f"estimate ({vals[hit][0]:.8f}, {vals[hit][1]:.8f})")

# The trajectory is x' = A x + B u with u = 2, so the true limit solves
# (I - A) x = B u; the detected element matches it to ~1e-7.
a = np.array([[0.9858, -0.009929], [0.00929, 1.0]])
b = np.array([0.9929, 0.004965])
limit = np.linalg.solve(np.eye(2) - a, 2.0 * b)
print(f"closed-form limit   ({limit[0]:.8f}, {limit[1]:.8f})")

# --- the same thing through the CLI ----------------------------------
print("\n$ fixaccel accelerate lowpass2_iterates.csv --method vea "
      "--delta 1e-5")
code = cli_main(["accelerate", str(path), "--method", "vea",
                 "--delta", "1e-5"])
print(f"(exit code {code})")
