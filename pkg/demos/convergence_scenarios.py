"""The bundled convergence scenarios side by side.

Weak convergence is tested against a finite battery of test functions, the
metric side with exact transport.  Escaping mass converges weakly while its
first moment and transport distance stay at |v|.

Run with ``python demos/convergence_scenarios.py``.
"""

from youngkit import convergence as C

for name in C.MEASURE_SCENARIOS:
    rep = C.run_scenario(name)
    v = rep.verdicts
    flags = " ".join(f"{k}={'pass' if v[k] else 'fail'}" for k in ("weak", "moment", "d"))
    bound = rep.extra["support_bound"]
    print(f"{name:15s} {flags}  final w1 {rep.w1[-1]:.3e}  weak slope {rep.slopes['weak']:.2f}"
          f"  support bound {'none' if bound is None else f'{bound:.2f}'}")

# Atom floor: sequences whose atoms all weigh at least eps cannot let mass escape.
try:
    C.scenario_atom_floor(0.5, [C.scenario_escaping_mass(i) for i in (1, 2, 3)], C.scenario_escaping_mass(1), C.line_battery())
except C.AtomFloorViolation as exc:
    print("escaping mass rejected by the atom floor:", exc)
