#!/usr/bin/env python3
"""Smoke test for the orbitforge_py extension module.

Builds nothing itself: it imports orbitforge_py from this directory, or
falls back to the compiled cdylib in target/release or target/debug
(copying it next to this script under the importable name).

Usage:
    cargo build -p orbitforge-py --release
    python3 python/smoke_test.py
"""

import math
import shutil
import sys
from pathlib import Path

HERE = Path(__file__).resolve().parent
ROOT = HERE.parent


def locate_module():
    if (HERE / "orbitforge_py.so").exists():
        return
    candidates = [
        ROOT / "target" / "release" / "liborbitforge_py.so",
        ROOT / "target" / "debug" / "liborbitforge_py.so",
    ]
    built = [p for p in candidates if p.exists()]
    if not built:
        sys.exit(
            "orbitforge_py.so not found; run `cargo build -p orbitforge-py --release` first"
        )
    newest = max(built, key=lambda p: p.stat().st_mtime)
    shutil.copy2(newest, HERE / "orbitforge_py.so")


locate_module()
sys.path.insert(0, str(HERE))

import orbitforge_py as of  # noqa: E402

PI = math.pi
checks = 0


def check(label, ok):
    global checks
    checks += 1
    if not ok:
        sys.exit(f"FAIL: {label}")
    print(f"ok: {label}")


# Orbit enumeration: a three-point orbit with a singular seed.
run = of.enumerate_orbit(
    [(4, 3), (3, 2), (7, 4), (7, 4)], [4 * PI / 3], [0.0]
)
check("type III orbit is finite with 3 points", run.status == "finite" and len(run) == 3)
check("orbit layers close", run.layers == [1, 1, 1, 0])
check("orbit beta values in the finite list", run.beta_membership_ok())
check("orbit JSON round trip mentions status", '"status": "finite"' in run.json())
check("orbit CSV has one row per point", run.csv().count("\n") == 4)
words = sorted(p.word for p in run.points)
check("basepoint carries the empty word", words[0] == "")

# Twisting: the worked example tau_{2,3} step.
beta, gamma = of.twist(
    [(12, 7), (12, 7), (10, 7), (12, 7)], [PI], [3 * PI / 4], "t(2,3)"
)
check(
    "worked-example twist lands on (2pi/3, pi)",
    abs(beta[0] - 2 * PI / 3) < 1e-9 and abs(gamma[0] - PI) < 1e-9,
)
back = of.twist(
    [(12, 7), (12, 7), (10, 7), (12, 7)], beta, gamma, "t(2,3)^-1"
)
check(
    "inverse word returns to the seed",
    abs(back[0][0] - PI) < 1e-9 and abs(back[1][0] - 3 * PI / 4) < 1e-9,
)

# Golden-table verification.
report = of.verify_table(str(ROOT / "data" / "jester.json"))
check(
    "jester table verifies 40/40",
    report["ok"] and report["matched"] == 40 and report["rows"] == 40,
)

# Rendering.
svg = of.render_chain(
    [(12, 7)] * 6,
    [2 * PI / 3, PI, 4 * PI / 3],
    [2 * PI / 3, 0.0, 2 * PI / 3],
    model="disk",
)
check("chain renders to SVG", svg.startswith("<svg") and 'data-name="C1"' in svg)

# Surface words.
check("n=5 has five generators", len(of.generator_names(5)) == 5)
check(
    "sigma rewriting matches the recursion",
    of.sigma_word(1, 3, 5) == "t(1,2)^-1 t(1,3) t(2,3)^-1",
)

# Trigonometric fields.
check("Q(cos(pi/7)) has degree 3", of.field_degree(7) == 3)
check("2cos(2pi/7) lies in Q(cos(pi/7))", of.field_contains(7, 1, 7))
check("2cos(2pi/5) avoids Q(cos(pi/4))", not of.field_contains(4, 1, 5))
check("N=3 angle list", of.field_angles(3) == [(2, 3), (1, 1), (4, 3)])
check("(3, 7/2, 7) triangle group is discrete", of.discrete_triangle(3, (7, 2), 7))
check("(2, 5/2, 6) triangle group is not discrete", not of.discrete_triangle(2, (5, 2), 6))

# Fricke toolkit.
check("Fricke coefficients at zero traces", of.fricke_coefficients(0, 0, 0, 0) == (0, 0, 0, 4))
check("zero traces lift to SU(2)", of.lift_type(0, 0, 0, 0) == "SU(2)")
t = -2 * math.cos(PI / 8)
check("type IV traces lift to SL(2,R)", of.lift_type(t, t, t, 0) == "SL(2,R)")
alpha = of.alpha_from_traces(t, t, t, 0)
expected = [7 * PI / 4, 7 * PI / 4, 7 * PI / 4, PI]
check(
    "angles recovered from traces",
    all(abs(a - e) < 1e-9 for a, e in zip(alpha, expected)),
)
tr = of.traces_from_alpha(expected)
check(
    "traces recovered from angles",
    all(abs(x - y) < 1e-9 for x, y in zip(tr, (t, t, t, 0))),
)
th = of.okamoto_map((0.5, 0.5, 0.5, 0.5))
check("Okamoto fixes the (1/2,...) quadruple shape", all(abs(v - 0.5) < 1e-12 for v in th))
check("theta variants exist for a quarter-turn quadruple", len(of.theta_variants((0.5, 0.5, 0.5, 0.5))) > 0)

print(f"smoke test passed ({checks} checks)")
