"""Acceptance criteria AC-1 .. AC-11.

Each test records one PASS/FAIL line, printed in the terminal summary.
"""

import json
import math
import os
import subprocess
import sys
import time
from contextlib import contextmanager
from fractions import Fraction as F
from pathlib import Path

import pytest
from conftest import ACCEPTANCE_LINES

from quatdom import closed_forms as cf
from quatdom import discrepancies as disc
from quatdom import domains as dm
from quatdom import montecarlo as mc
from quatdom import oracles as oc
from quatdom.exact import ExactValue
from quatdom.quaternion import Quaternion

ROOT = Path(__file__).resolve().parents[1]
SHIPPED = ROOT / "discrepancies.json"
SEED = 20240611
REQUIRED_KEYS = {"claim_id", "paper_location", "variant_values", "oracle_value", "ratio", "verdict"}

pytestmark = pytest.mark.slow


@contextmanager
def criterion(ac):
    info = {"detail": ""}
    ok = False
    try:
        yield info
        ok = True
    finally:
        line = f"{ac} {'PASS' if ok else 'FAIL'}: {info['detail']}"
        ACCEPTANCE_LINES[ac] = line
        print(line)


def shipped_records():
    return {r["claim_id"]: r for r in disc.load(SHIPPED)}


def mc_detail(est, exact):
    z = (est.mean - exact) / est.std_error
    return f"mean={est.mean:.6f} se={est.std_error:.2e} exact={exact:.6f} z={z:+.2f} t={est.wall_time:.0f}s"


def test_ac1_volume_ri11():
    with criterion("AC-1") as c:
        assert cf.eval_J_rect(1, 1, 0) == ExactValue(F(1, 2), 4)
        exact = math.pi**2 / 2
        est = mc.mc_volume(dm.RI(1, 1), 10**7, SEED, workers=1)
        c["detail"] = mc_detail(est, exact)
        assert abs(est.mean - exact) <= 3 * est.std_error
        assert abs(est.mean / exact - 1) < 0.01
        assert est.wall_time < 60


def test_ac2_volume_ri12():
    with criterion("AC-2") as c:
        exact = math.pi**4 / 24
        assert cf.eval_J_rect(1, 2, 0) == ExactValue(F(1, 24), 8)
        est = mc.mc_volume(dm.RI(1, 2), 10**8, SEED, workers=4)
        c["detail"] = mc_detail(est, exact) + " workers=4"
        assert abs(est.mean - exact) <= 3 * est.std_error
        assert est.wall_time < 600


def test_ac3_volume_rii2():
    with criterion("AC-3") as c:
        ref = cf.eval_I_herm(2, 0)
        assert ref == ExactValue(F(16, 45), 4)
        exact = ref.to_float()
        est = mc.mc_volume(dm.RII(2), 10**7, SEED)
        c["detail"] = mc_detail(est, exact)
        assert abs(est.mean - exact) <= 3 * est.std_error


def test_ac4_sym2():
    with criterion("AC-4") as c:
        ref = cf.vol_Sym(2)
        assert ref == ExactValue(F(1, 720), 12)
        exact = ref.to_float()
        est = mc.mc_integral(cf.J_sym(2, 0), 10**8, SEED)
        c["detail"] = mc_detail(est, exact) + f" acceptance={est.n_accepted / est.n_samples:.2e}"
        assert abs(est.mean - exact) <= 3 * est.std_error


def test_ac5_l_four_triple():
    with criterion("AC-5") as c:
        exact = cf.vol_RIV(2).to_float()
        quad = oc.rIV_reduced_oracle(2, 0, 0)
        est = mc.mc_integral(cf.L_four(2, 0, 0), 10**8, SEED)
        mc_ok = abs(est.mean - exact) <= 3 * est.std_error
        quad_ok = abs(quad.value / exact - 1) < 1e-6
        all_agree = mc_ok and quad_ok
        rec = shipped_records().get("L_four.volume.n2")
        c["detail"] = (
            f"closed={exact:.9f} quad={quad.value:.9f} mc={est.mean:.6f}+-{est.std_error:.1e} "
            f"agree={all_agree} report={'present' if rec else 'absent'}"
        )
        assert rec is not None, "discrepancy report missing"
        assert REQUIRED_KEYS <= set(rec)
        # the shipped report must be internally consistent with what we just observed
        assert rec["verdict"] == (disc.AGREES if all_agree else disc.DISCREPANCY)
        assert rec["oracle_value"]["decimal"] == pytest.approx(quad.value, rel=1e-9)
        if not all_agree:
            assert "monte_carlo" in rec


def test_ac6_low_dimensional_oracles():
    with criterion("AC-6") as c:
        t0 = time.perf_counter()
        worst = 0.0
        grids = {
            "quadratic_line": [(1, 0, 1, 2), (1, 0, 1, 1), (2, 1, 3, F(5, 2)), (3, -1, 1, F(3, 4)), (F(1, 2), 2, 9, 4)],
            "quadratic_ball": [(-1, Quaternion(), 1, 0), (-1, Quaternion(), 1, 1), (-2, Quaternion(0, 1, 0, 0), 1, F(1, 2)),
                               (-3, Quaternion(1, 1, 0, 1), 2, 2), (-F(1, 2), Quaternion(0, 0, 2, 0), -1, F(-1, 2))],
            "ball": [(1, 1), (1, 2), (2, F(3, 2)), (3, F(1, 3)), (2, 7)],
        }
        pairs = {
            "quadratic_line": (oc.quadratic_line_oracle, oc.quadratic_line_closed_form),
            "quadratic_ball": (oc.quadratic_ball_oracle, oc.quadratic_ball_closed_form),
            "ball": (oc.ball_integral_oracle, oc.ball_integral_closed_form),
        }
        for name, grid in grids.items():
            oracle, closed = pairs[name]
            for args in grid:
                q = oracle(*args).value
                want = closed(*args)
                worst = max(worst, abs(q / want - 1))
        elapsed = time.perf_counter() - t0
        c["detail"] = f"15 points, worst rel error {worst:.1e}, {elapsed:.2f}s"
        assert worst < 1e-8
        assert elapsed < 30


def test_ac7_h_herm_adjudication():
    with criterion("AC-7") as c:
        fam = cf.H_herm(2, 6)
        values = {v.source: v.value for v in cf.all_variants(fam)}
        assert len(set(values.values())) == 1
        printed = next(iter(values.values())).to_float()
        rep = oc.recursion_check("H_herm", 3, 6)
        recs = shipped_records()
        est = mc.mc_integral_unbounded(fam, 10**8, SEED)
        z = (est.mean - printed) / est.std_error
        c["detail"] = (
            f"n=2 printed={printed:.6f} mc={est.mean:.6f}+-{est.std_error:.1e} z={z:+.1f} "
            f"ratio={est.mean / printed:.4f}; n=3 recursion matches {list(rep.matching_variants)}"
        )
        assert rep.matching_variants == ("statement",)
        assert recs["H_herm.variants.n3"]["matching_variants"] == list(rep.matching_variants)
        assert "verdict" in recs["H_herm.normalization.n2"]
        assert abs(z) <= 3


def test_ac8_quarter_disk_constant():
    with criterion("AC-8") as c:
        consts = {(a, b): oc.quarter_disk_oracle(a, b)[1] for a, b in disc.QUARTER_DISK_GRID}
        vals = list(consts.values())
        spread = max(vals) / min(vals) - 1
        log2 = {k: -math.log2(v) for k, v in consts.items()}
        power_ok = all(abs(x - round(x)) < 1e-8 for x in log2.values())
        rec = shipped_records()["quarter_disk.constant"]
        c["detail"] = (
            f"fitted 2^-k with k={sorted({round(x, 9) for x in log2.values()})}, "
            f"relative spread {spread:.3g}, powers of 1/2: {power_ok}, recorded: {rec['oracle_value']['resolved']}"
        )
        assert power_ok
        assert rec["oracle_value"]["resolved"]
        assert spread < 1e-8


def test_ac9_k_anti_measure():
    with criterion("AC-9") as c:
        ratios = [cf.eval_K_anti(1, lam).to_float() / oc.anti_hermitian_n1_oracle(lam).value for lam in (0, 1, 2)]
        variation = max(ratios) / min(ratios) - 1
        rec = shipped_records()["K_anti.measure.n1"]
        c["detail"] = f"ratio={ratios[0]:.12f} (1/sqrt(3)={3 ** -0.5:.12f}), variation {variation:.1e}, recorded {rec['ratio']}"
        assert variation < 1e-8
        assert rec["ratio"] == pytest.approx(ratios[0], rel=1e-10)


PROPERTY_SELECTION = [
    "tests/test_quaternion.py",
    "tests/test_montecarlo.py::test_determinism",
    "tests/test_montecarlo.py::test_worker_invariance",
    "tests/test_montecarlo.py::test_block_uniforms_match_sequential_stream",
]


def test_ac10_property_suites():
    with criterion("AC-10") as c:
        t0 = time.perf_counter()
        r = subprocess.run(
            [sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider", *PROPERTY_SELECTION],
            cwd=ROOT, capture_output=True, text=True,
        )
        elapsed = time.perf_counter() - t0
        summary = r.stdout.strip().splitlines()[-1] if r.stdout.strip() else r.stderr.strip()[-200:]
        c["detail"] = f"{summary} ({elapsed:.0f}s)"
        assert r.returncode == 0, r.stdout[-3000:]
        assert elapsed < 300


EXACT_SCRIPT = r"""
import json
from fractions import Fraction as F
from quatdom import closed_forms as cf
out = {}
lams = [F(0), F(1, 2), F(1), F(2)]
for n in range(1, 5):
    for m in range(1, 5):
        for lam in lams:
            f = cf.J_rect(m, n, lam)
            out[f.label()] = {v.source: str(v.value) for v in cf.all_variants(f)}
        for k in (F(0), F(1, 2), F(2)):
            f = cf.K_rect(m, n, 2 * m + 2 * n - 1 + k)
            out[f.label()] = {v.source: str(v.value) for v in cf.all_variants(f)}
    for k in (F(0), F(1, 2), F(2)):
        f = cf.H_herm(n, 2 * n + k)
        out[f.label()] = {v.source: str(v.value) for v in cf.all_variants(f)}
    for lam in lams:
        for f in (cf.I_herm(n, lam), cf.J_sym(n, lam), cf.K_anti(n, lam)):
            out[f.label()] = {v.source: str(v.value) for v in cf.all_variants(f)}
    for a in (F(0), F(1)):
        for b in (F(0), F(1, 2), F(2)):
            f = cf.L_four(n, a, b)
            out[f.label()] = {v.source: str(v.value) for v in cf.all_variants(f)}
print(json.dumps(out, sort_keys=True))
"""


def _exact_table(hash_seed):
    env = dict(os.environ, PYTHONHASHSEED=str(hash_seed))
    r = subprocess.run([sys.executable, "-c", EXACT_SCRIPT], capture_output=True, text=True, env=env, check=True)
    return r.stdout


def test_ac11_exact_regression():
    with criterion("AC-11") as c:
        first, second = _exact_table(1), _exact_table(2)
        table = json.loads(first)
        mismatches = []
        for label, variants in table.items():
            tag = label.split("(")[0]
            if tag in ("J_rect", "I_herm", "J_sym") and variants["statement"] != variants["proof_recursion"]:
                mismatches.append(label)
        c["detail"] = (
            f"{len(table)} parameter points, reproducible={first == second}, "
            f"statement!=recursion at {len(mismatches)} points"
            + (f" (e.g. {', '.join(mismatches[:3])})" if mismatches else "")
        )
        assert first == second
        assert all(ExactValue.parse(s) is not None for v in table.values() for s in v.values())
        assert not mismatches
