"""Acceptance criteria, one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v -s``; the lines are also
printed without ``-s``.
"""
import filecmp
import json
import math
import os

import numpy as np
import pytest

from koop import (AffineNilpotentGroup, CircleSpace, KoopmanGroup, RotationFlow, SpecialFlow,
                  SpecialFlowSpace, TransferFunction, WeightedGroup, character,
                  cocycle_from_derivative, cocycle_identity_residual, constant,
                  derivation_residual, derivative_residual, generator_relation_residual,
                  holder_scaling_probe, indicator, inverse_relation_residual, koopman_detector,
                  linf_growth_fit, multiplicativity_residual, multiplier_group,
                  perturbed_derivation_residual, random_bandlimited,
                  riemann_exponent_identity_residual, solve_transfer_function,
                  strip_indicator, trotter_kato_limit_study, trotter_kato_product,
                  uniqueness_crosscheck, unbounded_A1_study, weighted_nonsingular_check)
from koop.cli import main
from koop.groups import estimate_generator
from koop.space import l2, linf

SPACE = CircleSpace(64, 16)
ROT = RotationFlow(SPACE)
COS = 0.5 * (character(SPACE, 1) + character(SPACE, -1))
E1 = character(SPACE, 1)
ONE = constant(SPACE)
GRID_T = [-2.0, -1.0, 0.0, 1.0, 2.0]
# theta o T_t is an exact grid shift at multiples of 2 pi / N
RECON_T = [2 * math.pi * m / 64 for m in (-20, -3, 1, 16, 33)]


@pytest.fixture
def report(capsys):
    def emit(n, checks):
        ok = all(c for _, c in checks)
        detail = "; ".join(f"{label} {'ok' if c else 'FAILED'}" for label, c in checks)
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {n}: {detail}")
        assert ok, detail
    return emit


@pytest.fixture(scope="module")
def gallery_runs(tmp_path_factory):
    base = tmp_path_factory.mktemp("gallery")
    outs, codes = [], []
    for i in range(2):
        out = str(base / f"run{i}")
        codes.append(main(["run", "all", "--out", out]))
        outs.append(out)
    return outs, codes


def _verdicts(out):
    found = {}
    for scen in sorted(os.listdir(out)):
        with open(os.path.join(out, scen, "verdicts.jsonl")) as fh:
            for line in fh:
                d = json.loads(line)
                found[(scen, d["name"])] = d
    return found


def _pairs(count, band, seed=1000):
    return [(random_bandlimited(SPACE, seed + 2 * i, band),
             random_bandlimited(SPACE, seed + 2 * i + 1, band)) for i in range(count)]


def test_criterion_01_koopman_derivation(report):
    U = KoopmanGroup(ROT)
    pairs = _pairs(100, 15)
    der = max(derivation_residual(U, f, g) for f, g in pairs)
    mult = max(multiplicativity_residual(U, t, f, g) for t in (0.3, 1.0, -2.0) for f, g in pairs)
    report(1, [(f"max derivation residual {der:.2e} <= 1e-9", der <= 1e-9),
               (f"max multiplicativity residual {mult:.2e} <= 1e-10", mult <= 1e-10)])


def test_criterion_02_non_koopman_rejection(report):
    Q = multiplier_group(SPACE, lambda k: 1j * k * k)
    r = derivation_residual(Q, E1, E1)
    det = koopman_detector(Q, seed=2000, pairs=50, band=15)
    report(2, [(f"derivation residual(e1, e1) = {r:.12f} within 1e-10 of 2", abs(r - 2) <= 1e-10),
               (f"detector rejects (residual {det.residual:.3g})", not det.passed)])


def test_criterion_03_cocycle_calculus(report):
    psi = cocycle_from_derivative(ROT, COS)
    v = complex(psi(math.pi / 2).samples[0])
    ident = max(cocycle_identity_residual(psi, t, s) for t in GRID_T for s in GRID_T)
    inv = max(inverse_relation_residual(psi, t) for t in GRID_T)
    dts = [1e-1, 1e-2, 1e-3]
    dres = [derivative_residual(psi, COS, t) for t in dts]
    orders = [math.log10(a / b) for a, b in zip(dres, dres[1:])]
    uq = uniqueness_crosscheck(ROT, COS, 1.0)
    report(3, [(f"psi_(pi/2)(1) - e = {abs(v - math.e):.1e}", abs(v - math.e) <= 1e-10),
               (f"cocycle identity {ident:.1e} <= 1e-10", ident <= 1e-10),
               (f"inverse relation {inv:.1e} <= 1e-10", inv <= 1e-10),
               (f"derivative orders {[round(o, 3) for o in orders]} = 1 +- 0.1",
                all(abs(o - 1) <= 0.1 for o in orders)),
               (f"uniqueness {uq:.1e} <= 1e-8", uq <= 1e-8)])


def test_criterion_04_trotter_kato(report):
    rie = max(riemann_exponent_identity_residual(ROT, COS, 1.0, n, E1) for n in (1, 16, 128))
    ns = [8, 16, 32, 64, 128, 256, 512, 1024]
    table = trotter_kato_limit_study(ROT, COS, 1.0, ns)
    final = table.rows[-1][1]
    psi1 = cocycle_from_derivative(ROT, COS)(1.0)
    hi, lo = (trotter_kato_product(ROT, COS, 1.0, n, ONE) for n in (1024, 512))
    limit = l2(2 * hi - lo - psi1)
    report(4, [(f"Riemann identity {rie:.1e} <= 1e-10", rie <= 1e-10),
               (f"orders {min(table.orders):.3f}..{max(table.orders):.3f} = 1 +- 0.15",
                all(abs(o - 1) <= 0.15 for o in table.orders)),
               (f"final error {final:.2e} <= 1e-3", final <= 1e-3),
               (f"extrapolated limit vs psi_1 {limit:.1e} <= 1e-5", limit <= 1e-5)])


def test_criterion_05_generator_relation(report):
    psi = cocycle_from_derivative(ROT, COS)
    W, K = WeightedGroup(ROT, psi), KoopmanGroup(ROT)
    pd = max(perturbed_derivation_residual(W, COS, f, g) for f, g in _pairs(100, 15))
    exact = generator_relation_residual(W, K, COS, E1)

    def est(group):
        return lambda f: estimate_generator(group, f, 1e-3, "central").estimate

    approx = generator_relation_residual(est(W), est(K), est(W)(ONE), E1)
    report(5, [(f"perturbed derivation {pd:.1e} <= 1e-9", pd <= 1e-9),
               (f"exact generator relation {exact:.1e} <= 1e-10", exact <= 1e-10),
               (f"h=1e-3 generator relation {approx:.1e} <= 1e-5", approx <= 1e-5)])


def test_criterion_06_nilpotent(report):
    B = indicator(SPACE, SPACE.points < math.pi)
    G = AffineNilpotentGroup(B)
    u = G.apply(-2.0, ONE)
    exact = np.array_equal(u.samples, B.samples)
    ns = weighted_nonsingular_check(G, [-2.0])
    zs = ns.context["zero_set_measure"]
    fit = linf_growth_fit(G, [-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0])
    finite = math.isfinite(fit.M) and math.isfinite(fit.omega) and fit.envelope_ok()
    report(6, [(f"mu(B) = {G.mu_b}", G.mu_b == 0.5),
               ("U_(-2) 1 = 1_B bitwise", exact),
               (f"nonsingular check fails, zero-set measure {zs}", not ns.passed and zs == 0.5),
               (f"finite growth fit M={fit.M:.4g}, omega={fit.omega:.4g}", finite)])


def test_criterion_07_special_flow_scaling(report):
    base = SpecialFlowSpace(512, (math.sqrt(5) - 1) / 2, 1.0, 1000, 0.99)
    flow = SpecialFlow(base)
    g = strip_indicator(base, 0.3, 0.5)
    ts = [q * 1e-3 for q in (1, 2, 3, 5, 10, 20, 30, 50, 100)]
    strip = holder_scaling_probe(flow, g, ts).exponent
    val = l2(g - flow.apply(0.02, g))
    ctrl = holder_scaling_probe(ROT, E1, ts).exponent
    report(7, [(f"strip exponent {strip:.4f} = 0.5 +- 0.05", abs(strip - 0.5) <= 0.05),
               (f"norm at t=0.02 {val:.6f} = 0.2 +- 5%", abs(val / 0.2 - 1) <= 0.05),
               (f"rotation control exponent {ctrl:.4f} = 1 +- 0.05", abs(ctrl - 1) <= 0.05)])


def test_criterion_08_winding_obstruction(report):
    planted = [0, 1j, 2j, 1, 0.5 + 1j]
    correct, recon = 0, 0.0
    for i in range(20):
        mu = planted[i % 5]
        z = mu + random_bandlimited(SPACE, 3000 + i, 8, mean_zero=True, scale=0.5)
        sol = solve_transfer_function(ROT, z)
        truth = mu.real == 0 and float(mu.imag).is_integer()
        found = isinstance(sol, TransferFunction)
        correct += found == truth
        if found:
            psi = cocycle_from_derivative(ROT, z)
            rebuilt = sol.cocycle(ROT)
            recon = max(recon, max(l2(rebuilt(t) - psi(t)) for t in RECON_T))
    report(8, [(f"{correct}/20 correct decisions", correct == 20),
               (f"coboundary reconstruction {recon:.1e} <= 1e-10", recon <= 1e-10)])


def test_criterion_09_unbounded_a1(report):
    rep = unbounded_A1_study([16, 64, 256], [1e-2, 1e-3])
    C = 100.0
    worst = max(r / (C * t) for _, t, r, _, _ in rep.rows)
    per_k = ", ".join(f"K={k}: {v:.3g}" for k, v in sorted(rep.per_K_constant.items()))
    report(9, [(f"r <= C t with one C = {C:g} (per-K constants {per_k})", worst <= 1.0),
               (f"sup-norm growth factor {rep.growth_factor:.3f} >= 2", rep.growth_factor >= 2)])


def test_criterion_10_bounds(report, gallery_runs):
    found = _verdicts(gallery_runs[0][0])
    rn = {k: v for k, v in found.items() if k[1].startswith("rn_")}
    rn_ok = bool(rn) and all(v["pass"] for v in rn.values())
    U = KoopmanGroup(ROT)
    ts = [2 * math.pi * s / 64 for s in (-16, -8, -4, -2, -1, 0, 1, 2, 4, 8, 16)]
    fu = linf_growth_fit(U, ts)
    W1 = WeightedGroup(ROT, cocycle_from_derivative(ROT, constant(SPACE, 1.0)))
    f1 = linf_growth_fit(W1, ts)
    report(10, [(f"{len(rn)} rn bound/equality verdicts across the gallery pass", rn_ok),
                (f"unitary fit (M, omega) = ({fu.M:.9f}, {fu.omega:.1e})",
                 abs(fu.M - 1) <= 1e-6 and abs(fu.omega) <= 1e-6),
                (f"zeta = 1 fit omega = {f1.omega:.9f}", abs(f1.omega - 1) <= 1e-3)])


def test_criterion_11_determinism(report, gallery_runs):
    (a, b), codes = gallery_runs
    mismatched = []
    for scen in sorted(os.listdir(a)):
        for root, _, files in os.walk(os.path.join(a, scen)):
            for name in files:
                if name == "timing.json":
                    continue
                pa = os.path.join(root, name)
                pb = os.path.join(b, os.path.relpath(pa, a))
                if not (os.path.exists(pb) and filecmp.cmp(pa, pb, shallow=False)):
                    mismatched.append(os.path.relpath(pa, a))
    report(11, [(f"{len(os.listdir(a))} scenario reports byte-identical", not mismatched),
                (f"exit codes {codes}", codes == [0, 0])])
