"""Go/no-go acceptance gate: twelve checks, one printed line each.

Every expected value here was either derived in closed form or computed by an
independent oracle (adaptive quadrature, dense least squares, exact Fraction
arithmetic) before being frozen.  Each check prints a single
``criterion NN (name): PASS/FAIL`` line and asserts on it, so a red criterion
is visible in the failure message, not only in the captured output.
"""

from __future__ import annotations

import json
import math
import time
import warnings
from fractions import Fraction as F

import numpy as np
import pytest
from scipy.integrate import IntegrationWarning, quad
from scipy.special import gamma as gamma_fn

from hblab.circlesets import (
    CantorMeasurePart,
    CircleSet,
    RatioSchedule,
    SingularMeasureSpec,
    bc_entropy,
    decompose_measure,
)
from hblab.classify import corollary_classifier
from hblab.cli import _default_scenario, main
from hblab.embedding import (
    annihilator_check,
    division_diagnostic,
    j_embedding_solve,
    kernel_embedding_pair,
    kernel_gram,
)
from hblab.moments import (
    build_mu,
    cyclicity_indicator,
    gram_matrix,
    splitting_indicator,
)
from hblab.scenarios import KINDS, scenario_to_json
from hblab.symbols import (
    DiskSeries,
    OuterProfile,
    SymbolSpec,
    delta_weight,
    symbol_eval,
)
from hblab.xalpha import disk_moment


def _check(num: int, name: str, ok: bool, detail: str = "") -> None:
    line = f"criterion {num:2d} ({name}): {'PASS' if ok else 'FAIL'} - {detail}"
    print(line)
    assert ok, line


def _monomial(k: int) -> DiskSeries:
    c = np.zeros(k + 1, dtype=complex)
    c[k] = 1.0
    return DiskSeries(c)


# ---------------------------------------------------------------------------
# 1. radial moments against adaptive quadrature and closed forms


def test_criterion_01_moment_closed_form():
    t0 = time.perf_counter()
    worst_quad = 0.0
    with warnings.catch_warnings():
        # the alpha=0.5 endpoint singularity trips quad's extrapolation
        # warning long after the value is converged past 1e-10
        warnings.simplefilter("ignore", IntegrationWarning)
        for alpha in (0.5, 1.0, 2.0, 3.5):
            vals = disk_moment(np.arange(201), alpha)
            for n in range(201):
                q, _ = quad(
                    lambda s: s**n * (1.0 - s) ** (alpha - 1.0),
                    0.0,
                    1.0,
                    epsabs=1e-14,
                    epsrel=1e-13,
                    limit=200,
                )
                worst_quad = max(worst_quad, abs(vals[n] - q) / q)
    ns = np.arange(201)
    dev2 = float(np.max(np.abs(disk_moment(ns, 2.0) * (ns + 1.0) * (ns + 2.0) - 1.0)))
    dev1 = float(np.max(np.abs(disk_moment(ns, 1.0) * (ns + 1.0) - 1.0)))
    elapsed = time.perf_counter() - t0
    ok = worst_quad <= 1e-10 and dev2 <= 1e-14 and dev1 <= 1e-14 and elapsed < 1.0
    _check(
        1,
        "moment closed form",
        ok,
        f"quad rel {worst_quad:.2e} <= 1e-10; 1/((n+1)(n+2)) dev {dev2:.1e} and "
        f"1/(n+1) dev {dev1:.1e} <= 1e-14 (n <= 200); {elapsed:.2f}s < 1s",
    )


# ---------------------------------------------------------------------------
# 2. coefficient-norm equivalence band (n+1)^alpha beta_n -> Gamma(alpha)


def test_criterion_02_norm_equivalence_band():
    t0 = time.perf_counter()
    details = []
    ok = True
    for alpha in (0.5, 1.0, 2.0, 3.5):
        n = np.arange(0, 10_001)
        x = (n + 1.0) ** alpha * disk_moment(n, alpha)
        lim = float(gamma_fn(alpha))
        # n = 0 sits outside the factor-10 band at alpha = 3.5 (ratio 11.6);
        # the band is asserted from n = 1 on, where it holds with margin
        band_ok = bool(np.all(x[1:] > lim / 10.0) and np.all(x[1:] < lim * 10.0))
        dev = np.abs(x - lim)
        settle_ok = bool(np.all(np.diff(dev[1:]) <= 1e-12 * lim))
        final_rel = float(dev[-1] / lim)
        ok = ok and band_ok and settle_ok and final_rel <= 1e-3
        details.append(f"a={alpha}: band {band_ok}, settling {settle_ok}, "
                       f"final rel {final_rel:.1e}")
    elapsed = time.perf_counter() - t0
    ok = ok and elapsed < 1.0
    _check(2, "norm equivalence band", ok,
           "; ".join(details) + f"; {elapsed:.2f}s < 1s")


# ---------------------------------------------------------------------------
# 3. Gram matrix against direct quadrature of the mixed measure


def test_criterion_03_gram_oracle_equivalence():
    t0 = time.perf_counter()
    pieces = ((F(1, 10), F(1, 4), 0.5), (F(1, 2), F(1, 8), 0.25))
    spec = SymbolSpec(outer=OuterProfile.arc_step(pieces))
    deg = 8
    worst = 0.0
    for alpha in (1.0, 2.5):
        G = gram_matrix(build_mu(delta_weight(spec, 256), alpha, deg), deg).entries
        radial = {}
        for s in range(2 * deg + 1):
            q, _ = quad(
                lambda u: u ** (0.5 * s) * (1.0 - u) ** (alpha - 1.0),
                0.0, 1.0, epsabs=1e-14, epsrel=1e-13, limit=200,
            )
            radial[s] = q
        for r in range(deg + 1):
            for c in range(deg + 1):
                disk = radial[r + c] if r == c else 0.0
                k = c - r
                bdy = 0.0 + 0.0j
                for ps, pl, pv in pieces:
                    d2v = 1.0 - pv * pv
                    a = 2.0 * math.pi * float(ps)
                    w = 2.0 * math.pi * float(pl)
                    qre, _ = quad(lambda th: math.cos(k * th), a, a + w,
                                  epsabs=1e-13, epsrel=1e-12, limit=400)
                    qim, _ = quad(lambda th: math.sin(k * th), a, a + w,
                                  epsabs=1e-13, epsrel=1e-12, limit=400)
                    bdy += d2v * (qre - 1j * qim) / (2.0 * math.pi)
                worst = max(worst, abs(G[r, c] - (disk + bdy)))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-8 and elapsed < 30.0
    _check(3, "gram oracle equivalence", ok,
           f"two-piece weight, N=8, alpha in (1, 2.5): worst entry "
           f"{worst:.1e} <= 1e-8; {elapsed:.2f}s < 30s")


# ---------------------------------------------------------------------------
# 4. kernel positivity over random symbol mixes


def test_criterion_04_kernel_psd():
    t0 = time.perf_counter()
    rng = np.random.default_rng(20260822)
    outers = (
        OuterProfile.one,
        lambda: OuterProfile.constant(0.9),
        lambda: OuterProfile.arc_step(((F(1, 10), F(1, 4), 0.5),)),
        lambda: OuterProfile.smooth_dip(0.5, 0.2, 0.75),
        OuterProfile.cos_half,
    )
    worst = 0.0
    for _ in range(100):
        nz = int(rng.integers(0, 3))
        zr = 0.8 * np.sqrt(rng.random(nz))
        za = 2.0 * np.pi * rng.random(nz)
        zeros = tuple((complex(r * np.exp(1j * a)), 1) for r, a in zip(zr, za))
        atoms = ()
        if rng.random() < 0.4:
            atoms = ((float(rng.random()), float(rng.uniform(0.05, 0.4))),)
        spec = SymbolSpec(
            zeros=zeros,
            singular=SingularMeasureSpec.from_parts(atoms=atoms),
            outer=outers[int(rng.integers(0, len(outers)))](),
            scale=0.97 if rng.random() < 0.3 else 1.0,
        )
        npts = int(rng.integers(1, 9))
        pts = 0.9 * np.sqrt(rng.random(npts)) * np.exp(2j * np.pi * rng.random(npts))
        kg = kernel_gram(spec, pts)  # raises if positivity fails internally
        worst = min(worst, kg.min_eigenvalue() / max(kg.trace(), 1e-30))
    elapsed = time.perf_counter() - t0
    ok = worst >= -1e-8 and elapsed < 10.0
    _check(4, "kernel psd", ok,
           f"100 random configs: worst min-eig/trace {worst:.1e} >= -1e-8; "
           f"{elapsed:.2f}s < 10s")


# ---------------------------------------------------------------------------
# 5. embedding identities: closed-form pair vs least squares, isometry,
#    annihilator pairings


def test_criterion_05_embedding_identities():
    t0 = time.perf_counter()
    spec = SymbolSpec(outer=OuterProfile.smooth_dip(0.5, 0.2, 0.75))
    lam = 0.3 - 0.2j

    pair, hb2, _ev = kernel_embedding_pair(spec, lam, 4096)
    rep = j_embedding_solve(spec, pair.f, m=4096, target_hb_norm2=hb2)
    gap = float(np.sqrt(np.mean(
        np.abs(np.asarray(rep.pair.g) - np.asarray(pair.g)) ** 2)))
    iso_a = float(rep.isometry_defect)

    rng = np.random.default_rng(5)
    worst_iso = 0.0
    for _ in range(20):
        z = 0.9 * math.sqrt(rng.random()) * np.exp(2j * np.pi * rng.random())
        p2, h2, _ = kernel_embedding_pair(spec, complex(z), 2048)
        worst_iso = max(worst_iso, abs(p2.f_norm() ** 2 + p2.g_norm() ** 2 - h2) / h2)

    half = rep.n_g // 2
    degs = sorted({0, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144, 233, 377, half})
    worst_ann = max(
        abs(annihilator_check(spec, rep.pair, _monomial(k))) for k in degs
    )
    bound = 1e-8 + rep.residual

    elapsed = time.perf_counter() - t0
    ok = (gap <= 1e-4 and iso_a <= 1e-8 and worst_iso <= 1e-6
          and worst_ann <= bound and elapsed < 60.0)
    _check(5, "embedding identities", ok,
           f"closed form vs solver gap {gap:.1e} <= 1e-4, isometry {iso_a:.1e}"
           f" <= 1e-8; 20-point isometry {worst_iso:.1e} <= 1e-6; annihilator "
           f"{worst_ann:.1e} <= {bound:.1e} up to degree {half}; "
           f"{elapsed:.1f}s < 60s")


# ---------------------------------------------------------------------------
# 6. division diagnostic on exact multiples and the shift counterexample


def test_criterion_06_division_diagnostic():
    t0 = time.perf_counter()
    rng = np.random.default_rng(6)
    m = 512
    ring = np.exp(2j * np.pi * np.arange(m) / m)
    worst = 0.0
    for _ in range(50):
        nz = int(rng.integers(1, 5))
        zeros = tuple(
            (complex(rng.uniform(-0.6, 0.6), rng.uniform(-0.6, 0.6)), 1)
            for _ in range(nz)
        )
        theta = SymbolSpec(zeros=zeros)
        coeffs = rng.normal(size=int(rng.integers(1, 8))) * (1 + 0j)
        coeffs = coeffs + 1j * rng.normal(size=coeffs.shape)
        fvals = symbol_eval(theta, m).values * DiskSeries(coeffs)(ring)
        val = float(division_diagnostic(theta, fvals))
        worst = max(worst, val / float(np.linalg.norm(coeffs)))
    shift_dev = abs(
        float(division_diagnostic(SymbolSpec(zeros=((0.0, 1),)), np.ones(m))) - 1.0
    )
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-8 and shift_dev <= 1e-12 and elapsed < 10.0
    _check(6, "division diagnostic", ok,
           f"50 exact multiples: worst residual/|p| {worst:.1e} <= 1e-8; "
           f"constant-by-shift value |v-1| = {shift_dev:.1e} <= 1e-12; "
           f"{elapsed:.2f}s < 10s")


# ---------------------------------------------------------------------------
# 7. complement-arc entropy: convergent, exact, and divergent families


def test_criterion_07_entropy():
    t0 = time.perf_counter()
    lim = 3.0 * math.log(3.0)

    # exact tail of the stage sums: sum_{k>d} (k log3 / 2) (2/3)^k
    def tail(d: int) -> float:
        return 0.5 * math.log(3.0) * 9.0 * (2.0 / 3.0) ** (d + 1) * (d / 3.0 + 1.0)

    shallow = bc_entropy(CircleSet.cantor((0, 1), ratio=F(1, 3), depth=8), depth=40)
    deficit40 = lim - shallow.value
    deep = bc_entropy(CircleSet.cantor((0, 1), ratio=F(1, 3), depth=8), depth=45)
    deficit45 = lim - deep.value
    # the derived tail puts depth 40 at 4.3e-6, so the 1e-6 target needs
    # depth 45; both deficits are pinned to the closed-form tail
    tail_ok = (deficit40 == pytest.approx(tail(40), rel=1e-3)
               and deficit45 == pytest.approx(tail(45), rel=1e-3))
    conv_ok = deep.classification == "convergent" and deficit45 <= 1e-6

    arc = bc_entropy(CircleSet.from_arcs([(F(0), F(1, 2))]))
    arc_ok = arc.value == 0.5 * math.log(2.0) and arc.term_count == 1

    slow = CircleSet.cantor(
        (0, 1), schedule=RatioSchedule(kind="power", c=0.5, p=1.0), depth=8
    )
    div = bc_entropy(slow, depth=60)
    s = div.partial_sums
    growth = (s[60] - s[30]) / (s[30] - s[0])
    div_ok = (div.classification == "divergent" and div.limit is None
              and div.term_count >= 10**3 and bool(np.all(np.diff(s) > 0))
              and growth > 0.25)

    elapsed = time.perf_counter() - t0
    ok = tail_ok and conv_ok and arc_ok and div_ok and elapsed < 1.0
    _check(7, "complement entropy", ok,
           f"middle-thirds deficit {deficit40:.2e} at depth 40 (= derived "
           f"tail) and {deficit45:.2e} <= 1e-6 at depth 45; single arc exact "
           f"(1/2)log2; divergent family: {div.term_count} terms, sums "
           f"increasing, late/early growth {growth:.3f} > 0.25; "
           f"{elapsed:.2f}s < 1s")


# ---------------------------------------------------------------------------
# 8. measure decomposition conserves mass exactly


def test_criterion_08_decomposition_conservation():
    t0 = time.perf_counter()
    checked = 0
    for i in range(20):
        start = F(i, 40)
        thin = CircleSet.cantor((start, F(1, 16)), ratio=F(1, 4), depth=3)
        div = CircleSet.cantor(
            (start + F(1, 2), F(1, 16)),
            schedule=RatioSchedule(kind="power", c=0.5, p=1.0),
            depth=3,
        )
        atoms = ((float(F(i + 1, 80)), 0.25),)
        if i % 2:
            atoms = atoms + ((float(F(i + 21, 80)), 0.5),)
        parts = []
        if i % 3:
            parts.append(CantorMeasurePart(support=thin, mass=F(1, 3)))
        if i % 4:
            parts.append(CantorMeasurePart(support=div, mass=F(2, 7)))
        nu = SingularMeasureSpec(atoms=atoms, cantor_parts=tuple(parts))
        rep = decompose_measure(nu)
        defect = rep.mass_conservation_defect_exact(nu.total_mass_exact())
        assert defect == F(0), f"spec {i}: defect {defect}"
        assert set(rep.nu_c.atoms) == set(nu.atoms)
        assert rep.nu_k.atoms == ()
        n_div = sum(1 for p in parts if p.support.schedule.kind == "power")
        assert len(rep.nu_k.cantor_parts) == n_div
        checked += 1
    elapsed = time.perf_counter() - t0
    ok = checked == 20 and elapsed < 1.0
    _check(8, "decomposition conservation", ok,
           f"{checked} mixed specs: exact Fraction defect 0, atoms always in "
           f"the entropy-supported part; {elapsed:.2f}s < 1s")


# ---------------------------------------------------------------------------
# 9. splitting-distance dichotomy: deep-notch weight vs matched arc weight


def test_criterion_09_splitting_dichotomy():
    t0 = time.perf_counter()
    m, deg = 4096, 60
    cant = CircleSet.cantor((0, 1), ratio=F(1, 3), depth=4)
    vol = SymbolSpec(outer=OuterProfile.volberg(cant, gamma=4.0, amplitude=1.0))
    dv = delta_weight(vol, m)
    mass_vol = float(np.mean(np.asarray(dv.values) ** 2))
    v_arc = 4.0 * mass_vol  # arc of length 1/4 carrying the same total mass
    assert v_arc < 1.0
    arc = SymbolSpec(
        outer=OuterProfile.arc_step(((F(1, 10), F(1, 4), math.sqrt(1.0 - v_arc)),))
    )
    da = delta_weight(arc, m)
    mass_arc = float(np.mean(np.asarray(da.values) ** 2))
    assert mass_arc == pytest.approx(mass_vol, rel=1e-3)

    seqs = {}
    for name, dw in (("vol", dv), ("arc", da)):
        mu = build_mu(dw, 1.0, deg)
        target = (np.asarray(dw.values) > 0).astype(float)
        seqs[name] = splitting_indicator(mu, target, deg)
    rv, ra = seqs["vol"].fit_rate, seqs["arc"].fit_rate
    d40, d60 = float(seqs["arc"].values[40]), float(seqs["arc"].values[60])

    elapsed = time.perf_counter() - t0
    ok = (rv < 0.0 and ra < 0.0 and rv < 2.0 * ra
          and abs(d60 - d40) <= 0.05 * d40 and d60 >= 0.1
          and elapsed < 300.0)
    _check(9, "splitting dichotomy", ok,
           f"matched mass {mass_vol:.4f}: deep-notch rate {rv:.4f} vs arc "
           f"rate {ra:.4f} (>2x steeper); arc floor d60={d60:.3f} with "
           f"|d60-d40| = {abs(d60 - d40):.4f} <= {0.05 * d40:.4f}; "
           f"{elapsed:.1f}s < 300s")


# ---------------------------------------------------------------------------
# 10. cyclicity distances: collapse for the unit symbol, flat for the shift


def test_criterion_10_cyclicity_sanity():
    t0 = time.perf_counter()
    one = SymbolSpec()
    mu1 = build_mu(delta_weight(one, 256), 1.0, 20)
    unit_max = float(np.max(cyclicity_indicator(mu1, one, 20).values))

    # pure-disk measure: the constant is orthogonal to every shifted
    # monomial, so d_n^2 stays at the squared constant norm 1/2
    shift = SymbolSpec(zeros=((0.0, 1),))
    mu2 = build_mu(delta_weight(shift, 256), 2.0, 20)
    seq = cyclicity_indicator(mu2, shift, 20)
    flat_dev = float(np.max(np.abs(seq.values**2 - 0.5)))

    elapsed = time.perf_counter() - t0
    ok = unit_max <= 1e-5 and flat_dev <= 1e-8 and elapsed < 10.0
    _check(10, "cyclicity sanity", ok,
           f"unit symbol max d {unit_max:.1e} <= 1e-5 (regularization "
           f"floor); shift d^2 dev from 1/2 is {flat_dev:.1e} <= 1e-8 for "
           f"n <= 20; {elapsed:.2f}s < 10s")


# ---------------------------------------------------------------------------
# 11. classifier never asserts both density and its negation


def test_criterion_11_classifier_consistency():
    t0 = time.perf_counter()
    thin = CircleSet.cantor((0, F(1, 3)), ratio=F(1, 3), depth=4)
    div_inside = CircleSet.cantor(
        (F(1, 8), F(1, 8)), schedule=RatioSchedule(kind="power", c=0.5, p=1.0),
        depth=4,
    )
    div_far = CircleSet.cantor(
        (F(1, 2), F(1, 4)), schedule=RatioSchedule(kind="power", c=0.5, p=1.0),
        depth=4,
    )
    notch = CircleSet.cantor((0, 1), ratio=F(1, 3), depth=3)
    outers = [
        OuterProfile.one(),
        OuterProfile.constant(0.9),
        OuterProfile.constant(0.99),
        OuterProfile.arc_step(((F(1, 10), F(1, 4), 0.5),)),
        OuterProfile.arc_step(((F(1, 10), F(1, 4), 0.8),)),
        OuterProfile.smooth_dip(0.5, 0.2, 0.75),
        OuterProfile.smooth_dip(0.3, 0.1, 0.5),
        OuterProfile.cantor_step(thin, 0.5),
        OuterProfile.volberg(notch, gamma=3.0, amplitude=1.0),
        OuterProfile.cos_half(),
    ]
    singulars = [
        SingularMeasureSpec(),
        SingularMeasureSpec(atoms=((0.7, 0.2),)),
        SingularMeasureSpec(
            cantor_parts=(CantorMeasurePart(support=div_inside, mass=F(1, 2)),)
        ),
        SingularMeasureSpec(
            cantor_parts=(CantorMeasurePart(support=div_far, mass=F(1, 2)),)
        ),
        SingularMeasureSpec(
            cantor_parts=(CantorMeasurePart(support=thin, mass=F(1, 4)),)
        ),
    ]
    counts: dict = {}
    for outer in outers:
        for singular in singulars:
            spec = SymbolSpec(singular=singular, outer=outer)
            v = corollary_classifier(spec, 1.0)
            holds = {c.name: c.holds for c in v.checklist}
            recipe = (
                holds.get("boundary-weight-present") is not False
                and holds.get("log-weight-integrable") is True
                and holds.get("carrier-has-bc-subset") is True
                and holds.get("candidates-confined-to-carrier") is not False
                and holds.get("finite-blaschke-part") is not False
            )
            negative = (
                holds.get("candidate-mass-off-support") is True
                or holds.get("carrier-has-bc-subset") is False
            )
            assert not (recipe and negative), (
                f"contradictory checklist for outer={outer.kind}: {holds}"
            )
            if v.prediction == "dense":
                assert not negative, f"dense verdict with negative trigger: {holds}"
            if v.prediction == "not-dense":
                assert negative, f"not-dense verdict without trigger: {holds}"
            counts[v.prediction] = counts.get(v.prediction, 0) + 1
    total = sum(counts.values())
    elapsed = time.perf_counter() - t0
    ok = total == 50 and elapsed < 60.0
    _check(11, "classifier consistency", ok,
           f"{total} specs, no contradictions; verdicts {sorted(counts.items())}; "
           f"{elapsed:.1f}s < 60s")


# ---------------------------------------------------------------------------
# 12. deterministic reruns of the full scenario suite


def test_criterion_12_determinism(tmp_path, capsys):
    t0 = time.perf_counter()
    docs = []
    for kind in KINDS:
        doc = scenario_to_json(_default_scenario(kind))
        p = tmp_path / f"{kind}.json"
        p.write_text(json.dumps(doc))
        docs.append((doc["name"], str(p)))
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    code_a = main(["suite", *(p for _n, p in docs), "--out", str(out_a)])
    code_b = main(["suite", *(p for _n, p in docs), "--out", str(out_b)])
    capsys.readouterr()
    identical = 0
    for name, _p in docs:
        ba = (out_a / f"{name}.csv").read_bytes()
        bb = (out_b / f"{name}.csv").read_bytes()
        assert ba == bb, f"CSV for {name} differs between reruns"
        identical += 1
    elapsed = time.perf_counter() - t0
    ok = code_a == 0 and code_b == 0 and identical == len(KINDS)
    _check(12, "determinism", ok,
           f"suite rerun: {identical}/{len(KINDS)} CSV bodies byte-identical, "
           f"exit codes 0/0; {elapsed:.1f}s")
