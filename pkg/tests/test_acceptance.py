"""End-to-end acceptance checks, one test per criterion.

Each test prints a single line ``criterion N: PASS|FAIL  <seconds>  <detail>``
(visible with ``pytest -s`` or in the summary of ``pytest -v -rA``) and
fails if any check or the time limit is missed.
"""

import hashlib
import time

import numpy as np
import pytest

from engelflex import io
from engelflex.curves import (
    EVERYWHERE_TANGENT,
    degenerate_cells,
    family_distance,
    horizontality_residual,
    make_generic,
    reparametrize,
    rotation_number,
    tangency_locus,
    transverse_residual,
)
from engelflex.errors import RotationMismatch, StrictConformal, SubcriticalDomain
from engelflex.fronts import admissible_front, positive_area_certificate, signed_area
from engelflex.geiges import front_signed_area, geiges_lift, geiges_project, lift_defect
from engelflex.homotopy import connect_loops, verify_family
from engelflex.loops import bump, degenerate_family, random_loop, standard_loop
from engelflex.models import (
    cartan_d0,
    darboux,
    growth_vectors,
    intertwining_residual,
    lorentzian,
    mapping_torus,
)
from engelflex.quadrature import leapfrog, loop_integral
from engelflex.rigidity import (
    build_example4,
    build_example5,
    deformation_residual,
    example5_area_identity,
    lemma2_search,
    prop7_deform,
    random_linear_contact,
)


class Criterion:
    """Collects checks for one criterion and prints a pass/fail line."""

    def __init__(self, number, limit, capsys):
        self.number, self.limit, self.capsys = number, limit, capsys
        self.failures, self.notes = [], []

    def check(self, ok, what):
        if not ok:
            self.failures.append(what)

    def note(self, text):
        self.notes.append(text)

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.start
        if exc is not None:
            self.failures.append(f"{exc_type.__name__}: {exc}")
        if elapsed > self.limit:
            self.failures.append(f"took {elapsed:.1f}s > {self.limit:g}s")
        status = "FAIL" if self.failures else "PASS"
        detail = "; ".join(self.failures or self.notes)
        with self.capsys.disabled():
            print(f"\ncriterion {self.number:2d}: {status}  {elapsed:7.2f}s (limit {self.limit:g}s)  {detail}")
        if exc is None and self.failures:
            pytest.fail("; ".join(self.failures))
        return False


def sha(path):
    return hashlib.sha256(path.read_bytes()).hexdigest()


def tree_digest(root):
    return {p.relative_to(root).as_posix(): sha(p) for p in sorted(root.rglob("*")) if p.is_file()}


@pytest.fixture(scope="module")
def outputs(tmp_path_factory):
    return {}


# ---------------------------------------------------------------------------
# criteria


def test_criterion_01_growth_vector(capsys):
    rng = np.random.default_rng(1)
    models = {
        "darboux": darboux(),
        "lorentzian": lorentzian(),
        "cartan_d0": cartan_d0(),
        "mapping_torus_pi_t": mapping_torus("pi_t"),
    }
    with Criterion(1, 5.0, capsys) as c:
        worst_kept, worst_dropped = np.inf, 0.0
        for name, m in models.items():
            pts = rng.uniform(-1, 1, size=(100, 4))
            if name.startswith("mapping"):
                pts[:, 3] = rng.uniform(0, 1, size=100)
            for p, g in zip(pts, growth_vectors(m, pts)):
                c.check(g.ranks == (2, 3, 4), f"{name} growth {g.ranks} at {p}")
                worst_kept = min(worst_kept, g.min_kept)
                worst_dropped = max(worst_dropped, g.max_dropped)
        c.check(worst_kept >= 10, f"kept singular value only {worst_kept:.3g}x threshold")
        c.check(worst_dropped <= 0.1, f"dropped singular value {worst_dropped:.3g}x threshold")
        c.note(f"400 points, min kept {worst_kept:.3g}x threshold")


def test_criterion_02_intertwining(capsys):
    rng = np.random.default_rng(2)
    with Criterion(2, 1.0, capsys) as c:
        r = intertwining_residual(rng.uniform(-1, 1, size=(100, 4)))
        c.check(r < 1e-9, f"residual {r:.3g}")
        c.note(f"max residual {r:.3g}")


def criterion3_run(out_dir):
    """50 seeded loops: project, lift, and the area-defect identity."""
    m = darboux()
    out_dir.mkdir(parents=True, exist_ok=True)
    worst_rt, worst_area = 0.0, 0.0
    for k in range(50):
        rng = np.random.default_rng(300 + k)
        c = random_loop(int(rng.integers(-3, 4)), rng, 2048)
        assert horizontality_residual(c, m) < 1e-6
        l = geiges_project(c)
        back = geiges_lift(l, y0=c.y[0])
        worst_rt = max(worst_rt, float(np.max(np.abs(back.points - c.points))))
        # a bump pair with zero loop integral of t dx but non-zero front area
        s = c.params
        b = bump(s, 0.2, 0.05) - bump(s, 0.7, 0.05) * loop_integral(bump(s, 0.2, 0.05), l.x) / loop_integral(
            bump(s, 0.7, 0.05), l.x
        )
        t2 = l.t + 0.05 * b
        z2 = l.z[0] + leapfrog(t2, l.x, closed=True)
        z2[-1] = z2[0]
        l2 = type(l)(s, np.column_stack([l.x, z2, t2]), True)
        lifted = geiges_lift(l2)
        worst_area = max(worst_area, abs(abs(lift_defect(lifted)) - abs(front_signed_area(l2))))
        io.save_curve(c, out_dir / f"loop_{k:02d}.json")
        io.save_curve(back, out_dir / f"lift_{k:02d}.json")
    return worst_rt, worst_area


def test_criterion_03_geiges_roundtrip(capsys, tmp_path_factory, outputs):
    out = tmp_path_factory.mktemp("c3a")
    with Criterion(3, 30.0, capsys) as c:
        rt, area = criterion3_run(out)
        c.check(rt < 1e-9, f"lift(project(c)) differs by {rt:.3g}")
        c.check(area < 1e-9, f"closure defect vs |loop z dx| differs by {area:.3g}")
        c.note(f"roundtrip {rt:.3g}, defect-area {area:.3g}")
    outputs[3] = (criterion3_run, out)


def test_criterion_04_rotation(capsys):
    m = darboux()
    rng = np.random.default_rng(4)
    with Criterion(4, 10.0, capsys) as c:
        loops = {n: standard_loop(n) for n in range(-3, 4)}
        for n, loop in loops.items():
            r = rotation_number(loop, m)
            c.check(r == n, f"standard loop {n} has rotation {r}")
        for k in range(20):
            n = int(rng.integers(-3, 4))
            s = loops[n].params
            eps = rng.uniform(0.05, 0.9)
            j = int(rng.integers(1, 4))
            phi = s + eps / (2 * np.pi * j) * np.sin(2 * np.pi * j * s)
            r = rotation_number(reparametrize(loops[n], phi), m)
            c.check(r == n, f"reparametrization {k} of loop {n} has rotation {r}")
        c.note("7 standard loops, 20 reparametrizations")


def test_criterion_05_fixed_ends(capsys):
    with Criterion(5, 60.0, capsys) as c:
        r = lemma2_search(0.25, 0.25, n_starts=20, seed=5, grid=512)
        c.check(r.max_abs_t < 1e-7, f"max|t| = {r.max_abs_t:.3g}")
        c.check(len(r.start_max_abs_t) == 20, "not all starts ran")
        c.check(max(r.start_max_abs_t) < 1e-7, f"worst start max|t| = {max(r.start_max_abs_t):.3g}")
        c.note(f"max|t| = {r.max_abs_t:.3g} over 20 starts")


def criterion6_run(out_dir):
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(6)
    areas, finals, problems = [], [], []
    for k in range(100):
        n = (3, 5, 7)[k % 3]
        f = admissible_front(n, rng)
        a = signed_area(f)
        cert = positive_area_certificate(f)
        last = cert.reduction_trace[-1]["cusps_after"] if cert.reduction_trace else len(f.cusp_marks)
        if last != 3 or len(f.cusp_marks) != n:
            problems.append(f"front {k}: cusps {len(f.cusp_marks)} -> {last}")
        areas.append(a)
        finals.append(cert.final_area)
        io.save_front(f, out_dir / f"front_{k:03d}.json")
        (out_dir / f"cert_{k:03d}.json").write_text(
            io.dumps(
                {
                    "total_area": cert.total_area,
                    "final_area": cert.final_area,
                    "enlarged_area": cert.enlarged_area,
                    "trace": [
                        {"cusps_before": t["cusps_before"], "cusps_after": t["cusps_after"], "removed_area": t["removed_area"]}
                        for t in cert.reduction_trace
                    ],
                },
                indent=1,
            )
            + "\n"
        )
    return np.array(areas), np.array(finals), problems


def test_criterion_06_positive_area(capsys, tmp_path_factory, outputs):
    out = tmp_path_factory.mktemp("c6a")
    with Criterion(6, 60.0, capsys) as c:
        areas, finals, problems = criterion6_run(out)
        c.check(np.all(areas > 0), f"{int(np.sum(areas <= 0))} fronts with non-positive area")
        c.check(np.all(finals > 0), "a three-cusp remainder has non-positive area")
        c.check(not problems, "; ".join(problems[:3]))
        c.note(f"100 fronts, min area {areas.min():.3g}")
    outputs[6] = (criterion6_run, out)


def test_criterion_07_scaling_map(capsys):
    with Criterion(7, 10.0, capsys) as c:
        for A in (1e-4, 0.01, 0.3):
            d = build_example4(A)
            res = deformation_residual(d)
            c.check(d.closure_defect < 1e-8, f"A={A}: defect {d.closure_defect:.3g}")
            c.check(res < 1e-6, f"A={A}: residual {res:.3g}")
            # y(1) is a floating-point sum of ~2000 increments: equal to 2A up to rounding
            ulps = abs(d.y1 - 2 * A) / np.spacing(2 * A)
            c.check(d.y0 == A and ulps <= 16, f"A={A}: y(0)={d.y0!r}, y(1)={d.y1!r} ({ulps:.0f} ulp)")
        c.note("A in {1e-4, 0.01, 0.3}")


def test_criterion_08_rotation_map(capsys):
    rng = np.random.default_rng(8)
    with Criterion(8, 10.0, capsys) as c:
        worst = 0.0
        for _ in range(100):
            alpha, r = rng.uniform(0.01, np.pi - 0.01), rng.uniform(0.1, 3.0)
            rhs, poly = example5_area_identity(alpha, r)
            worst = max(worst, abs(rhs - poly))
        c.check(worst < 1e-12, f"identity residual {worst:.3g}")
        rhs, poly = example5_area_identity(np.pi / 2, 1.0)
        half = np.sqrt(0.5)
        c.check(abs(rhs - 0.5) < 1e-12, f"right-hand side {rhs!r} != 0.5")
        c.check(abs(half * half / 2 + half * half / 2 - 0.5) < 1e-15 and abs(poly - 0.5) < 1e-12, "0.25 + 0.25")
        d = build_example5(np.pi / 2, 1.0)
        c.check(d.closure_defect < 1e-8, f"defect {d.closure_defect:.3g}")
        c.check(deformation_residual(d) < 1e-6, f"residual {deformation_residual(d):.3g}")
        c.note(f"identity {worst:.3g}, pi/2 defect {d.closure_defect:.3g}")


def test_criterion_09_nonstrict_maps(capsys):
    rng = np.random.default_rng(9)
    with Criterion(9, 30.0, capsys) as c:
        cs = []
        while len(cs) < 20:
            v = float(np.exp(rng.uniform(np.log(0.2), np.log(5.0))))
            if not 0.99 < v < 1.01:
                cs.append(v)
        worst = 0.0
        for v in cs:
            d = prop7_deform(random_linear_contact(v, rng))
            worst = max(worst, d.closure_defect)
            c.check(deformation_residual(d) < 1e-6, f"c={v:.3g}: residual {deformation_residual(d):.3g}")
        c.check(worst < 1e-8, f"defect {worst:.3g}")
        try:
            prop7_deform(random_linear_contact(1.0, rng))
            c.check(False, "c = 1 did not raise StrictConformal")
        except StrictConformal:
            pass
        c.note(f"20 maps, worst defect {worst:.3g}")


def criterion10_run(out_dir):
    out_dir.mkdir(parents=True, exist_ok=True)
    reports = []
    for k in range(10):
        rng = np.random.default_rng(1000 + k)
        n = int(rng.integers(-2, 3))
        c0, c1 = random_loop(n, rng, 2048), random_loop(n, rng, 2048)
        h = connect_loops(c0, c1, n_slices=64)
        io.save_family(h, out_dir / f"family_{k:02d}")
        reports.append((n, h, verify_family(h)))
    return reports


def test_criterion_10_homotopy(capsys, tmp_path_factory, outputs):
    out = tmp_path_factory.mktemp("c10a")
    with Criterion(10, 300.0, capsys) as c:
        for n, h, rep in criterion10_run(out):
            c.check(rep.passed, f"rotation {n}: slice {rep.first_bad} {rep.reason}")
            c.check(max(rep.residuals) < 1e-6, f"rotation {n}: residual {max(rep.residuals):.3g}")
            c.check(max(rep.closure_defects) < 1e-9, f"rotation {n}: closure {max(rep.closure_defects):.3g}")
            c.check(set(rep.rotations) == {n}, f"rotations {set(rep.rotations)} != {{{n}}}")
            c.check(np.max(np.abs(h.pre_lift_areas)) < 1e-10, "area constraint before lifting")
        try:
            connect_loops(standard_loop(0), standard_loop(1))
            c.check(False, "mismatched pair did not raise RotationMismatch")
        except RotationMismatch:
            pass
        c.note("10 pairs x 64 slices")
    outputs[10] = (criterion10_run, out)


def test_criterion_11_genericity(capsys):
    specs = [
        ("darboux", 0.5, 0.1, 0.5),
        ("darboux", 0.4, 0.08, 0.45),
        ("darboux", 0.6, 0.12, 0.55),
        ("lorentzian", 0.5, 0.1, 0.5),
        ("lorentzian", 0.45, 0.07, 0.4),
    ]
    with Criterion(11, 60.0, capsys) as c:
        for model, center, half, k0 in specs:
            m = darboux() if model == "darboux" else lorentzian()
            fam = degenerate_family(model, center, half, k0)
            c.check(degenerate_cells(fam, m).any(), f"{model} {center}: input not degenerate")
            out = make_generic(fam, m, 1e-3)
            c.check(not degenerate_cells(out, m).any(), f"{model} {center}: degenerate cells remain")
            d0, d1 = family_distance(fam, out)
            c.check(max(d0, d1) <= 1e-3, f"{model} {center}: moved {max(d0, d1):.3g} > 1e-3")
            for a, b in zip(fam.curves, out.curves):
                before = tangency_locus(a, m).cls != EVERYWHERE_TANGENT
                after = tangency_locus(b, m).cls != EVERYWHERE_TANGENT
                c.check(before == after, f"{model} {center}: tangency class changed")
                c.check(horizontality_residual(b, m) < 1e-6, f"{model} {center}: member not horizontal")
        c.note("5 families, delta = 1e-3")


def test_criterion_12_transverse(capsys):
    m = darboux()
    u = np.linspace(-0.5, 0.5, 17)
    U, V = np.meshgrid(u, u, indexing="ij")
    O = np.zeros_like(U)
    with Criterion(12, 1.0, capsys) as c:
        yz = transverse_residual(np.stack([O, U, V, O], axis=-1), m)
        xt = transverse_residual(np.stack([U, O, O, V], axis=-1), m)
        c.check(yz > 0, f"(y, z)-plane residual {yz:.3g}")
        c.check(xt < 1e-10, f"tangent-plane residual {xt:.3g}")
        try:
            transverse_residual(np.stack([u, 0 * u, 0 * u, 0 * u], axis=-1), m)
            c.check(False, "1-dimensional input did not raise SubcriticalDomain")
        except SubcriticalDomain:
            pass
        c.note(f"yz {yz:.3g}, xt {xt:.3g}")


def test_criterion_13_determinism(capsys, tmp_path_factory, outputs):
    with Criterion(13, 300.0, capsys) as c:
        for k in (3, 6, 10):
            if k not in outputs:
                c.check(False, f"criterion {k} did not run")
                continue
            run, first = outputs[k]
            second = tmp_path_factory.mktemp(f"c{k}b")
            run(second)
            a, b = tree_digest(first), tree_digest(second)
            c.check(len(a) > 0 and a == b, f"criterion {k} output differs between runs")
        c.note(f"{sum(len(tree_digest(v[1])) for v in outputs.values())} files byte-identical")
