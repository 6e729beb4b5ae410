"""Command-line interface.

Every command prints a line-oriented ``key=value`` report on stdout. Exit
codes: 0 success, 1 validation failure, 2 usage error, 3 numerical failure.
Library errors print ``error=<Token>`` on stdout and a diagnostic on stderr.
"""

from __future__ import annotations

import argparse
import io as _stdio
import sys
from contextlib import redirect_stderr
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import curves as cv
from . import fronts as fr
from . import geiges as gg
from . import homotopy as hm
from . import io
from . import loops as lp
from . import rigidity as rg
from .errors import EngelError, NotHorizontal, SubcriticalDomain
from .models import get_model, linear_contactomorphism
from .plotting import plot_svg


@dataclass
class CommandOutcome:
    exit_code: int
    lines: list[str] = field(default_factory=list)
    errors: list[str] = field(default_factory=list)

    @property
    def stdout(self) -> str:
        return "".join(line + "\n" for line in self.lines)

    @property
    def stderr(self) -> str:
        return "".join(line + "\n" for line in self.errors)


class _Report:
    def __init__(self):
        self.lines: list[str] = []

    def __call__(self, key: str, value) -> None:
        self.lines.append(f"{key}={_fmt(value)}")


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    if isinstance(v, (list, tuple)):
        return ",".join(_fmt(x) for x in v)
    return str(v)


def _model(name: str):
    return io.load_model(name) if name.endswith(".json") else get_model(name)


def _need_out(args) -> Path:
    if not args.out:
        raise argparse.ArgumentTypeError("this command needs -o/--out")
    return Path(args.out)


def _load_any(path):
    """Front, Legendrian or curve, by format tag."""
    d = io.read_json(path)
    kind = d.get("format")
    if kind == io.FRONT:
        return io.front_from_dict(d)
    if kind == io.LEGENDRIAN:
        return gg.LegendrianCurve(np.asarray(d["params"]), np.asarray(d["points"]), bool(d.get("closed")))
    if kind == io.CURVE:
        return io.curve_from_dict(d)
    raise io.FormatError(f"{path}: unsupported format {kind!r}")


def _window(text: str) -> tuple[float, float]:
    try:
        a, b = (float(v) for v in text.split(":"))
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"window must be a:b, got {text!r}") from e
    return a, b


# ---------------------------------------------------------------------------
# commands


def cmd_validate(args, out):
    m = _model(args.model)
    c = io.load_curve(args.curve)
    tol = args.tol or 1e-6
    r = cv.horizontality_residual(c, m)
    out("residual", r)
    out("closed", c.closed)
    out("closure_defect", c.closure_defect() if c.closed else 0.0)
    if not r < tol:
        raise NotHorizontal(f"residual {r:.3g} exceeds {tol:g}")
    out("passed", True)


def cmd_project(args, out):
    c = io.load_curve(args.curve)
    leg = gg.geiges_project(c, args.tol or gg.HORIZONTAL_TOL)
    io.save_legendrian(leg, _need_out(args))
    out("samples", len(leg.params))
    out("written", args.out)


def cmd_lift(args, out):
    leg = io.load_legendrian(args.legendrian)
    c = gg.geiges_lift(leg, args.y0, args.tol or gg.LEGENDRIAN_TOL)
    io.save_curve(c, _need_out(args))
    out("closed", c.closed)
    out("lift_defect", gg.lift_defect(c))
    out("written", args.out)


def cmd_rotnum(args, out):
    c = io.load_curve(args.curve)
    out("rotation", cv.rotation_number(c, _model(args.model)))


def cmd_devmap(args, out):
    c = io.load_curve(args.curve)
    m = _model(args.model)
    out("angle", cv.developing_angle(c, m))
    out("turns", cv.developing_turns(c, m))


def cmd_tangency(args, out):
    c = io.load_curve(args.curve)
    loc = cv.tangency_locus(c, _model(args.model), args.tol or cv.TOL_ANGLE)
    out("class", loc.cls)
    out("intervals", len(loc.intervals))
    out("crossings", len(loc.crossings))
    for a, b in loc.intervals:
        out("interval", [a, b])


def cmd_generic(args, out):
    h = io.load_family(args.family)
    fam = cv.FamilyOfCurves(h.time_grid, h.slices)
    m = _model(args.model)
    g = cv.make_generic(fam, m, args.delta, seed=args.seed)
    c0, c1 = cv.family_distance(fam, g)
    out("c0_distance", c0)
    out("c1_distance", c1)
    out("degenerate_cells", int(np.sum(cv.degenerate_cells(g, m))))
    if args.out:
        io.save_family(hm.HomotopyFamily(g.k_grid, g.curves), args.out)
        out("written", args.out)


def cmd_area(args, out):
    obj = _load_any(args.file)
    if isinstance(obj, fr.Front):
        out("area", fr.signed_area(obj))
    elif isinstance(obj, gg.LegendrianCurve):
        out("area", gg.front_signed_area(obj))
    else:
        out("area", gg.front_signed_area(gg.geiges_project(obj)))


def cmd_adjust_area(args, out):
    f = io.load_front(args.front)
    g = fr.adjust_area_to(f, args.target, args.window or fr.cusp_free_windows(f))
    area = fr.signed_area if f.closed else fr.path_integral
    out("area_before", area(f))
    out("area_after", area(g))
    out("loops", len(g.loop_windows))
    if args.out:
        io.save_front(g, args.out)
        out("written", args.out)


def cmd_certify(args, out):
    f = io.load_front(args.front)
    cert = fr.positive_area_certificate(f)
    out("total_area", cert.total_area)
    out("final_area", cert.final_area)
    out("steps", len(cert.reduction_trace))
    for step in cert.reduction_trace:
        out("step", [step["cusps_before"], step["cusps_after"], step["removed_area"]])


def cmd_rigidity(args, out):
    r = rg.lemma2_search(args.z0, args.z1, (args.a, args.b), args.starts, args.seed, args.grid)
    out("max_abs_t", r.max_abs_t)
    out("defect", r.defect)
    out("best_start", r.best_start)
    out("starts_max_abs_t", max(r.start_max_abs_t))


def _report_deformation(d, args, out):
    out("closure_defect", d.closure_defect)
    out("horizontality_residual", rg.deformation_residual(d))
    out("angle_residual", d.angle_residual)
    out("y0", d.y0)
    out("y1", d.y1)
    out("cusps", len(d.front.cusp_marks))
    if args.out:
        base = Path(args.out)
        base.mkdir(parents=True, exist_ok=True)
        io.save_front(d.front, base / "front.json")
        io.save_curve(d.reconstructed, base / "curve.json")
        io.write_json(base / "report.json", io.deformation_report(d, "front.json"))
        out("written", args.out)


def cmd_example4(args, out):
    _report_deformation(rg.build_example4(args.area, args.samples), args, out)


def cmd_example5(args, out):
    rhs, poly = rg.example5_area_identity(args.alpha, args.r)
    out("required_area", rhs)
    out("polyline_area", poly)
    out("identity_residual", abs(rhs - poly))
    _report_deformation(rg.build_example5(args.alpha, args.r, args.samples), args, out)


def cmd_prop7(args, out):
    vals = [float(v) for v in args.matrix.split(",")]
    if len(vals) != 4:
        raise argparse.ArgumentTypeError("--matrix needs four comma-separated numbers")
    phi = linear_contactomorphism(np.array(vals).reshape(2, 2))
    d = rg.prop7_deform(phi, args.area, args.samples)
    out("conformal_factor", d.info["conformal_factor"])
    out("turning", d.info["turning"])
    _report_deformation(d, args, out)


def cmd_connect(args, out):
    c0, c1 = io.load_curve(args.a), io.load_curve(args.b)
    h = hm.connect_loops(c0, c1, args.slices, args.slope_bound)
    _report_family(h.report, out)
    if args.out:
        io.save_family(h, args.out)
        out("written", args.out)
    if not h.report.passed:
        return 1


def _report_family(r, out):
    out("passed", r.passed)
    out("first_bad", "none" if r.first_bad is None else r.first_bad)
    out("max_residual", max(r.residuals))
    out("max_closure_defect", max(r.closure_defects))
    out("rotation", r.rotations[0])
    if r.reason:
        out("reason", r.reason)


def cmd_verify_family(args, out):
    h = io.load_family(args.family)
    r = hm.verify_family(h, _model(args.model), args.tol or hm.HORIZONTAL_TOL)
    _report_family(r, out)
    return 0 if r.passed else 1


def cmd_transverse(args, out):
    n = args.grid
    u, v = np.meshgrid(np.linspace(-0.5, 0.5, n), np.linspace(-0.5, 0.5, n), indexing="ij")
    o = np.zeros_like(u)
    if args.surface == "yz":
        S = np.stack([o, u, v, o], axis=-1)
    elif args.surface == "xt":
        S = np.stack([u, o, o, v], axis=-1)
    elif args.surface == "line":
        S = np.stack([u[:, 0], o[:, 0], o[:, 0], o[:, 0]], axis=-1)
    else:
        S = np.load(args.surface)
    if S.ndim < 3:
        raise SubcriticalDomain("domain dimension below 2")
    out("residual", cv.transverse_residual(S, _model(args.model)))


def cmd_plot(args, out):
    obj = _load_any(args.file)
    plot_svg(obj, _need_out(args))
    out("written", args.out)


def cmd_loop(args, out):
    if args.random:
        c = lp.random_loop(args.rotation, np.random.default_rng(args.seed), args.samples)
    else:
        c = lp.standard_loop(args.rotation, args.samples)
    io.save_curve(c, _need_out(args))
    out("rotation", cv.rotation_number(c, get_model("darboux")))
    out("written", args.out)


def cmd_admissible(args, out):
    f = fr.admissible_front(args.cusps, np.random.default_rng(args.seed), args.samples)
    io.save_front(f, _need_out(args))
    out("cusps", len(f.cusp_marks))
    out("area", fr.signed_area(f))
    out("written", args.out)


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", default="darboux", help="model name or model JSON file")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, default=None)
    common.add_argument("--samples", type=int, default=2048)
    common.add_argument("-o", "--out", default=None)

    p = argparse.ArgumentParser(prog="engelflex", description="Horizontal curves in Engel manifolds.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(fn=fn)
        return sp

    add("validate", cmd_validate, "horizontality residual of a curve file").add_argument("curve")
    add("project", cmd_project, "Legendrian projection of a Darboux curve").add_argument("curve")
    sp = add("lift", cmd_lift, "horizontal lift of a Legendrian file")
    sp.add_argument("legendrian")
    sp.add_argument("--y0", type=float, default=0.0)
    add("rotnum", cmd_rotnum, "rotation number of a closed curve").add_argument("curve")
    add("devmap", cmd_devmap, "developing map of a kernel-tangent segment").add_argument("curve")
    add("tangency", cmd_tangency, "tangency locus and class").add_argument("curve")
    sp = add("generic", cmd_generic, "make a family of curves generic")
    sp.add_argument("family")
    sp.add_argument("--delta", type=float, default=1e-3)
    add("area", cmd_area, "signed area of a front, Legendrian or curve").add_argument("file")
    sp = add("adjust-area", cmd_adjust_area, "insert R1 loops to reach a target area")
    sp.add_argument("front")
    sp.add_argument("--target", type=float, required=True)
    sp.add_argument("--window", type=_window, action="append", help="parameter window a:b (repeatable); default: arcs between cusps")
    add("certify", cmd_certify, "positive-area certificate of an admissible front").add_argument("front")
    sp = add("rigidity", cmd_rigidity, "search for deformations with fixed ends")
    sp.add_argument("--z0", type=float, default=0.0)
    sp.add_argument("--z1", type=float, default=0.0)
    sp.add_argument("--a", type=float, default=0.0)
    sp.add_argument("--b", type=float, default=1.0)
    sp.add_argument("--starts", type=int, default=20)
    sp.add_argument("--grid", type=int, default=512)
    add("example4", cmd_example4, "teardrop deformation for the scaling return map").add_argument(
        "--area", type=float, required=True
    )
    sp = add("example5", cmd_example5, "deformation for the rotation return map")
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--r", type=float, default=1.0)
    sp = add("prop7", cmd_prop7, "deformation for a non-strict linear return map")
    sp.add_argument("--matrix", required=True, help="a,b,c,d for [[a,b],[c,d]] acting on (x,z)")
    sp.add_argument("--area", type=float, default=0.05)
    sp = add("connect", cmd_connect, "homotopy of closed horizontal loops")
    sp.add_argument("a")
    sp.add_argument("b")
    sp.add_argument("--slices", type=int, default=64)
    sp.add_argument("--slope-bound", type=float, default=np.inf)
    add("verify-family", cmd_verify_family, "check a family directory").add_argument("family")
    add("transverse", cmd_transverse, "transversality residual of a surface").add_argument(
        "surface", help="yz, xt, line or a .npy array of shape (n1, n2[, n3], 4)"
    )
    sub.choices["transverse"].add_argument("--grid", type=int, default=16)
    add("plot", cmd_plot, "SVG drawing of a front, Legendrian or curve").add_argument("file")
    sp = add("loop", cmd_loop, "write a closed horizontal loop")
    sp.add_argument("--rotation", type=int, default=1)
    sp.add_argument("--random", action="store_true")
    sp = add("admissible", cmd_admissible, "write an admissible front")
    sp.add_argument("--cusps", type=int, default=3)
    return p


def run_command(argv) -> CommandOutcome:
    parser = build_parser()
    err = _stdio.StringIO()
    try:
        with redirect_stderr(err):
            args = parser.parse_args(list(argv))
    except SystemExit as e:
        code = e.code if isinstance(e.code, int) else 2
        return CommandOutcome(code, [], err.getvalue().splitlines())
    out = _Report()
    try:
        code = args.fn(args, out) or 0
    except EngelError as e:
        out("error", e.token)
        return CommandOutcome(e.exit_code, out.lines, [f"{e.token}: {e}"])
    except argparse.ArgumentTypeError as e:
        return CommandOutcome(2, out.lines, [f"usage: {e}"])
    except (ValueError, TypeError) as e:
        out("error", "InvalidInput")
        return CommandOutcome(1, out.lines, [f"InvalidInput: {e}"])
    return CommandOutcome(code, out.lines, [])


def main(argv=None) -> int:
    res = run_command(sys.argv[1:] if argv is None else argv)
    sys.stdout.write(res.stdout)
    sys.stderr.write(res.stderr)
    return res.exit_code


if __name__ == "__main__":
    raise SystemExit(main())
