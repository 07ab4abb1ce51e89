"""Command-line front end: JSON specs in, JSON/CSV reports out.

Exit codes: 0 success, 1 input error, 2 numerically inconclusive,
3 invariant violation or failed example.
"""
from __future__ import annotations

import argparse
import json
import math
import re
import sys

import numpy as np

from .flow import FlowError, flow, phi_beta_scan, trajectory_csv
from .generator import (INCONCLUSIVE, OTHER, REGULAR_NULL_POINT, REGULAR_POLE, Generator,
                        classify_boundary, generator_from_json)
from .herglotz import measure_from_json
from .koenigs import boundary_csv, h_beta_scan, koenigs, max_identity_residual
from .multislit import from_pole_atoms, from_tips, slit_report, verify_slit_classification
from .scenarios import EXAMPLES, probe_angles, run_cusp, run_no_tip, seeded_generator

EXIT_OK, EXIT_INPUT, EXIT_INCONCLUSIVE, EXIT_INVARIANT = 0, 1, 2, 3
MAX_ANGLES = 4096
IDENTITY_TOL = 1e-10

TAGS = {REGULAR_POLE: "pole", REGULAR_NULL_POINT: "null_point", OTHER: "other",
        INCONCLUSIVE: "inconclusive"}


class InputError(ValueError):
    pass


# --- argument parsing helpers ------------------------------------------------------

_PI_TERM = re.compile(r"^([+-]?(?:\d+(?:\.\d*)?|\.\d+)?)\*?pi(?:/(\d+(?:\.\d*)?))?$")


def parse_angle(text: str) -> float:
    """A float, or a multiple of pi such as 'pi', '-pi/2', '3pi/4', '1.5*pi'."""
    s = text.strip().lower()
    try:
        return float(s)
    except ValueError:
        pass
    m = _PI_TERM.match(s)
    if not m:
        raise InputError(f"--angles: cannot parse {text!r}")
    coef = m.group(1)
    c = 1.0 if coef in ("", "+") else -1.0 if coef == "-" else float(coef)
    d = float(m.group(2)) if m.group(2) else 1.0
    return c * math.pi / d


def parse_angles(text: str | None, default: int) -> np.ndarray:
    if text is None:
        return probe_angles(default)
    s = text.strip()
    if re.fullmatch(r"\d+", s):
        n = int(s)
        if not 1 <= n <= MAX_ANGLES:
            raise InputError(f"--angles: count must be in [1, {MAX_ANGLES}]")
        return probe_angles(n)
    vals = [parse_angle(p) for p in s.split(",") if p.strip()]
    if not vals or len(vals) > MAX_ANGLES:
        raise InputError(f"--angles: need between 1 and {MAX_ANGLES} angles")
    return np.array(vals)


def parse_floats(text: str, name: str) -> list:
    try:
        vals = [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise InputError(f"{name}: expected a comma-separated list of numbers") from None
    if not vals:
        raise InputError(f"{name}: empty list")
    return vals


def parse_complex(text: str, name: str) -> complex:
    s = text.strip().replace(" ", "")
    if "," in s:
        parts = s.split(",")
        if len(parts) != 2:
            raise InputError(f"{name}: expected 're,im' or a complex literal")
        try:
            return complex(float(parts[0]), float(parts[1]))
        except ValueError:
            raise InputError(f"{name}: expected 're,im' or a complex literal") from None
    try:
        return complex(s.replace("i", "j"))
    except ValueError:
        raise InputError(f"{name}: expected 're,im' or a complex literal") from None


def load_json(path: str | None) -> dict:
    if path is None:
        raise InputError("--spec is required")
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"--spec: cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"--spec: invalid JSON ({exc.msg} at line {exc.lineno})") from None


def load_generator(path: str | None) -> Generator:
    spec = load_json(path)
    try:
        if isinstance(spec, dict) and "source" not in spec and ("atoms" in spec or "density" in spec):
            # a bare measure spec: p is its Herglotz transform and tau = 0
            return Generator.from_measure(0.0, measure_from_json(spec), "measure")
        if isinstance(spec, dict) and "tau" not in spec:
            raise InputError("tau: missing field")
        return generator_from_json(spec)
    except InputError:
        raise
    except ValueError as exc:
        raise InputError(str(exc)) from None


def emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise InputError(f"--out: cannot write {out}: {exc.strerror}") from None


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=True) + "\n"


def _positive(name: str, value: float | None) -> None:
    if value is not None and not value > 0:
        raise InputError(f"{name}: must be positive")


def _eps_bounds(args, default_max: int | None) -> dict:
    kmin = 3 if args.eps_kmin is None else args.eps_kmin
    kmax = default_max if args.eps_kmax is None else args.eps_kmax
    if kmin < 1 or (kmax is not None and kmax < kmin + 2):
        raise InputError("--eps-kmin/--eps-kmax: need 1 <= kmin and kmax >= kmin + 2")
    return {"k_min": kmin, "k_max": kmax}


# --- commands --------------------------------------------------------------------

def cmd_classify(args) -> int:
    G = load_generator(args.spec)
    thetas = parse_angles(args.angles, 720)
    _positive("--tol-pole", args.tol_pole)
    kw = _eps_bounds(args, None)
    rows = []
    inconclusive = False
    for th in thetas:
        c = classify_boundary(G, float(th), tol_pole=args.tol_pole, **kw)
        tag = TAGS[c.tag]
        row = {"angle": float(th), "tag": tag}
        if c.is_pole:
            row["mass"] = c.mass
        if c.is_null_point:
            row["dilation"] = c.dilation
        row["residual"] = float(c.diagnostics[-1].residual) if c.diagnostics else 0.0
        if c.note:
            row["note"] = c.note
        inconclusive |= tag == "inconclusive"
        rows.append(row)
    emit(dump_json(rows), args.out)
    return EXIT_INCONCLUSIVE if inconclusive else EXIT_OK


def cmd_flow(args) -> int:
    G = load_generator(args.spec)
    if args.z0 is None:
        raise InputError("--z0 is required")
    z0 = parse_complex(args.z0, "--z0")
    if abs(z0) >= 1:
        raise InputError("--z0: must lie in the open unit disk")
    if not (args.t_end >= 0 and math.isfinite(args.t_end)):
        raise InputError("--t-end: must be a finite nonnegative time")
    try:
        traj = flow(G, z0, args.t_end)
    except FlowError as exc:
        sys.stderr.write(f"flow: {exc}\n")
        return EXIT_INCONCLUSIVE
    emit(trajectory_csv(traj), args.out)
    return EXIT_OK


def cmd_koenigs(args) -> int:
    G = load_generator(args.spec)
    thetas = parse_angles(args.angles, 256)
    K = koenigs(G)
    res = max_identity_residual(K)
    try:
        text = boundary_csv(K, thetas, residual=res)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    emit(text, args.out)
    if not res <= IDENTITY_TOL:
        sys.stderr.write(f"koenigs: identity residual {res:.3e} exceeds {IDENTITY_TOL:g}\n")
        return EXIT_INVARIANT
    return EXIT_OK


def cmd_multislit(args) -> int:
    spec = load_json(args.spec)
    if not isinstance(spec, dict):
        raise InputError("slit spec must be an object")
    if "tips" in spec:
        try:
            tg = from_tips([float(t) for t in spec["tips"]])
        except (TypeError, ValueError) as exc:
            raise InputError(f"tips: {exc}") from None
        emit(dump_json({"tips": list(tg.tips), "sigma": list(tg.sigma), "sum_sigma": float(sum(tg.sigma))}),
             args.out)
        return EXIT_OK
    if "pole_atoms" not in spec:
        raise InputError("slit spec needs 'tips' or 'pole_atoms'")
    try:
        S, G = from_pole_atoms(spec["pole_atoms"], normalize=args.normalize)
    except (KeyError, TypeError) as exc:
        raise InputError(f"pole_atoms: malformed entry ({exc})") from None
    except ValueError as exc:
        raise InputError(f"pole_atoms: {exc}") from None
    check = verify_slit_classification(S, G)
    emit(dump_json(slit_report(S, check)), args.out)
    if "Inconclusive" in check.tags_a + check.tags_b:
        return EXIT_INCONCLUSIVE
    return EXIT_OK if check.passed else EXIT_INVARIANT


def cmd_example(args) -> int:
    name = args.name
    if name not in EXAMPLES:
        raise InputError(f"unknown example {name!r}; valid names: {', '.join(sorted(EXAMPLES))}")
    if name == "cusp" and args.alpha is not None:
        checks = run_cusp(tuple(parse_floats(args.alpha, "--alpha")))
    elif name == "no_tip" and args.m is not None:
        try:
            ms = tuple(int(v) for v in args.m.split(","))
        except ValueError:
            raise InputError("--m: expected a comma-separated list of integers") from None
        checks = run_no_tip(ms)
    else:
        checks = EXAMPLES[name]()
    lines = [f"{'PASS' if c.passed else 'FAIL'}  {c.name}" + (f"  [{c.detail}]" if c.detail else "")
             for c in checks]
    ok = all(c.passed for c in checks)
    lines.append(f"{name}: {sum(c.passed for c in checks)}/{len(checks)} checks passed")
    emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if ok else EXIT_INVARIANT


def cmd_selftest(args) -> int:
    """Seeded equivalence check: generator poles, phi_t beta-points and h beta-points."""
    seed = 0 if args.seed is None else args.seed
    if seed < 0:
        raise InputError("--seed: must be nonnegative")
    ts = parse_floats(args.t, "--t") if args.t else [0.5, 1.0, 2.0]
    if any(not t > 0 for t in ts):
        raise InputError("--t: times must be positive")
    case = seeded_generator(seed)
    G = case.generator
    thetas = parse_angles(args.angles, 720)
    cls = [classify_boundary(G, float(th)) for th in thetas]
    pole = np.array([c.is_pole for c in cls])
    A = np.array([-c.a if c.is_pole else complex("nan") for c in cls])
    reps = phi_beta_scan(G, thetas, ts, A=A)
    hreps = h_beta_scan(koenigs(G), thetas, A=A)
    lines = []
    failures = 0
    for j, t in enumerate(ts):
        fv = np.array([r[j].is_beta_point for r in reps])
        agree = bool(np.array_equal(fv, pole))
        failures += not agree
        lines.append(f"{'PASS' if agree else 'FAIL'}  phi_{t:g} beta-points match poles "
                     f"({int(fv.sum())} vs {int(pole.sum())})")
    hv = np.array([r.is_beta_point for r in hreps])
    agree = bool(np.array_equal(hv, pole))
    failures += not agree
    lines.append(f"{'PASS' if agree else 'FAIL'}  h beta-points match poles ({int(hv.sum())} vs {int(pole.sum())})")
    mism = [r.mismatch for row in reps for r in row if r.is_beta_point]
    mism += [r.mismatch for r in hreps if r.is_beta_point]
    worst = max(mism, default=0.0)
    ok = worst <= 1e-4
    failures += not ok
    lines.append(f"{'PASS' if ok else 'FAIL'}  second-derivative limits match predictions (max rel. {worst:.2e})")
    inconclusive = sum(c.tag == INCONCLUSIVE for c in cls)
    lines.append(f"selftest seed={seed} ({case.representation}): {len(lines) - failures}/{len(lines)} checks passed"
                 + (f", {inconclusive} inconclusive" if inconclusive else ""))
    emit("\n".join(lines) + "\n", args.out)
    if failures:
        return EXIT_INVARIANT
    return EXIT_INCONCLUSIVE if inconclusive else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="diskgen", description=(
        "Generators of holomorphic semigroups of the unit disk: boundary classification, "
        "flows, Koenigs functions and radial multi-slit systems."))
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, angles=False, eps=False):
        p.add_argument("--spec", help="JSON input file")
        p.add_argument("--out", help="output file (default: stdout)")
        if angles:
            p.add_argument("--angles", help="probe count N (uniform grid) or a comma list of angles")
        if eps:
            p.add_argument("--eps-kmin", type=int, default=None, help="finest radial step is 2^-kmax, coarsest 2^-kmin")
            p.add_argument("--eps-kmax", type=int, default=None)

    p = sub.add_parser("classify", help="classify boundary points of a generator")
    common(p, angles=True, eps=True)
    p.add_argument("--tol-pole", type=float, default=1e-4, help="smallest mass reported as a pole")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("flow", help="integrate one trajectory, CSV t,re,im,v_re,v_im")
    common(p)
    p.add_argument("--z0", help="start point, 're,im' or a complex literal like 0.5+0.1j")
    p.add_argument("--t-end", type=float, default=1.0)
    p.set_defaults(func=cmd_flow)

    p = sub.add_parser("koenigs", help="boundary data of the Koenigs function, CSV theta,upsilon,abs_h")
    common(p, angles=True)
    p.set_defaults(func=cmd_koenigs)

    p = sub.add_parser("multislit", help="slit system from pole atoms or tip angles")
    common(p)
    p.add_argument("--normalize", action="store_true", help="rescale pole masses to sum 1")
    p.set_defaults(func=cmd_multislit)

    p = sub.add_parser("example", help="run a named scenario and print a pass/fail summary")
    p.add_argument("name", help=f"one of: {', '.join(sorted(EXAMPLES))}")
    p.add_argument("--out")
    p.add_argument("--alpha", help="cusp exponents, comma list")
    p.add_argument("--m", help="truncation sizes for no_tip, comma list")
    p.set_defaults(func=cmd_example)

    p = sub.add_parser("selftest", help="seeded agreement of the three boundary verdicts")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--t", help="flow times, comma list (default 0.5,1,2)")
    p.add_argument("--angles", help="probe count N or a comma list of angles")
    p.add_argument("--out")
    p.set_defaults(func=cmd_selftest)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        return args.func(args)
    except InputError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    except Exception as exc:  # anything else breaks an internal invariant
        sys.stderr.write(f"internal error: {type(exc).__name__}: {exc}\n")
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
