"""Command-line front end: ``octocut <command> ...``.

Every command prints JSON (or writes the requested file). ``run-all``
assembles a deterministic report: wall-clock timings go to stderr so that
the JSON depends only on the profile, seed and data.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__, cutfamily, e6model, invariants
from .datafiles import TranscriptionError
from .gradedla import DEFAULT_PRIME, SECOND_PRIME, Grading, hilbert_function
from .polyring import GF, domain_from_name

OP2_ORACLE = [1, 27, 351, 3003, 19305]
CUT_ORACLE = [1, 12, 52, 130, 247, 403]


def _complex(text: str) -> complex:
    return complex(text.replace(" ", "").replace("i", "j"))


def _dump(obj, path: str | None = None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _fmt(x: float) -> str:
    """Fixed-precision rendering of floating-point evidence in reports."""
    return f"{x:.3e}"


# ---------------------------------------------------------------------------
# individual checks (shared by the subcommands and run-all)

def check_transcription(data_dir=None) -> dict:
    rep = e6model.e6_report(data_dir)
    ok = rep["cubic_terms"] == 45 and all(v for k, v in rep.items() if k != "cubic_terms")
    return {"ok": ok, **rep}


def check_constraint_identity(seed: int, data_dir=None) -> dict:
    coeffs = cutfamily.constraint_coefficients(data_dir)
    expected = cutfamily.expected_constraint_polynomials()
    symbolic_ok = coeffs == expected
    rng = random.Random(seed)
    F = GF(DEFAULT_PRIME)
    good = [rng.randrange(1, F.p) for _ in range(6)]
    pars = good + [F.neg(F.inv(good[5 - j])) for j in range(6)]
    holds = cutfamily.invariant_sum(cutfamily.CutParameters.general(pars, F), "second",
                                    data_dir).is_zero()
    broken = list(pars)
    broken[11] = F.add(broken[11], 1)
    fails = not cutfamily.invariant_sum(cutfamily.CutParameters.general(broken, F), "second",
                                        data_dir).is_zero()
    return {"ok": symbolic_ok and holds and fails, "symbolic_coefficients": symbolic_ok,
            "sum_zero_when_constrained": holds, "sum_nonzero_when_violated": fails}


def check_equations(seed: int, p: int = DEFAULT_PRIME, data_dir=None) -> dict:
    rng = random.Random(seed)
    F = GF(p)
    sym = cutfamily.match_reference_quadrics(data_dir=data_dir)
    a, b = rng.randrange(2, p), rng.randrange(2, p)
    num = cutfamily.match_reference_quadrics(cutfamily.cut_at(a, b, F, data_dir=data_dir),
                                         data_dir=data_dir)
    c3 = cutfamily.verify_c3_symmetry(data_dir=data_dir)
    plain = cutfamily.verify_c3_symmetry(cutfamily.reference_system("plain", data_dir),
                                         data_dir=data_dir)
    try:
        resc = cutfamily.find_rescaling(cutfamily.reference_system("plain", data_dir),
                                        cutfamily.reference_system("c3", data_dir))
        scaling = resc.to_strings()
    except cutfamily.NoScaling as exc:
        scaling = None
        scaling_error = str(exc)
    gal_sym = cutfamily.verify_galois_map(data_dir=data_dir)
    gal_num = all(cutfamily.verify_galois_map(rng.randrange(1, p), rng.randrange(1, p), F,
                                              data_dir=data_dir) for _ in range(3))
    closure = cutfamily.galois_orbit_closure(rng.randrange(1, p), rng.randrange(1, p), F,
                                             data_dir=data_dir)
    ok = (sym.complete and num.complete and c3.ok and scaling is not None and gal_sym
          and gal_num and all(closure.values()))
    out = {"ok": ok, "match_symbolic": sym.complete, "match_fp": num.complete,
           "c3_symmetry_rescaled": c3.ok, "c3_symmetry_plain": plain.ok, "rescaling": scaling,
           "galois_symbolic": gal_sym, "galois_fp": gal_num, "galois_orbit_closure": closure}
    if scaling is None:
        out["rescaling_error"] = scaling_error
    return out


def op2_hilbert(p: int, max_deg: int, data_dir=None):
    F = GF(p)
    gens = [q.map_coefficients(F) for q in e6model.op2_ideal(data_dir)]
    grading = Grading.free([list(v) for v in e6model.cartan_torus_lattice(
        e6model.build_cartan_cubic(data_dir))])
    return hilbert_function(gens, max_deg, grading)


def cut_hilbert(d1: int, d2: int, p: int, max_deg: int, data_dir=None):
    S = cutfamily.cut_at(d1, d2, GF(p), data_dir=data_dir)
    return hilbert_function(S.quadrics, max_deg, invariants.t_grading())


def check_hilbert(seed: int, op2_deg: int, cut_deg: int, data_dir=None) -> dict:
    rng = random.Random(seed)
    op2 = {str(p): op2_hilbert(p, op2_deg, data_dir).dims for p in (DEFAULT_PRIME, SECOND_PRIME)}
    d1, d2 = rng.randrange(2, DEFAULT_PRIME), rng.randrange(2, DEFAULT_PRIME)
    rec = cut_hilbert(d1, d2, DEFAULT_PRIME, cut_deg, data_dir)
    op2_ok = all(v == OP2_ORACLE[:op2_deg + 1] for v in op2.values())
    cut_ok = rec.dims == CUT_ORACLE[:cut_deg + 1]
    return {"ok": op2_ok and cut_ok, "op2_dims": op2, "cut_dims": rec.dims,
            "cut_second_differences": rec.second_differences, "degree_verdict": rec.estimate}


def check_invariants(seed: int, max_deg: int, data_dir=None) -> dict:
    rng = random.Random(seed)
    d1, d2 = rng.randrange(2, DEFAULT_PRIME), rng.randrange(2, DEFAULT_PRIME)
    dims = {}
    for p in (DEFAULT_PRIME, SECOND_PRIME):
        S = cutfamily.cut_at(d1 % p, d2 % p, GF(p), data_dir=data_dir)
        dims[str(p)] = invariants.invariant_hilbert(S.quadrics, max_deg)
    counts = [len(invariants.invariant_monomials(d)) for d in range(max_deg + 1)]
    vals = list(dims.values())
    ok = vals[0] == vals[1] and vals[0][:3] == [1, 0, 4]
    return {"ok": ok, "invariant_monomial_counts": counts, "invariant_dims": dims}


def check_smoothness(seed: int, params: int, points: int, data_dir=None) -> dict:
    from .numsearch.sampling import SamplingFailure, SurfaceSampler

    rng = np.random.default_rng(np.random.SeedSequence([seed, 77]))
    results = []
    ok = True
    for k in range(params):
        d1 = complex(*rng.normal(size=2))
        d2 = complex(*rng.normal(size=2))
        sampler = SurfaceSampler(d1, d2, data_dir)
        good, min_gap, worst = 0, float("inf"), 0.0
        for s in range(points):
            try:
                pt = sampler.sample(seed * 100003 + k * 1009 + s)
            except SamplingFailure:
                continue
            g = pt.chart_rank
            if g.rank == 9 and g.gap >= 1e6:
                good += 1
            min_gap = min(min_gap, g.gap)
            worst = max(worst, pt.residual)
        ok = ok and good == points
        results.append({"rank9_points": good, "points": points,
                        "min_log10_gap": round(float(np.log10(min_gap)), 1)
                        if np.isfinite(min_gap) else None,
                        "max_residual_below_1e-10": worst < 1e-10})
    return {"ok": ok, "parameter_points": results}


def check_discriminant(data_dir=None) -> dict:
    from .numsearch.discriminant import discriminant_checks

    rep = discriminant_checks(data_dir)
    near = rep.nearest
    return {
        "ok": rep.slice_ok and bool(rep.cusps) and rep.flagged is not None,
        "slice_roots_on_curve": rep.slice_ok,
        "slice_scaled_max": _fmt(max(rep.slice_scaled)),
        "cusp_pairs": len(rep.cusps),
        "reference_match_2_decimals": rep.flagged is not None,
        "nearest_cusp_pair": [f"{z.real:.6f}{z.imag:+.6f}i" for z in near],
        "nearest_distance": f"{rep.nearest_distance:.4f}",
    }


def check_singular(seed: int, starts: int, threads: int, data_dir=None) -> dict:
    from .numsearch.discriminant import special_parameters
    from .numsearch.singular import find_singular_points

    d1, d2 = special_parameters(data_dir)
    res = find_singular_points(d1, d2, starts, seed=seed, threads=threads, data_dir=data_dir)
    counts = res.verdict_counts()
    orbit_sizes = sorted(len(o) for o in res.orbits) if res.orbits is not None else None
    stable = all(r.repolished_verdict == r.classification.verdict for r in res.reports)
    ok = (len(res.reports) == 39 and counts == {"A2": 39} and orbit_sizes == [13, 13, 13]
          and stable)
    return {"ok": ok, "starts": starts, "converged": res.converged,
            "clusters": len(res.reports), "verdicts": counts, "orbit_sizes": orbit_sizes,
            "repolish_stable": stable,
            "max_residual_below_1e-10": all(r.residual < 1e-10 for r in res.reports)}


# ---------------------------------------------------------------------------
# run-all

@dataclass
class Check:
    name: str
    run: Callable[[], dict]
    gated: bool = True                 # skipped when the transcription check fails


@dataclass
class Profile:
    op2_deg: int
    cut_deg: int
    inv_deg: int
    smooth_params: int
    smooth_points: int
    sing_starts: int | None
    extra: dict = field(default_factory=dict)


PROFILES = {
    "quick": Profile(op2_deg=3, cut_deg=3, inv_deg=3, smooth_params=1, smooth_points=10,
                     sing_starts=None),
    "full": Profile(op2_deg=4, cut_deg=5, inv_deg=4, smooth_params=3, smooth_points=100,
                    sing_starts=2000),
}


def run_all(profile: str = "quick", seed: int = 0, threads: int = 1, data_dir=None,
            timings: dict | None = None) -> dict:
    prof = PROFILES[profile]
    checks = [
        Check("transcription", lambda: check_transcription(data_dir), gated=False),
        Check("constraint_identity", lambda: check_constraint_identity(seed, data_dir)),
        Check("equation_reproduction", lambda: check_equations(seed, data_dir=data_dir)),
        Check("hilbert", lambda: check_hilbert(seed, prof.op2_deg, prof.cut_deg, data_dir)),
        Check("invariant_hilbert", lambda: check_invariants(seed, prof.inv_deg, data_dir)),
        Check("smoothness_sampling",
              lambda: check_smoothness(seed, prof.smooth_params, prof.smooth_points, data_dir)),
        Check("discriminant", lambda: check_discriminant(data_dir)),
    ]
    if prof.sing_starts:
        checks.append(Check("singular_points",
                            lambda: check_singular(seed, prof.sing_starts, threads, data_dir)))
    timings = timings if timings is not None else {}

    def execute(check: Check) -> dict:
        t0 = time.perf_counter()
        try:
            details = check.run()
            verdict = "pass" if details.pop("ok") else "fail"
        except TranscriptionError as exc:
            details, verdict = {"error": str(exc)}, "fail"
        timings[check.name] = time.perf_counter() - t0
        return {"name": check.name, "verdict": verdict, "details": details}

    first = execute(checks[0])
    results = [first]
    rest = checks[1:]
    if first["verdict"] != "pass":
        results += [{"name": c.name, "verdict": "skipped",
                     "details": {"reason": "transcription check failed"}} for c in rest]
    elif threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            results += list(pool.map(execute, rest))
    else:
        results += [execute(c) for c in rest]
    return {
        "command": f"run-all --profile {profile} --seed {seed}",
        "version": __version__,
        "config": {"profile": profile, "seed": seed, "primes": [DEFAULT_PRIME, SECOND_PRIME],
                   "newton_tol": 1e-13, "cluster_tol": 1e-6, "gap_factor": 1e6,
                   "custom_data_dir": data_dir is not None},
        "checks": results,
        "summary": {v: sum(r["verdict"] == v for r in results)
                    for v in ("pass", "fail", "unresolved", "skipped")},
    }


# ---------------------------------------------------------------------------
# argument parsing

def _field_values(args, dom):
    vals = [args.d1, args.d2, args.d3, args.d4, args.d5, args.d6]
    return [dom.parse(str(v)) for v in vals]


def cmd_e6(args) -> int:
    rep = check_transcription(args.data_dir)
    _dump(rep, args.json)
    return 0 if rep["ok"] else 1


def cmd_cut_build(args) -> int:
    dom = domain_from_name(args.field)
    vals = _field_values(args, dom)
    system = cutfamily.build_cut(cutfamily.CutParameters.from_free(vals, dom),
                                 args.convention, args.data_dir)
    text = system.to_text()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_cut_verify(args) -> int:
    rep = check_equations(args.seed, args.p, args.data_dir)
    _dump(rep, args.json)
    return 0 if rep["ok"] else 1


def cmd_hilbert(args) -> int:
    if args.system == "op2":
        rec = op2_hilbert(args.p, args.max_deg, args.data_dir)
    else:
        rng = random.Random(args.seed)
        d1 = args.d1 if args.d1 is not None else rng.randrange(2, args.p)
        d2 = args.d2 if args.d2 is not None else rng.randrange(2, args.p)
        rec = cut_hilbert(d1, d2, args.p, args.max_deg, args.data_dir)
    _dump(rec.to_json(), args.json)
    return 0


def cmd_inv_hilbert(args) -> int:
    S = cutfamily.cut_at(args.d1, args.d2, GF(args.p), data_dir=args.data_dir)
    dims = invariants.invariant_hilbert(S.quadrics, args.max_deg)
    _dump({"modulus": args.p, "d1": args.d1, "d2": args.d2, "invariant_dims": dims,
           "invariant_monomial_counts": [len(invariants.invariant_monomials(d))
                                         for d in range(args.max_deg + 1)]}, args.json)
    return 0


def cmd_sing_find(args) -> int:
    from .numsearch.discriminant import special_parameters
    from .numsearch.newton import NewtonConfig
    from .numsearch.singular import find_singular_points

    if args.d1 is None or args.d2 is None:
        d1, d2 = special_parameters(args.data_dir)
    else:
        d1, d2 = _complex(args.d1), _complex(args.d2)
    t0 = time.perf_counter()
    res = find_singular_points(d1, d2, args.starts, args.seed,
                               NewtonConfig(max_iter=150, tol=args.tol), args.threads,
                               args.data_dir)
    print(f"sing find: {time.perf_counter() - t0:.1f}s", file=sys.stderr)
    _dump({"d1": [d1.real, d1.imag], "d2": [d2.real, d2.imag], "starts": res.starts,
           "converged": res.converged, "clusters": len(res.reports),
           "verdicts": res.verdict_counts(),
           "orbit_sizes": None if res.orbits is None else sorted(len(o) for o in res.orbits),
           "points": [r.to_json() for r in res.reports]}, args.json)
    return 0


def cmd_disc_check(args) -> int:
    from .numsearch.discriminant import discriminant_checks

    rep = discriminant_checks(args.data_dir, cusp_tol=args.tol)
    _dump(rep.to_json(), args.json)
    return 0 if rep.slice_ok and rep.cusps else 1


def cmd_disc_heatmap(args) -> int:
    from .numsearch.discriminant import heatmap, write_heatmap_csv

    rows = heatmap(tuple(args.re_range), tuple(args.im_range), args.grid, _complex(args.d2),
                   args.data_dir)
    write_heatmap_csv(rows, args.csv)
    return 0


def cmd_run_all(args) -> int:
    timings: dict[str, float] = {}
    rep = run_all(args.profile, args.seed, args.threads, args.data_dir, timings)
    for name, secs in timings.items():
        print(f"{name}: {secs:.1f}s", file=sys.stderr)
    _dump(rep, args.json)
    return 0 if rep["summary"]["fail"] == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="octocut", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--data-dir", default=None, help="alternative equation data directory")
    common.add_argument("--json", default=None, help="write JSON here instead of stdout")
    sub = ap.add_subparsers(dest="command", required=True)

    e6 = sub.add_parser("e6").add_subparsers(dest="action", required=True)
    p = e6.add_parser("verify", parents=[common], help="cubic, torus weights and chart")
    p.set_defaults(func=cmd_e6)

    cut = sub.add_parser("cut").add_subparsers(dest="action", required=True)
    p = cut.add_parser("build", parents=[common], help="emit the 26 quadrics")
    p.add_argument("--d1", required=True)
    p.add_argument("--d2", required=True)
    for k in range(3, 7):
        p.add_argument(f"--d{k}", default="1")
    p.add_argument("--field", default="q", help="q | qr2 | fp:<p> | c")
    p.add_argument("--convention", choices=["mixed", "second"], default="mixed")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_cut_build)
    p = cut.add_parser("verify-symmetries", parents=[common])
    p.add_argument("--p", type=int, default=DEFAULT_PRIME)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_cut_verify)

    p = sub.add_parser("hilbert", parents=[common], help="graded dimensions over F_p")
    p.add_argument("--system", choices=["op2", "cut"], default="cut")
    p.add_argument("--p", type=int, default=DEFAULT_PRIME)
    p.add_argument("--max-deg", type=int, default=4)
    p.add_argument("--d1", type=int, default=None)
    p.add_argument("--d2", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_hilbert)

    inv = sub.add_parser("inv").add_subparsers(dest="action", required=True)
    p = inv.add_parser("hilbert", parents=[common], help="weight-0 quotient dimensions")
    p.add_argument("--d1", type=int, default=2)
    p.add_argument("--d2", type=int, default=3)
    p.add_argument("--p", type=int, default=DEFAULT_PRIME)
    p.add_argument("--max-deg", type=int, default=3)
    p.set_defaults(func=cmd_inv_hilbert)

    sing = sub.add_parser("sing").add_subparsers(dest="action", required=True)
    p = sing.add_parser("find", parents=[common], help="multi-start singular point search")
    p.add_argument("--d1", default=None, help="complex, e.g. 1.9+2.2j (default: special pair)")
    p.add_argument("--d2", default=None)
    p.add_argument("--starts", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-13)
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_sing_find)

    disc = sub.add_parser("disc").add_subparsers(dest="action", required=True)
    p = disc.add_parser("check", parents=[common], help="slice, octic and cusp checks")
    p.add_argument("--tol", type=float, default=1e-6)
    p.set_defaults(func=cmd_disc_check)
    p = disc.add_parser("heatmap", parents=[common], help="|Disc| samples over complex d1")
    p.add_argument("--re-range", type=float, nargs=2, default=[-3.0, 3.0])
    p.add_argument("--im-range", type=float, nargs=2, default=[-3.0, 3.0])
    p.add_argument("--grid", type=int, default=101)
    p.add_argument("--d2", default="1")
    p.add_argument("--csv", required=True)
    p.set_defaults(func=cmd_disc_heatmap)

    p = sub.add_parser("run-all", parents=[common], help="every check, one JSON report")
    p.add_argument("--profile", choices=sorted(PROFILES), default="quick")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_run_all)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
