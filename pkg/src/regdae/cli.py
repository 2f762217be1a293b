"""Command-line interface.

Exit codes: 0 success, 1 usage or parse error, 2 numerical refusal,
3 verification failure.
"""

import argparse
import json
import sys

import numpy as np

from .asymptotics import classify
from .consistent_iv import iv_for, iv_structure_predicates
from .errors import DaeError, InternalInconsistency, NumericalRefusal, ParseError
from .io import complex_list, json_dumps, load_pencil, pencil_to_json, trajectory_csv
from .laplace import LaplaceConfig, transform_residual
from .oracles import matched_distance
from .pencil import REGULARITY_TOL, block_factorize, generate_regular, is_regular, spectrum
from .solvers import integrated_identity_residual, solve_mild, solve_strong
from .subspaces import default_rank_tol
from .verification import CHECKS, run_suite

EXIT_OK, EXIT_USAGE, EXIT_REFUSED, EXIT_VERIFY = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_complex(text):
    """``"1"``, ``"1.5-2j"`` or ``"-0.5+2i"`` to a complex number."""
    text = text.strip()
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise ParseError(f"cannot parse complex number {text!r}") from None


def parse_vector_text(text):
    """A JSON list (numbers or ``[re, im]`` pairs) or a comma-separated list of complex literals."""
    text = text.strip()
    if text.startswith("["):
        try:
            items = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"u0: malformed JSON list ({exc.msg})") from None
        out = []
        for k, x in enumerate(items):
            if isinstance(x, (int, float)) and not isinstance(x, bool):
                out.append(complex(x))
            elif isinstance(x, list) and len(x) == 2:
                out.append(complex(float(x[0]), float(x[1])))
            else:
                raise ParseError(f"u0: entry {k} is neither a number nor a [re, im] pair")
        return np.array(out, dtype=complex)
    return np.array([parse_complex(s) for s in text.split(",") if s.strip()], dtype=complex)


def resolve_u0(choice, p, seed, tol=None, rank_tol=None):
    """Named presets ``iv-basis-<k>`` and ``random``, or an explicit vector."""
    if choice is None:
        raise ParseError("--u0 is required")
    if choice.startswith("iv-basis-"):
        try:
            k = int(choice[len("iv-basis-") :])
        except ValueError:
            raise ParseError(f"bad preset {choice!r}") from None
        iv = iv_for(p, tol, rank_tol)
        if not 0 <= k < iv.dim:
            raise ParseError(f"preset {choice!r}: IV has dimension {iv.dim}")
        return iv.basis.basis[:, k].copy()
    if choice == "random":
        rng = np.random.default_rng(0 if seed is None else seed)
        v = rng.standard_normal(p.n) + 1j * rng.standard_normal(p.n)
        return v / np.linalg.norm(v)
    v = parse_vector_text(choice)
    if v.size != p.n:
        raise ParseError(f"u0 has {v.size} entries, pencil has n = {p.n}")
    return v


def _write(args, text):
    if args.out and args.out != "-":
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _spectrum_fields(sp):
    return {
        "spectrum": complex_list(sp.eigenvalues),
        "abscissa": sp.spectral_abscissa,
        "s0": sp.s0,
        "margin": sp.imag_axis_margin,
        "empty_spectrum": sp.empty,
    }


def _tolerances(args, p):
    return {
        "rank": args.tol_rank if args.tol_rank is not None else default_rank_tol(p.n),
        "regularity": args.tol_reg if args.tol_reg is not None else REGULARITY_TOL,
    }


def cmd_analyze(args):
    p = load_pencil(args.input)
    verdict = is_regular(p, args.tol_reg, args.tol_rank)
    report = {
        "n": p.n,
        "regular": verdict.regular,
        "sigma_min_b": verdict.sigma_min_b,
        "regularity_threshold": verdict.threshold,
        "criterion": verdict.criterion,
        "tolerances": _tolerances(args, p),
    }
    if not verdict.regular:
        report["reason"] = verdict.reason
        report["rank_m0"] = verdict.rank_m0 if verdict.rank_m0 >= 0 else None
        _write(args, json_dumps(report))
        return EXIT_OK
    f = block_factorize(p, args.tol_reg, args.tol_rank)
    iv = iv_for(p, args.tol_reg, args.tol_rank)
    sp = spectrum(p, f)
    sigma_g = np.linalg.eigvals(-iv.generator_g) if iv.dim else np.zeros(0, dtype=complex)
    preds = iv_structure_predicates(f)
    report.update(_spectrum_fields(sp))
    report.update(
        {
            "rank_m0": f.rank,
            "dim_iv": iv.dim,
            "iv_basis": complex_list(iv.basis.basis.T),
            "b": complex_list(f.b),
            "c": complex_list(f.c),
            "spectrum_iv": complex_list(sorted(sigma_g, key=lambda z: (round(z.real, 12), round(z.imag, 12)))),
            "spectral_equality_residual": matched_distance(sigma_g, sp.eigenvalues),
            "nbot_subset_iv": preds.nbot_subset_iv,
            "iv_meets_nbot_trivially": preds.iv_meets_nbot_trivially,
        }
    )
    _write(args, json_dumps(report))
    return EXIT_OK


def cmd_spectrum(args):
    p = load_pencil(args.input)
    sp = spectrum(p, block_factorize(p, args.tol_reg, args.tol_rank))
    report = _spectrum_fields(sp)
    report["tolerances"] = _tolerances(args, p)
    _write(args, json_dumps(report))
    return EXIT_OK


def cmd_solve(args):
    p = load_pencil(args.input)
    if not args.t_max > 0:
        raise ParseError("--t-max must be positive")
    if args.grid < 2:
        raise ParseError("--grid must be at least 2")
    f = block_factorize(p, args.tol_reg, args.tol_rank)
    iv = iv_for(p, args.tol_reg, args.tol_rank)
    u0 = resolve_u0(args.u0, p, args.seed, args.tol_reg, args.tol_rank)
    t = np.linspace(0.0, args.t_max, args.grid)
    summary = {"mode": args.mode, "t_max": args.t_max, "grid": args.grid, "u0": complex_list(u0)}
    if args.mode == "strong":
        traj = solve_strong(iv, u0, t)
    else:
        traj = solve_mild(f, iv, u0, t, check=True)
        summary["jump"] = {"u0": complex_list(traj.jump[0]), "u0_plus": complex_list(traj.jump[1])}
    summary["integrated_identity_residual"] = float(np.max(integrated_identity_residual(f, u0, t)))
    summary["max_norm"] = traj.max_norm()
    if args.rho is not None:
        rep = transform_residual(p, u0, LaplaceConfig(rho=args.rho))
        summary["laplace"] = {
            "rho": rep.rho,
            "frequencies": rep.frequencies,
            "residuals": rep.residuals,
            "max_residual": rep.max_residual,
            "rho_alt": rep.rho_alt,
            "rho_pair_discrepancy": rep.rho_pair_discrepancy,
        }
    summary["tolerances"] = _tolerances(args, p)
    if args.format == "json":
        summary["times"] = traj.times
        summary["states"] = complex_list(traj.states)
        _write(args, json_dumps(summary))
    else:
        _write(args, trajectory_csv(traj))
        sys.stderr.write(json_dumps(summary))
    return EXIT_OK


def cmd_stability(args):
    p = load_pencil(args.input)
    rep = classify(p, args.tol_margin, args.tol_reg, args.tol_rank)
    out = _spectrum_fields(rep.spectrum)
    out.update(
        {
            "verdict": rep.verdict,
            "margin_tol": rep.margin_tol,
            "dim_S": rep.dim_s,
            "dim_T": rep.dim_t,
            "decay_rate": rep.decay_rate if rep.has_dichotomy else None,
            "nonnormality_constant": rep.nonnormality_constant if rep.has_dichotomy else None,
            "tolerances": _tolerances(args, p),
        }
    )
    _write(args, json_dumps(out))
    return EXIT_OK


def cmd_verify(args):
    only = [s for item in (args.only or []) for s in item.split(",") if s]
    try:
        report = run_suite(args.seed or 0, args.count, only or None, args.inject_fault, args.workers)
    except KeyError as exc:
        raise ParseError(f"unknown suite {exc.args[0]!r}; choose from {', '.join(CHECKS)}") from None
    body = report.to_dict()
    if args.format == "text":
        lines = [
            f"[{'PASS' if r['passed'] else 'FAIL'}] {r['criterion']:>2} {r['name']}: "
            f"worst ratio {r['worst_ratio_to_bound']:.3g} ({r['tolerance']})"
            for r in body["checks"]
        ]
        _write(args, "\n".join(lines) + "\n")
    else:
        _write(args, json_dumps(body))
    return EXIT_OK if report.passed else EXIT_VERIFY


def cmd_generate(args):
    hint = None
    if args.spectrum:
        hint = [parse_complex(s) for s in args.spectrum.split(",") if s.strip()]
    p = generate_regular(args.n, args.rank, args.seed or 0, spectrum_hint=hint, kind=args.kind)
    _write(args, pencil_to_json(p))
    return EXIT_OK


def build_parser():
    parser = _Parser(prog="regdae", description="Analysis and solution of regular matrix pencils z*M0 + M1.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, needs_input=True):
        if needs_input:
            sp.add_argument("--input", required=True, help="pencil JSON file")
        sp.add_argument("--out", default=None, help="output file (default stdout)")
        sp.add_argument("--tol-rank", type=float, default=None, help="relative singular-value cutoff for rank M0")
        sp.add_argument("--tol-reg", type=float, default=None, help="relative regularity threshold")
        sp.add_argument("--seed", type=int, default=None)

    sp = sub.add_parser("analyze", help="regularity, IV, blocks, spectra")
    common(sp)
    sp.add_argument("--format", choices=["json"], default="json")
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("spectrum", help="finite spectrum")
    common(sp)
    sp.add_argument("--format", choices=["json"], default="json")
    sp.set_defaults(func=cmd_spectrum)

    sp = sub.add_parser("solve", help="strong or mild trajectory")
    common(sp)
    sp.add_argument("--u0", required=True, help="vector, 'random' or 'iv-basis-<k>'")
    sp.add_argument("--t-max", type=float, default=5.0)
    sp.add_argument("--grid", type=int, default=101)
    sp.add_argument("--mode", choices=["strong", "mild"], default="mild")
    sp.add_argument("--rho", type=float, default=None, help="also run the transform check at this weight")
    sp.add_argument("--format", choices=["csv", "json"], default="csv")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("stability", help="stability / dichotomy verdict")
    common(sp)
    sp.add_argument("--tol-margin", type=float, default=None)
    sp.add_argument("--format", choices=["json"], default="json")
    sp.set_defaults(func=cmd_stability)

    sp = sub.add_parser("verify", help="randomized verification suite")
    common(sp, needs_input=False)
    sp.add_argument("--only", action="append", help="check name or criterion number (repeatable)")
    sp.add_argument("--count", type=int, default=None, help="instances per family")
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--format", choices=["json", "text"], default="json")
    sp.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("generate", help="random regular pencil as JSON")
    common(sp, needs_input=False)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--rank", type=int, required=True)
    sp.add_argument("--spectrum", default=None, help="comma-separated complex eigenvalues")
    sp.add_argument("--kind", choices=["accretive", "general"], default="accretive")
    sp.add_argument("--format", choices=["json"], default="json")
    sp.set_defaults(func=cmd_generate)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NumericalRefusal as exc:
        sys.stderr.write(f"refused: {type(exc).__name__}: {exc}\n")
        return EXIT_REFUSED
    except InternalInconsistency as exc:
        sys.stderr.write(f"internal check failed: {exc}\n")
        return EXIT_VERIFY
    except (DaeError, ValueError) as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
