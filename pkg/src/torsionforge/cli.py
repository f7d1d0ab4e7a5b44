"""Command-line entry point.

Exit codes: 0 when every assertion holds, 1 when one fails, 2 for bad input.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from . import basechange as bc
from . import equivariant as eq
from . import simplicial as simp
from . import ttf
from .complexes import CochainComplex, ComplexError, cohomology
from .config import RunConfig, SuiteConfig
from .corpus import corpus_seed
from .exactla import LinAlgError
from .groups import EnumerationBoundExceeded, GroupError
from .rtorsion import analytic_torsion_fd, rt_via_cohomology, rt_via_determinant_line


class InputError(Exception):
    pass


@dataclass
class RunReport:
    command: dict
    inputs_digest: str
    results: dict
    status: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(v == "pass" for v in self.status.values())

    def to_json(self) -> str:
        doc = {
            "command": self.command,
            "inputs_digest": self.inputs_digest,
            "results": self.results,
            "status": self.status,
            "ok": self.ok,
        }
        return json.dumps(doc, indent=2, default=_jsonable) + "\n"


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"cannot serialize {type(x).__name__}")


# ------------------------------------------------------------------- inputs


def _read_json(path: str, what: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{what}: cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{what}: {path} line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def _json_arg(value: str, what: str):
    """Inline JSON or a path to a JSON file."""
    if os.path.exists(value):
        return _read_json(value, what)
    try:
        return json.loads(value)
    except json.JSONDecodeError as exc:
        raise InputError(f"{what}: not a file and not valid JSON ({exc.msg})") from None


def _field_context(what: str, exc: Exception) -> InputError:
    if isinstance(exc, KeyError):
        return InputError(f"{what}: missing field {exc.args[0]!r}")
    return InputError(f"{what}: {exc}")


def _check_shapes(doc) -> None:
    ranks = doc["ranks"]
    diff = doc.get("diff", [])
    if len(diff) != max(len(ranks) - 1, 0):
        raise ValueError(f"field 'diff' has {len(diff)} matrices, ranks need {max(len(ranks) - 1, 0)}")
    for i, d in enumerate(diff):
        rows, cols = ranks[i + 1], ranks[i]
        if rows and (len(d) != rows or any(len(r) != cols for r in d)):
            raise ValueError(f"field 'diff[{i}]' must be {rows} x {cols} (rows are degree {i + 1})")


def load_complex(path: str):
    """A cochain complex file, or a simplicial file (which also yields its action)."""
    doc = _read_json(path, "complex")
    try:
        if isinstance(doc, dict) and "facets" in doc:
            sim, act, ls = simp.from_json(doc)
            return simp.cochain_complex_of(sim, ls), (sim, act, ls)
        _check_shapes(doc)
        C = CochainComplex.from_json(doc)
        return C, None
    except (KeyError, TypeError, ValueError, ComplexError, LinAlgError) as exc:
        raise _field_context("complex", exc) from None


def load_group(path: str) -> bc.TwistedGroupSpace:
    doc = _read_json(path, "group")
    try:
        return bc.group_from_json(doc)
    except EnumerationBoundExceeded:
        raise
    except (KeyError, TypeError, ValueError, GroupError) as exc:
        raise _field_context("group", exc) from None


def _sha(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _digest(command: dict, files: list[str]) -> str:
    parts = {"version": __version__, "command": command,
             "files": [_sha(Path(f).read_bytes()) if f and os.path.exists(f) else f for f in files]}
    return _sha(json.dumps(parts, sort_keys=True, default=str).encode())


def _status(ok: bool) -> str:
    return "pass" if ok else "fail"


# ----------------------------------------------------------------- commands


def cmd_cohomology(args) -> dict:
    C, _ = load_complex(args.file)
    rep = cohomology(C)
    results = {
        "ranks": list(C.ranks),
        "betti": rep.betti,
        "torsion": rep.torsion,
        "regulator_squared": [str(h.regulator_sq) for h in rep.degrees],
    }
    return {"results": results, "status": {}}


def _torsion_value(tv):
    out = {"log_rt": tv.log_value, "rt": tv.value}
    if tv.exact_square is not None:
        out["rt_squared"] = str(tv.exact_square)
    return out


def cmd_torsion(args) -> dict:
    C, _ = load_complex(args.file)
    methods = ["cohomology", "detline", "analytic"] if args.method == "all" else [args.method]
    results, status = {"mu": args.mu, "omega": args.omega, "methods": {}}, {}
    vals = {}
    for m in methods:
        if m == "cohomology":
            vals[m] = rt_via_cohomology(C, args.mu, omega=args.omega)
        elif m == "detline":
            vals[m] = rt_via_determinant_line(C, args.mu, omega=args.omega)
        else:
            vals[m] = analytic_torsion_fd(C)
        results["methods"][m] = _torsion_value(vals[m])
    if "cohomology" in vals and "detline" in vals:
        status["cohomology_equals_determinant_line"] = _status(
            vals["cohomology"].exact_square == vals["detline"].exact_square)
    if "analytic" in vals and len(methods) > 1:
        ref = rt_via_cohomology(C, "harmonic", omega="metric")
        results["harmonic_metric_rt"] = _torsion_value(ref)
        status["analytic_equals_harmonic_rt"] = _status(
            abs(vals["analytic"].log_value - ref.log_value) <= 1e-9)
    if args.scale:
        try:
            scale = [Fraction(x) for x in args.scale.split(",")]
        except ValueError:
            raise InputError(f"--scale: cannot parse {args.scale!r}") from None
        if len(scale) != len(C.ranks) or any(c <= 0 for c in scale):
            raise InputError("--scale needs one positive rational per degree")
        mu = args.mu
        base = rt_via_cohomology(C, mu, omega=args.omega).exact_square
        scaled = rt_via_cohomology(C, mu, omega=args.omega, mu_scale=scale).exact_square
        expect = Fraction(1)
        for i, c in enumerate(scale):
            expect = expect * c if i % 2 == 0 else expect / c
        results["scaling"] = {"scale": [str(c) for c in scale],
                              "ratio_squared": str(scaled / base), "expected_ratio": str(expect)}
        status["scaling_law"] = _status(scaled / base == expect ** 2)
    return {"results": results, "status": status}


def _load_action(args, C, sim_data):
    if args.action:
        doc = _read_json(args.action, "action")
        try:
            act = eq.EquivariantAction.from_json(doc, C)
            eq.validate_action(C, act)
        except (KeyError, TypeError, ValueError, LinAlgError) as exc:
            raise _field_context("action", exc) from None
        return act
    if sim_data is not None and sim_data[1] is not None:
        return eq.action_from_simplicial(*sim_data)
    raise InputError("action: give an action file or a simplicial file with an 'action' field")


def cmd_equivariant(args) -> dict:
    C, sim_data = load_complex(args.complex)
    op = args.op
    if op in ("smith", "concretert") and sim_data is None:
        raise InputError(f"--op {op} needs a simplicial complex file")
    if sim_data is not None and sim_data[1] is not None:
        try:
            sim, act_s, ls = simp.regularize(*sim_data)
        except simp.ActionNotRegular as exc:
            raise InputError(f"action: {exc}") from None
        if (sim, act_s) != sim_data[:2]:
            sim_data = (sim, act_s, ls)
            C = simp.cochain_complex_of(sim, ls)
    act = _load_action(args, C, sim_data)
    results, status = {"op": op, "p": act.order}, {}
    if op == "rt_sigma":
        r = eq.rt_sigma(C, act)
        results["log_rt_sigma"] = r
        if act.order == 2:
            a = eq.analytic_torsion_sigma_fd(C, act)
            results["analytic_torsion_sigma"] = a
            status["equivariant_cheeger_mueller"] = _status(abs(a - r) <= 1e-9)
    elif op == "lefschetz":
        coeff = args.coefficients if args.coefficients == "Q" else int(args.coefficients)
        rep = eq.lefschetz(C, act, coeff)
        results.update({"coefficients": rep.coefficients, "traces": rep.traces,
                        "lefschetz": rep.lefschetz})
        if rep.torsion_lefschetz is not None:
            results.update({"plus_torsion": rep.plus_torsion, "minus_torsion": rep.minus_torsion,
                            "torsion_lefschetz": rep.torsion_lefschetz})
        if sim_data is not None and coeff == "Q" and sim_data[2] is None:
            chi = simp.fixed_subcomplex(sim_data[0], sim_data[1]).euler_characteristic
            results["fixed_euler_characteristic"] = chi
            status["lefschetz_equals_fixed_euler_characteristic"] = _status(chi == rep.lefschetz)
    elif op == "smith":
        rep = eq.smith_check(sim_data[0], sim_data[1])
        results.update({"fixed_dimension": rep.fixed_dim, "total_dimension": rep.total_dim,
                        "failures": rep.failures})
        status["smith_inequality"] = _status(rep.inequality_holds)
        status["smith_sequence_exact"] = _status(rep.sequence_exact)
    elif op == "concretert":
        try:
            rep = eq.concretert_simplicial(*sim_data)
        except eq.HypothesisFailed as exc:
            raise InputError(f"hypothesis: {exc}") from None
        results.update({"a_log_rt_sigma": rep.log_rt_sigma, "b_torsion_terms": rep.torsion_terms,
                        "c_regulator_terms": rep.regulator_terms,
                        "p_power_torsion": rep.h_p_power_torsion, "h_mod_p_size": rep.h_mod_p_size,
                        "fixed_mod_p_size": rep.fixed_mod_p_size, "errors_trivial": rep.errors_trivial})
        if rep.errors_trivial:
            status["main_terms_equal"] = _status(bool(rep.equality_holds))
    return {"results": results, "status": status}


def cmd_basechange(args) -> dict:
    op = args.op
    results, status = {"op": op}, {}
    if op == "sweep":
        try:
            primes = tuple(int(p) for p in args.primes.split(","))
        except ValueError:
            raise InputError(f"--primes: cannot parse {args.primes!r}") from None
        rows = bc.c_ratio_sweep(primes)
        results["rows"] = [{"prime": r.prime, "norm_type": r.kind, "c": r.c_coset_pairs,
                            "index": r.index, "ratio": str(r.ratio)} for r in rows]
        unip = [r.ratio for r in rows if r.kind == "unipotent"]
        status["coset_pairs_equal_norm_fixed_points"] = _status(
            all(r.c_coset_pairs == r.c_norm_fixed for r in rows))
        status["unipotent_ratios_decrease"] = _status(all(a > b for a, b in zip(unip, unip[1:])))
        return {"results": results, "status": status}
    if not args.group:
        raise InputError(f"--op {op} needs a group file")
    T = load_group(args.group)
    G = T.group
    results["group_order"] = G.order
    results["p"] = T.p
    H = None
    if args.subgroup:
        try:
            H = bc.subgroup_from_json(T, _json_arg(args.subgroup, "subgroup"))
        except (KeyError, TypeError, GroupError) as exc:
            raise _field_context("subgroup", exc) from None
    if op == "classes":
        rep = bc.twisted_classes(T, H)
        results["classes"] = [{"representative": bc.element_to_json(T, c.representative),
                               "size": c.size, "norm_class": bc.element_to_json(T, c.norm_class)}
                              for c in rep.classes]
        results["h1_size"] = rep.h1_size
        status["class_sizes_sum_to_order"] = _status(sum(c.size for c in rep.classes) == rep.group_order)
    elif op == "h1":
        results["h1"] = bc.h1(T, H)
    elif op == "induced_trace":
        if H is None:
            raise InputError("induced_trace needs --subgroup")
        delta = G.e
        if args.delta:
            try:
                delta = bc.element_from_json(T, _json_arg(args.delta, "delta"))
            except (TypeError, GroupError) as exc:
                raise _field_context("delta", exc) from None
        try:
            rep = bc.induced_trace_report(T, H, delta)
            results.update({"value": rep.value, "cosets": rep.coset_count,
                            "twisted_centralizer_order": rep.twisted_centralizer_order,
                            "class_meets_subgroup": rep.class_meets_subgroup})
            status["coset_action_equals_class_formula"] = "pass"
        except bc.MismatchBetweenFormulas as exc:
            results["error"] = str(exc)
            status["coset_action_equals_class_formula"] = "fail"
    return {"results": results, "status": status}


def cmd_ttf(args) -> dict:
    T = load_group(args.group)
    try:
        Gamma = bc.subgroup_from_json(T, _json_arg(args.subgroup, "subgroup"))
        f = ttf.TwistedTestFunction.from_json(T, _json_arg(args.function, "function"))
    except (KeyError, TypeError, ValueError, GroupError) as exc:
        raise _field_context("input", exc) from None
    check = ttf.verify(T, Gamma, f)
    rep = check.report
    results = {
        "group_order": T.order,
        "subgroup_order": len(Gamma),
        "operator_trace": rep.operator_trace,
        "geometric_total": rep.geometric_total,
        "geometric_terms": [{"representative": bc.element_to_json(T, t.representative),
                             "volume": t.volume, "orbital_sum": t.orbital_sum,
                             "contribution": t.contribution} for t in rep.geometric_terms],
        "h1_subgroup": rep.h1_gamma,
        "h1_group": rep.h1_group,
        "z1_contribution": rep.z1_contribution,
        "h1_term": rep.h1_term,
    }
    status = {"operator_trace_equals_geometric_side": _status(rep.identity_holds)}
    if check.spectral is not None:
        results["spectral_side"] = check.spectral
        status["spectral_side_equals_operator_trace"] = _status(check.spectral == check.trace.value)
    return {"results": results, "status": status}


def cmd_corpus(args) -> dict:
    from .acceptance import SUITES, run_suite
    seed = corpus_seed(args.seed)
    cfg = SuiteConfig(seed=seed, time_limits={})
    res = run_suite(args.suite, cfg)
    results = {"seed": seed, "suite": args.suite,
               "criteria": [{"number": r.number, "name": r.name, "passed": r.passed,
                             "detail": r.detail} for r in res]}
    status = {f"criterion_{r.number}_{r.name.replace(' ', '_')}": _status(r.passed) for r in res}
    assert set(SUITES[args.suite]) == {r.number for r in res}
    return {"results": results, "status": status}


# --------------------------------------------------------------------- main


def _write_tsv(path: str, rows: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]), delimiter="\t", lineterminator="\n")
        w.writeheader()
        w.writerows(rows)


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--no-cache", action="store_true", help="ignore and do not write the results cache")
    common.add_argument("--cache-dir", default=RunConfig.cache_dir)
    common.add_argument("--output", "-o", help="also write the JSON report here")

    p = argparse.ArgumentParser(prog="torsionforge", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="subcommand", required=True)

    s = sub.add_parser("cohomology", parents=[common], help="integral cohomology of a complex")
    s.add_argument("file")

    s = sub.add_parser("torsion", parents=[common], help="Reidemeister and analytic torsion")
    s.add_argument("file")
    s.add_argument("--mu", choices=["integral", "harmonic"], default="harmonic")
    s.add_argument("--omega", choices=["combinatorial", "metric"], default="combinatorial")
    s.add_argument("--method", choices=["cohomology", "detline", "analytic", "all"], default="all")
    s.add_argument("--scale", help="comma-separated positive rationals rescaling the cohomology volumes")

    s = sub.add_parser("equivariant", parents=[common], help="prime-order actions")
    s.add_argument("complex")
    s.add_argument("action", nargs="?")
    s.add_argument("--op", choices=["rt_sigma", "lefschetz", "smith", "concretert"], required=True)
    s.add_argument("--coefficients", default="Q", help="Q or a prime")

    s = sub.add_parser("basechange", parents=[common], help="twisted conjugacy in finite groups")
    s.add_argument("group", nargs="?")
    s.add_argument("--op", choices=["classes", "h1", "induced_trace", "sweep"], required=True)
    s.add_argument("--subgroup", help="JSON file or inline JSON with generators")
    s.add_argument("--delta", help="JSON file or inline JSON element")
    s.add_argument("--primes", default="3,5,7,11,13")
    s.add_argument("--tsv", help="write the sweep table here")

    s = sub.add_parser("ttf", help="twisted trace formula")
    tsub = s.add_subparsers(dest="ttf_command", required=True)
    v = tsub.add_parser("verify", parents=[common])
    v.add_argument("--group", required=True)
    v.add_argument("--subgroup", required=True)
    v.add_argument("--function", required=True)

    s = sub.add_parser("corpus", parents=[common], help="run the seeded acceptance corpora")
    s.add_argument("--seed", type=lambda x: int(x, 0), default=None)
    s.add_argument("--suite", choices=["torsion", "equivariant", "basechange", "ttf", "all"], default="all")
    return p


COMMANDS = {"cohomology": cmd_cohomology, "torsion": cmd_torsion, "equivariant": cmd_equivariant,
            "basechange": cmd_basechange, "ttf": cmd_ttf, "corpus": cmd_corpus}

_NOT_OPTIONS = {"no_cache", "cache_dir", "output", "subcommand", "ttf_command"}


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    options = {k: v for k, v in sorted(vars(args).items()) if k not in _NOT_OPTIONS}
    if args.subcommand == "corpus":
        options["seed"] = corpus_seed(args.seed)
    command = {"subcommand": args.subcommand, "options": options}
    files = [v for k, v in options.items()
             if k in ("file", "complex", "action", "group", "subgroup", "function", "delta") and v]
    try:
        digest = _digest(command, files)
    except OSError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    cache = Path(args.cache_dir) / f"{digest}.json"
    text = None
    if not args.no_cache and cache.exists():
        text = cache.read_text()
    if text is None:
        try:
            out = COMMANDS[args.subcommand](args)
        except (InputError, EnumerationBoundExceeded, bc.SubgroupNotSigmaStable,
                bc.AutomorphismError, eq.ActionInvalid, simp.SimplicialError) as exc:
            print(f"input error: {type(exc).__name__}: {exc}", file=sys.stderr)
            return 2
        report = RunReport(command, digest, out["results"], out["status"])
        text = report.to_json()
        if not args.no_cache:
            cache.parent.mkdir(parents=True, exist_ok=True)
            cache.write_text(text)
    doc = json.loads(text)
    if getattr(args, "tsv", None) and "rows" in doc["results"]:
        _write_tsv(args.tsv, doc["results"]["rows"])
    if args.output:
        Path(args.output).write_text(text)
    sys.stdout.write(text)
    failed = [k for k, v in doc["status"].items() if v != "pass"]
    for name in failed:
        print(f"assertion failed: {name}", file=sys.stderr)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
