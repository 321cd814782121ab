"""
Command-line front end.

    bethecs chain spectrum --L 4 --theta 0,0.3,-0.2,0.7 --kappa 1.3
    bethecs bethe solve --L 2 --theta 0,0 --kappa 1 --M 1
    bethecs fusion analyze --L 4 --theta 0.1,0.4,0.4+1j,-0.3
    bethecs jack eval --mu 1,0,1,2 --beta 1
    bethecs cs sector --lambda 2,1,1,0 --beta 2 --kappa 3/2
    bethecs freeze motif --N 7 --J 4
    bethecs repro n4|n7|n8|L4-fusion|gt-limit

Reports are JSON with sorted keys, complex numbers as [re, im] and exact
rationals as "p/q".  Exit codes: 0 success, 1 unknown command, 2 invalid
input, 3 solver failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
import tempfile
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from . import __version__

COMMANDS = {
    "chain": ["spectrum"],
    "bethe": ["solve"],
    "fusion": ["analyze"],
    "jack": ["eval"],
    "cs": ["sector"],
    "freeze": ["motif"],
    "repro": ["n4", "n7", "n8", "L4-fusion", "gt-limit"],
}

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_SOLVER = 0, 1, 2, 3
ROUND = 12


class ValidationError(ValueError):
    pass


class SolverFailure(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# parsing of numbers and lists
# ---------------------------------------------------------------------------

def parse_number(s: str | float | int) -> Fraction | complex | float:
    """'3/2' and integers stay exact, decimals become Fractions, complex stays complex."""
    if isinstance(s, (int, Fraction)):
        return Fraction(s)
    if isinstance(s, float):
        return Fraction(s).limit_denominator(10**12) if np.isfinite(s) else s
    t = str(s).strip().replace(" ", "")
    if t.lower() in ("inf", "infinity"):
        return float("inf")
    if "j" in t or "i" in t.replace("inf", ""):
        try:
            return complex(t.replace("i", "j").replace("jj", "j"))
        except ValueError as e:
            raise ValidationError(f"cannot parse number {s!r}") from e
    try:
        return Fraction(t)
    except (ValueError, ZeroDivisionError) as e:
        raise ValidationError(f"cannot parse number {s!r}") from e


def parse_list(s: str | Sequence, kind=parse_number) -> list:
    if isinstance(s, (list, tuple)):
        return [kind(x) for x in s]
    s = str(s).strip()
    if not s:
        return []
    return [kind(x) for x in s.split(",")]


def parse_int_list(s) -> list[int]:
    def to_int(x):
        v = parse_number(x)
        if not isinstance(v, Fraction) or v.denominator != 1:
            raise ValidationError(f"expected an integer, got {x!r}")
        return int(v)
    return parse_list(s, to_int)


def as_complex(x) -> complex:
    return complex(float(x)) if isinstance(x, Fraction) else complex(x)


# ---------------------------------------------------------------------------
# report encoding
# ---------------------------------------------------------------------------

def _clean(x: Any) -> Any:
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [_clean(float(x.real)), _clean(float(x.imag))]
    if isinstance(x, (float, np.floating)):
        v = float(x)
        if not np.isfinite(v):
            return str(v)
        r = round(v, ROUND)
        return 0.0 if r == 0 else r
    if isinstance(x, np.ndarray):
        return [_clean(v) for v in x.tolist()]
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    return x


def config_hash(config: dict) -> str:
    blob = json.dumps(_clean(config), sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def emit_report(results: dict, config: dict | None = None) -> bytes:
    """Deterministic JSON bytes."""
    doc = dict(results)
    if config is not None:
        doc = {"version": __version__, "config": config, "config_hash": config_hash(config), **doc}
    return (json.dumps(_clean(doc), sort_keys=True, indent=1) + "\n").encode()


def parse_report(data: bytes) -> dict:
    return json.loads(data.decode())


def emit_csv(rows: list[dict]) -> bytes:
    if not rows:
        return b""
    buf = io.StringIO()
    keys = sorted({k for r in rows for k in r})
    w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: json.dumps(_clean(r.get(k))) for k in keys})
    return buf.getvalue().encode()


# ---------------------------------------------------------------------------
# jobs
# ---------------------------------------------------------------------------

@dataclass
class JobConfig:
    command: str
    sub: str
    params: dict = field(default_factory=dict)
    output: str | None = None
    format: str = "json"

    def to_dict(self) -> dict:
        return {"command": f"{self.command} {self.sub}", "params": self.params, "format": self.format}


def _chain_spec(p: dict):
    from .xxx_chain import ChainSpec

    L = int(p.get("L", 0))
    if L < 1:
        raise ValidationError("--L must be a positive integer")
    th = parse_list(p.get("theta", ",".join(["0"] * L)))
    if len(th) != L:
        raise ValidationError(f"--theta needs {L} entries, got {len(th)}")
    k = as_complex(parse_number(p.get("kappa", "1")))
    if k == 0:
        raise ValidationError("--kappa must be nonzero")
    return ChainSpec(L, [as_complex(t) for t in th], k)


def _solutions_ok(sols) -> bool:
    from .bethe_solver import TOL_ACCEPT
    return all(s.residual < TOL_ACCEPT for s in sols)


def run_chain_spectrum(p: dict) -> dict:
    from .bethe_solver import charge_eigenvalues
    from .xxx_chain import charge_coefficients
    from . import tensoralg as ta

    spec = _chain_spec(p)
    rows = []
    Ms = [int(p["M"])] if p.get("M") is not None else list(range(spec.L + 1))
    for M in Ms:
        idx = ta.sector_indices(spec.L, M)
        t2 = charge_coefficients(spec, 2)[np.ix_(idx, idx)]
        ev = np.linalg.eigvals(t2)
        ev = sorted(ev, key=lambda z: (round(z.real, 9), round(z.imag, 9)))
        rows += [{"M": M, "t2": z} for z in ev]
    return {"spec": spec.to_dict(), "table": rows}


def run_bethe_solve(p: dict) -> dict:
    from .bethe_solver import newton_solve, tq_extract

    spec = _chain_spec(p)
    if p.get("M") is None:
        raise ValidationError("--M is required")
    M = int(p["M"])
    if not 0 <= M <= spec.L:
        raise ValidationError("--M must lie in 0..L")
    method = p.get("method", "newton")
    if method not in ("newton", "tq"):
        raise ValidationError("--method is newton or tq")
    sols = newton_solve(spec, M) if method == "newton" else tq_extract(spec, M)
    out = {"spec": spec.to_dict(), "M": M, "method": method,
           "solutions": [s.to_dict() for s in sols]}
    for d, s in zip(out["solutions"], sols):
        d["infinite"] = s.infinite
    if not _solutions_ok(sols):
        raise SolverFailure(out)
    return out


def run_fusion_analyze(p: dict) -> dict:
    from .fusion import fusion_report

    spec = _chain_spec(p)
    return {"spec": spec.to_dict(), "fusion": fusion_report(spec, np.random.default_rng(int(p.get("seed", 0))))}


def run_jack_eval(p: dict) -> dict:
    from . import dunkl_jack as dj

    mu = parse_int_list(p.get("mu", ""))
    if not mu:
        raise ValidationError("--mu is required")
    beta = p.get("beta", "1")
    E = dj.nonsym_jack(mu, beta=beta if str(beta).lower() == "inf" else parse_number(beta))
    return {"mu": mu, "beta": str(beta), "polynomial": str(E), "terms": E.to_dict(),
            "delta": dj.delta_eigenvalue(mu, beta=beta if str(beta).lower() == "inf" else parse_number(beta))}


def run_cs_sector(p: dict) -> dict:
    from . import spin_cs as sc

    lam = tuple(parse_int_list(p.get("lambda", "")))
    if not lam or not sc.is_allowed(lam):
        raise ValidationError("--lambda must be a partition with multiplicities <= 2")
    beta = parse_number(p.get("beta", "2"))
    if not isinstance(beta, Fraction):
        raise ValidationError("--beta must be a finite rational here")
    kappa = as_complex(parse_number(p.get("kappa", "3/2")))
    sec = sc.sector_basis(lam, beta)
    chain = sc.effective_chain(lam, beta, kappa)
    out = {"sector": sec.to_dict(), "momentum": sc.momentum_eigenvalue(lam),
           "energy": sc.energy_eigenvalue(lam, beta), "kappa": kappa,
           "t2_spectrum": sc.t2_spectrum(sec, kappa),
           "t2_effective_chain": sc.effective_t2_spectrum(chain)}
    sols = []
    for M in range(chain.L + 1):
        for s in sc.cs_bethe_solutions(lam, beta, kappa, M):
            sols.append({**s.to_dict(), "t2": sc.tau_series_formula(chain, s.x_roots)[2]})
    out["bethe"] = sols
    return out


def run_freeze_motif(p: dict) -> dict:
    from . import freezing_hs as fz

    N = int(p.get("N", 0))
    if N < 2:
        raise ValidationError("--N must be at least 2")
    try:
        J = parse_int_list(p.get("J", ""))
        fz.motif(N, J)
    except ValueError as e:
        raise ValidationError(str(e)) from e
    kappa = as_complex(parse_number(p.get("kappa", "1")))
    return {"motif": fz.motif_report(N, J, kappa, seed=int(p.get("seed", 0)))}


def _repro_roots(N: int, J: list[int], M: int) -> dict:
    from . import freezing_hs as fz

    sols = fz.frozen_bethe(N, J, M, 1.0)
    if not sols:
        raise SolverFailure({"N": N, "J": J, "M": M})
    return {"N": N, "J": J, "M": M, "solutions": [s.to_dict() for s in sols]}


def run_repro(sub: str, p: dict) -> dict:
    if sub == "n7":
        return _repro_roots(7, [4], 2)
    if sub == "n8":
        return _repro_roots(8, [4], 3)
    if sub == "n4":
        from . import freezing_hs as fz
        kappa = as_complex(parse_number(p.get("kappa", "3/2")))
        beta = float(parse_number(p.get("beta", "2")))
        return {"kappa": kappa, "beta": beta, "n4": fz.n4_example(kappa, beta)}
    if sub == "L4-fusion":
        from . import fusion
        from .xxx_chain import ChainSpec
        th = [0.13, 0.41, 0.41 + 1j, -0.37]
        spec = ChainSpec(4, th, 1.0)
        rc = fusion.reduced_chain(spec)
        return {"spec": spec.to_dict(), "fusion": fusion.fusion_report(spec, np.random.default_rng(0)),
                "special_roots": rc.special_roots, "reduced_theta": [t for t in rc.spec.thetas]}
    if sub == "gt-limit":
        from itertools import combinations
        from .bethe_solver import gt_solution, newton_solve
        from .xxx_chain import ChainSpec
        spec = ChainSpec(4, [0.3, -0.5, 0.9, 0.1], 1e6)
        rows = []
        for M in range(5):
            for s in newton_solve(spec, M):
                rows.append({"M": M, "roots": sorted(s.roots, key=lambda z: (z.real, z.imag))})
        gt = [{"I": list(I), "roots": gt_solution(spec, I).roots}
              for M in range(5) for I in combinations(range(1, 5), M)]
        return {"spec": spec.to_dict(), "solutions": rows, "gt": gt}
    raise ValidationError(f"unknown repro target {sub}")


def run(config: JobConfig) -> tuple[int, bytes]:
    handlers = {
        ("chain", "spectrum"): run_chain_spectrum,
        ("bethe", "solve"): run_bethe_solve,
        ("fusion", "analyze"): run_fusion_analyze,
        ("jack", "eval"): run_jack_eval,
        ("cs", "sector"): run_cs_sector,
        ("freeze", "motif"): run_freeze_motif,
    }
    cfg = config.to_dict()
    try:
        if config.command == "repro":
            res = run_repro(config.sub, config.params)
        else:
            res = handlers[(config.command, config.sub)](config.params)
        code = EXIT_OK
    except SolverFailure as e:
        res = {"error": "solver did not converge", "partial": e.args[0] if e.args else None}
        code = EXIT_SOLVER
    except (ValidationError, ValueError) as e:
        res = {"error": str(e)}
        code = EXIT_INVALID
    if config.format == "csv" and code == EXIT_OK:
        if "table" not in res:
            return EXIT_INVALID, emit_report({"error": "csv output needs a tabular command"}, cfg)
        return code, emit_csv(res["table"])
    return code, emit_report(res, cfg)


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(EXIT_INVALID)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="bethecs", description="Bethe ansatz for inhomogeneous XXX chains and the spin-CS model")
    ap.add_argument("--version", action="version", version=__version__)
    top = ap.add_subparsers(dest="command")

    def common(sp):
        sp.add_argument("--config", help="JSON file with parameters (flags override)")
        sp.add_argument("--output", "-o", help="write the report here instead of stdout")
        sp.add_argument("--format", choices=["json", "csv"], default=None)
        sp.add_argument("--seed", default=None)

    def chain_args(sp):
        sp.add_argument("--L")
        sp.add_argument("--theta")
        sp.add_argument("--kappa")

    for cmd, subs in COMMANDS.items():
        p = top.add_parser(cmd)
        s = p.add_subparsers(dest="sub")
        for sub in subs:
            sp = s.add_parser(sub)
            common(sp)
            if cmd in ("chain", "bethe", "fusion"):
                chain_args(sp)
            if cmd in ("chain", "bethe"):
                sp.add_argument("--M")
            if cmd == "bethe":
                sp.add_argument("--method")
            if cmd == "jack":
                sp.add_argument("--mu")
                sp.add_argument("--beta")
            if cmd == "cs":
                sp.add_argument("--lambda", dest="lambda_")
                sp.add_argument("--beta")
                sp.add_argument("--kappa")
            if cmd == "freeze":
                sp.add_argument("--N")
                sp.add_argument("--J")
                sp.add_argument("--kappa")
            if cmd == "repro":
                sp.add_argument("--kappa")
                sp.add_argument("--beta")
    return ap


def _usage() -> str:
    lines = ["usage: bethecs <command> <subcommand> [options]", "commands:"]
    lines += [f"  {c} {'|'.join(s)}" for c, s in COMMANDS.items()]
    return "\n".join(lines) + "\n"


def config_from_args(argv: Sequence[str]) -> JobConfig:
    ns = build_parser().parse_args(argv)
    if ns.sub is None:
        raise ValidationError(f"missing subcommand for {ns.command}")
    params: dict = {}
    if ns.config:
        try:
            with open(ns.config) as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as e:
            raise ValidationError(f"cannot read config: {e}") from e
        if not isinstance(loaded, dict):
            raise ValidationError("config must be a JSON object")
        params.update(loaded.get("params", loaded))
    skip = {"command", "sub", "config", "output", "format"}
    for k, v in vars(ns).items():
        if k in skip or v is None:
            continue
        params["lambda" if k == "lambda_" else k] = v
    fmt = ns.format or params.pop("format", "json")
    return JobConfig(ns.command, ns.sub, params, ns.output, fmt)


def _write_atomic(path: str, data: bytes) -> None:
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".bethecs-")
    with os.fdopen(fd, "wb") as fh:
        fh.write(data)
    os.replace(tmp, path)


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv or argv[0] in ("-h", "--help"):
        sys.stdout.write(_usage())
        return EXIT_OK if argv else EXIT_USAGE
    if argv[0] == "--version":
        sys.stdout.write(__version__ + "\n")
        return EXIT_OK
    if argv[0] not in COMMANDS or (len(argv) > 1 and not argv[1].startswith("-")
                                   and argv[1] not in COMMANDS[argv[0]]):
        sys.stderr.write(_usage())
        return EXIT_USAGE
    try:
        config = config_from_args(argv)
    except ValidationError as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_INVALID
    except SystemExit as e:
        return int(e.code or 0)
    code, data = run(config)
    if config.output:
        _write_atomic(config.output, data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    return code


if __name__ == "__main__":
    raise SystemExit(main())
