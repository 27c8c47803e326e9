"""Command-line frontend: JSON in, verified JSON out.

Exit codes: 0 success, 2 malformed or rejected input (message on stderr),
3 internal invariant violation (reproduction dump on stderr).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import traceback
from typing import Any, Optional, Sequence

import numpy as np

from .algebra import Algebra, AlgebraMap, InvariantViolation, from_polynomial, radical
from .base import PrimeField, Subspace, is_prime, rank
from .kummer import factor_cyclotomic
from .noncomm import find_zero_divisor
from .poly import Poly
from .smooth import DEFAULT_SMOOTH_BOUND, smooth_factor
from .tensoraut import DEFAULT_BUDGET, RecursionBudgetExceeded, factor_or_automorphism, main_decompose

__all__ = ["run", "main", "InputError"]

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INVARIANT = 3


class InputError(ValueError):
    """Malformed or rejected input."""


# ---------------------------------------------------------------------------
# JSON encodings
# ---------------------------------------------------------------------------


def _ints(v) -> list:
    return [int(c) for c in np.asarray(v).reshape(-1)]


def _matrix(m) -> list:
    return [[int(c) for c in row] for row in np.asarray(m)]


def canonical(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def input_hash(command: str, data: Any) -> str:
    return hashlib.sha256(canonical({"command": command, "input": data}).encode()).hexdigest()


def _int(obj: Any, what: str) -> int:
    if isinstance(obj, bool) or not isinstance(obj, int):
        raise InputError(f"{what} must be an integer")
    return obj


def _prime(obj: Any) -> int:
    p = _int(obj, "p")
    if not is_prime(p):
        raise InputError(f"p = {p} is not prime")
    return p


def _field(data: dict) -> PrimeField:
    if not isinstance(data, dict) or "p" not in data:
        raise InputError("expected an object with a prime 'p'")
    return PrimeField(_prime(data["p"]))


def parse_poly(data: Any) -> Poly:
    field_ = _field(data)
    coeffs = data.get("coeffs")
    if not isinstance(coeffs, list) or not coeffs:
        raise InputError("'coeffs' must be a nonempty list")
    cs = [_int(c, "coefficient") for c in coeffs]
    if cs[-1] % field_.p == 0:
        raise InputError("leading coefficient must be nonzero mod p")
    return Poly(field_, cs)


def poly_json(f: Poly) -> dict:
    return {"p": f.p, "coeffs": list(f.coeffs)}


def parse_algebra(data: Any) -> Algebra:
    field_ = _field(data)
    n = _int(data.get("dim"), "dim")
    table = data.get("table")
    try:
        arr = np.array(table, dtype=object)
    except (TypeError, ValueError) as exc:
        raise InputError("'table' is not a rectangular array") from exc
    if arr.shape != (n, n, n) or n < 1:
        raise InputError(f"'table' must be a {n}x{n}x{n} array")
    for c in arr.reshape(-1):
        _int(c, "table entry")
    one = data.get("one")
    if one is not None:
        if not isinstance(one, list) or len(one) != n:
            raise InputError(f"'one' must be a list of length {n}")
        one = [_int(c, "'one' entry") for c in one]
    try:
        return Algebra(field_, arr.astype(np.int64) if field_.dtype is not object else arr, one)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def algebra_json(alg: Algebra) -> dict:
    return {"p": alg.p, "dim": alg.dim, "table": [_matrix(m) for m in alg.table], "one": _ints(alg.one)}


# ---------------------------------------------------------------------------
# checks shared by emission and ``verify``
# ---------------------------------------------------------------------------


def check_factor(f: Poly, g: Poly) -> dict:
    proper = 0 < g.deg < f.deg
    return {"proper_degree": proper, "divides": bool(proper and (f % g).is_zero())}


def check_automorphism(alg: Algebra, matrix: Any, order: Any) -> dict:
    try:
        m = np.array(matrix, dtype=object) % alg.p
        ok_shape = m.shape == (alg.dim, alg.dim)
    except (TypeError, ValueError):
        ok_shape = False
    if not ok_shape or isinstance(order, bool) or not isinstance(order, int):
        return {"shape": False, "bijective": False, "unital": False, "multiplicative": False, "exact_order": False}
    if alg.field.dtype is not object:
        m = m.astype(np.int64)
    sigma = AlgebraMap(alg, alg, m, kind="automorphism")
    return {
        "shape": True,
        "bijective": sigma.is_injective(),
        "unital": sigma.is_unital(),
        "multiplicative": sigma.is_multiplicative(),
        "exact_order": order == alg.dim and sigma.multiplicative_order(cap=order) == order,
    }


def check_zero_divisor(alg: Algebra, z: Any, w: Any) -> dict:
    try:
        zv = np.array(z, dtype=object) % alg.p
        wv = np.array(w, dtype=object) % alg.p
        ok = zv.shape == (alg.dim,) and wv.shape == (alg.dim,)
    except (TypeError, ValueError):
        ok = False
    if not ok:
        return {"shape": False, "nonzero": False, "product_zero": False, "left_singular": False}
    if alg.field.dtype is not object:
        zv, wv = zv.astype(np.int64), wv.astype(np.int64)
    return {
        "shape": True,
        "nonzero": bool(np.any(zv) and np.any(wv)),
        "product_zero": not np.any(alg.mul(zv, wv)),
        "left_singular": rank(alg.lmat(zv), alg.p) < alg.dim,
    }


def check_decomposition(alg: Algebra, comps: Any) -> dict:
    p = alg.p
    out = {"idempotents": True, "orthogonal": True, "sum_is_one": True, "dimensions": True, "automorphisms": True}
    if not isinstance(comps, list) or not comps:
        return {k: False for k in out}
    total = alg.zeros()
    es = []
    for comp in comps:
        try:
            e = np.array(comp["idempotent"], dtype=object) % p
            if alg.field.dtype is not object:
                e = e.astype(np.int64)
            if e.shape != (alg.dim,):
                raise ValueError
        except (KeyError, TypeError, ValueError):
            return {k: False for k in out}
        es.append(e)
        total = (total + e) % p
        if np.any(alg.mul(e, e) != e) or not np.any(e):
            out["idempotents"] = False
            continue
        space = Subspace(p, alg.dim, alg.lmat(e).T)
        piece, _ = alg.restrict(space, e)
        if space.dim != comp.get("dim"):
            out["dimensions"] = False
            continue
        if not all(check_automorphism(piece, comp.get("matrix"), comp.get("order")).values()):
            out["automorphisms"] = False
    for i, a in enumerate(es):
        for b in es[i + 1 :]:
            if np.any(alg.mul(a, b)):
                out["orthogonal"] = False
    out["sum_is_one"] = bool(np.all(total == alg.one))
    return out


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _cyclotomic_input(args: argparse.Namespace, stdin) -> dict:
    if args.input is not None:
        data = _load(args.input, stdin)
        if not isinstance(data, dict):
            raise InputError("expected an object with 'r' and 'p'")
        return {"r": _int(data.get("r"), "r"), "p": _prime(data.get("p"))}
    if args.r is None or args.p is None:
        raise InputError("cyclotomic needs --r and --p, or --input")
    return {"r": args.r, "p": _prime(args.p)}


def _do_cyclotomic(data: dict, opts: dict) -> dict:
    r, p = data["r"], data["p"]
    if r < 1:
        raise InputError("r must be positive")
    g = factor_cyclotomic(r, p)
    return {"status": "factor", "poly": poly_json(g)}


def _do_factor(data: dict, opts: dict) -> dict:
    f = parse_poly(data)
    out = factor_or_automorphism(f, opts["budget"])
    if out.factor is not None:
        return {"status": "factor", "poly": poly_json(out.factor)}
    sigma = out.automorphism
    return {"status": "automorphism", "order": f.deg, "matrix": _matrix(sigma.matrix)}


def _do_smooth(data: dict, opts: dict) -> dict:
    f = parse_poly(data)
    out = smooth_factor(f, opts["smooth_bound"])
    cover = {"primes": [int(q) for q in out.cover.primes]} if out.cover is not None else None
    if out.factor is not None:
        res = {"status": "factor", "poly": poly_json(out.factor)}
    else:
        res = {"status": "automorphism", "order": f.deg, "matrix": _matrix(out.automorphism.matrix)}
    if cover is not None:
        res["cover"] = cover
    return res


def _decompose_algebra(data: dict) -> Algebra:
    if "coeffs" in data:
        f = parse_poly(data).monic()
        if f.deg < 1:
            raise InputError("need a polynomial of positive degree")
        return from_polynomial(f)
    return parse_algebra(data)


def _do_decompose(data: dict, opts: dict) -> dict:
    alg = _decompose_algebra(data)
    if not alg.commutative:
        raise InputError("decompose needs a commutative algebra")
    if radical(alg).dim:
        raise InputError("decompose needs a semisimple algebra")
    comps = main_decompose(alg, opts["budget"])
    return {
        "status": "decomposition",
        "components": [
            {"idempotent": _ints(c.idempotent), "dim": c.algebra.dim, "order": c.algebra.dim, "matrix": _matrix(c.sigma.matrix)}
            for c in comps
        ],
    }


def _do_zerodiv(data: dict, opts: dict) -> dict:
    alg = parse_algebra(data)
    zd = find_zero_divisor(alg, opts["budget"])
    return {"status": "zero_divisor", "z": _ints(zd.z.v), "w": _ints(zd.w.v)}


def verification_for(command: str, data: dict, result: dict) -> dict:
    """Recheck ``result`` against ``data`` from scratch."""
    status = result.get("status")
    if command == "cyclotomic":
        from .poly import cyclotomic

        p, r = data["p"], data["r"]
        if status != "factor" or r % p == 0:
            return {"status_known": False}
        phi = cyclotomic(r, PrimeField(p))
        return check_factor(phi, parse_poly(result.get("poly")))
    if command in ("factor", "smooth-factor"):
        f = parse_poly(data).monic()
        if status == "factor":
            return check_factor(f, parse_poly(result.get("poly")))
        if status == "automorphism":
            return check_automorphism(from_polynomial(f), result.get("matrix"), result.get("order"))
        return {"status_known": False}
    if command == "decompose":
        if status != "decomposition":
            return {"status_known": False}
        return check_decomposition(_decompose_algebra(data), result.get("components"))
    if command == "zerodiv":
        if status != "zero_divisor":
            return {"status_known": False}
        return check_zero_divisor(parse_algebra(data), result.get("z"), result.get("w"))
    return {"status_known": False}


_HANDLERS = {
    "cyclotomic": _do_cyclotomic,
    "factor": _do_factor,
    "decompose": _do_decompose,
    "zerodiv": _do_zerodiv,
    "smooth-factor": _do_smooth,
}


# ---------------------------------------------------------------------------
# driver
# ---------------------------------------------------------------------------


def _load(source: str, stdin=None) -> Any:
    try:
        if source == "-":
            text = (stdin or sys.stdin).read()
        else:
            with open(source, encoding="utf-8") as fh:
                text = fh.read()
        return json.loads(text)
    except OSError as exc:
        raise InputError(f"cannot read {source}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON in {source}: {exc.msg}") from exc


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="detfactor", description="Deterministic factoring over finite fields.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp: argparse.ArgumentParser, need_input: bool = True) -> None:
        sp.add_argument("--input", required=need_input, help="JSON input file, or - for stdin")
        sp.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="recursion budget multiplier")
        sp.add_argument("--smooth-bound", type=int, default=DEFAULT_SMOOTH_BOUND, help="largest allowed prime factor of p - 1")

    cyc = sub.add_parser("cyclotomic", help="a proper factor of the r-th cyclotomic polynomial mod p")
    cyc.add_argument("--r", type=int)
    cyc.add_argument("--p", type=int)
    common(cyc, need_input=False)
    for name, text in (
        ("factor", "a factor of f, or an automorphism of F_p[x]/(f) of order deg f"),
        ("decompose", "split a commutative semisimple algebra into ideals with full-order automorphisms"),
        ("zerodiv", "a zero divisor of a noncommutative algebra"),
        ("smooth-factor", "factor a split polynomial when p - 1 is smooth"),
    ):
        common(sub.add_parser(name, help=text))
    ver = sub.add_parser("verify", help="recheck a prior output against its input")
    ver.add_argument("--claim", required=True)
    common(ver)
    return ap


def _emit(obj: dict, stdout) -> None:
    stdout.write(json.dumps(obj, separators=(", ", ": ")) + "\n")


def _dump(command: str, data: Any, opts: dict, exc: BaseException, stderr) -> None:
    dump = {
        "error": f"{type(exc).__name__}: {exc}",
        "command": command,
        "input": data,
        "options": opts,
        "traceback": traceback.format_exception(type(exc), exc, exc.__traceback__),
    }
    stderr.write("invariant violation; reproduction dump follows\n")
    stderr.write(json.dumps(dump, indent=2, default=str) + "\n")


def _verify(args: argparse.Namespace, stdin) -> tuple[dict, bool]:
    claim = _load(args.claim, stdin)
    data = _load(args.input, stdin)
    if not isinstance(claim, dict) or claim.get("command") not in _HANDLERS:
        raise InputError("claim must be an object naming a known 'command'")
    command = claim["command"]
    if command == "cyclotomic":
        data = {"r": _int(data.get("r"), "r"), "p": _prime(data.get("p"))}
    checks = {"input_hash": claim.get("input_hash") == input_hash(command, data)}
    checks.update(verification_for(command, data, claim))
    ok = all(checks.values())
    out = {"status": "verified" if ok else "rejected", "command": command, "input_hash": input_hash(command, data), "verification": checks}
    return out, ok


def run(argv: Optional[Sequence[str]] = None, stdin=None, stdout=None, stderr=None) -> int:
    """Parse ``argv``, run one subcommand, write JSON to ``stdout``; return the exit code."""
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    ap = _parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    command = args.command
    opts = {"budget": args.budget, "smooth_bound": args.smooth_bound}
    data: Any = None
    try:
        if args.budget < 1 or args.smooth_bound < 2:
            raise InputError("--budget must be >= 1 and --smooth-bound >= 2")
        if command == "verify":
            out, ok = _verify(args, stdin)
            _emit(out, stdout)
            if not ok:
                stderr.write("claim rejected\n")
                return EXIT_INPUT
            return EXIT_OK
        if command == "cyclotomic":
            data = _cyclotomic_input(args, stdin)
        else:
            data = _load(args.input, stdin)
        result = _HANDLERS[command](data, opts)
        checks = verification_for(command, data, result)
        if not all(checks.values()):
            raise InvariantViolation(f"output failed verification: {checks}")
        out = {"command": command, **result, "input_hash": input_hash(command, data), "verification": checks}
        _emit(out, stdout)
        return EXIT_OK
    except RecursionBudgetExceeded as exc:
        stderr.write(f"error: {exc}; rerun with a larger --budget\n")
        return EXIT_INPUT
    except InvariantViolation as exc:
        _dump(command, data, opts, exc, stderr)
        return EXIT_INVARIANT
    except ValueError as exc:
        # Library input errors (not squarefree, cyclic unit group, ...) are ValueErrors.
        stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    except Exception as exc:  # anything else is a bug
        _dump(command, data, opts, exc, stderr)
        return EXIT_INVARIANT


def main() -> None:
    sys.exit(run())
