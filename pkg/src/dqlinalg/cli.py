"""Command-line front end.

Usage::

    dqlinalg run svd C.dqm
    dqlinalg run gsvd2 A.dqm B.dqm --out-dir out/
    dqlinalg run cs W.dqm --split 3 --col-split 3
    dqlinalg verify out/A.gsvd2.report

Matrix files are text: a header ``DQMAT v1 <rows> <cols>`` followed by one
line per entry (row-major) holding 8 numbers, the standard quaternion
``w x y z`` then the infinitesimal one.  Reports are ``key = value`` lines.

Exit codes: 0 pass, 2 parse/layout error, 3 unsuitable input (dimensions,
zero matrix, ...), 4 verification failure (factors are still written).
"""
from __future__ import annotations

import argparse
import hashlib
import math
import sys
from pathlib import Path

import numpy as np

from .dense import DQMatrix, matmul, max_residual
from .errors import DQError
from .factor_cs import cs_decompose_2x1, cs_decompose_2x2
from .factor_gsvd import dqgsvd1_cs, dqgsvd1_regular, dqgsvd2
from .factor_psvd_ccd import dqccd, dqpsvd, product_svd
from .factor_qr import qr_pivoted
from .factor_svd import dqsvd
from .scalar import DualNumber, ToleranceConfig

MAGIC = "DQMAT"
VERSION = "v1"

EXIT_OK, EXIT_PARSE, EXIT_INPUT, EXIT_VERIFY = 0, 2, 3, 4


class FormatError(Exception):
    """Malformed matrix file or report."""


# --------------------------------------------------------------------------
# matrix files

def format_dqm(M: DQMatrix) -> str:
    arr = M.to_array()
    lines = [f"{MAGIC} {VERSION} {M.rows} {M.cols}"]
    for i in range(M.rows):
        for j in range(M.cols):
            lines.append(" ".join("{:.17g}".format(float(x)) for x in arr[i, j]))
    return "\n".join(lines) + "\n"


def parse_dqm(text: str) -> DQMatrix:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise FormatError("empty matrix file")
    head = lines[0].split()
    if len(head) != 4 or head[0] != MAGIC or head[1] != VERSION:
        raise FormatError(f"bad header {lines[0]!r}")
    try:
        m, n = int(head[2]), int(head[3])
    except ValueError as exc:
        raise FormatError(f"bad dimensions in header {lines[0]!r}") from exc
    if m < 0 or n < 0:
        raise FormatError("negative dimensions")
    body = lines[1:]
    if len(body) != m * n:
        raise FormatError(f"expected {m * n} records, found {len(body)}")
    arr = np.zeros((m, n, 8))
    for idx, ln in enumerate(body):
        parts = ln.split()
        if len(parts) != 8:
            raise FormatError(f"record {idx + 1} has {len(parts)} fields, expected 8")
        try:
            vals = [float(x) for x in parts]
        except ValueError as exc:
            raise FormatError(f"record {idx + 1}: {exc}") from exc
        if not all(math.isfinite(v) for v in vals):
            raise FormatError(f"record {idx + 1} has a non-finite value")
        arr[idx // n, idx % n] = vals
    return DQMatrix.from_array(arr)


def read_dqm(path) -> DQMatrix:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc
    return parse_dqm(text)


def write_dqm(path, M: DQMatrix):
    Path(path).write_text(format_dqm(M))


def sha256_of(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def fmt_dual(x: DualNumber) -> str:
    return f"{x.standard:.17g}{x.infinitesimal:+.17g}eps"


def _diag_of(M: DQMatrix):
    k = min(M.shape)
    a = M.to_array()
    return [DualNumber(float(a[i, i, 0]), float(a[i, i, 4])) for i in range(k)]


# --------------------------------------------------------------------------
# invariant checks shared by run and verify

def _unit(M: DQMatrix) -> float:
    n = M.cols
    r = max(max_residual(matmul(M.H, M), DQMatrix.eye(n)))
    if M.rows == n:
        r = max(r, max(max_residual(matmul(M, M.H), DQMatrix.eye(n))))
    return r


def _orthocols(M: DQMatrix) -> float:
    return max(max_residual(matmul(M.H, M), DQMatrix.eye(M.cols))) if M.cols else 0.0


def _acc(pairs):
    st = max((p[0] for p in pairs), default=0.0)
    inn = max((p[1] for p in pairs), default=0.0)
    return st, inn


def check(command: str, inputs: list, F: dict, meta: dict) -> dict:
    """Recompute residuals of a decomposition from its factors alone."""
    unit = pairing = inverse = 0.0
    if command == "qr":
        A = inputs[0]
        P = F["P"]
        Rf = DQMatrix.vstack([F["R"], DQMatrix.zeros(F["Q"].rows - F["R"].rows, F["R"].cols)])
        rec = [max_residual(matmul(A, P), matmul(F["Q"], Rf))]
        unit = max(_unit(F["Q"]), _unit(P))
    elif command in ("svd", "product-svd"):
        A = inputs[0] if command == "svd" else matmul(inputs[0], inputs[1])
        rec = [max_residual(A, matmul(matmul(F["U"], F["S"]), F["V"].H))]
        unit = max(_unit(F["U"]), _unit(F["V"]))
    elif command == "cs":
        W = inputs[0]
        r1 = int(meta["block.r1"])
        left = DQMatrix.blkdiag(F["U1"], F["U2"])
        right = F["V1"] if "V2" not in F else DQMatrix.blkdiag(F["V1"], F["V2"])
        rec = [max_residual(matmul(matmul(left.H, W), right), F["M"])]
        unit = max(_unit(F["U1"]) if r1 else 0.0, _unit(F["U2"]) if W.rows - r1 else 0.0,
                   _unit(right) if right.cols else 0.0)
        pairing = _orthocols(F["M"])
    elif command in ("gsvd1", "gsvd1-regular"):
        A, B = inputs
        rec = [max_residual(A, matmul(matmul(F["U"], F["SA"]), F["X"])),
               max_residual(B, matmul(matmul(F["V"], F["SB"]), F["X"]))]
        unit = max(_unit(F["U"]), _unit(F["V"]))
        k = int(meta.get("block.k_cs", meta.get("block.k", 0)))
        pairing = _orthocols(DQMatrix.vstack([F["SA"], F["SB"]])[:, :k])
        if command == "gsvd1-regular":
            n = F["X"].rows
            inverse = max(max_residual(matmul(F["X"], F["Xinv"]), DQMatrix.eye(n)))
            pairing = max(pairing, _orthocols(F["N"]))
    elif command == "gsvd2":
        A, B = inputs
        rec = [max_residual(matmul(matmul(F["U"].H, A), F["X"]), F["SA"]),
               max_residual(matmul(matmul(F["V"].H, B), F["X"]), F["SB"])]
        unit = max(_unit(F["U"]), _unit(F["V"]))
        t = int(meta["block.t"])
        pairing = _orthocols(DQMatrix.vstack([F["SA"], F["SB"]])[:, :t])
    elif command == "psvd":
        A, B = inputs
        rec = [max_residual(A, matmul(matmul(F["U"], F["DA"]), F["Xinv"])),
               max_residual(B, matmul(matmul(F["X"], F["DB"]), F["Y"]))]
        unit = _unit(F["U"])
        n = F["X"].rows
        inverse = max(max_residual(matmul(F["X"], F["Xinv"]), DQMatrix.eye(n)))
    elif command == "ccd":
        A, B = inputs
        rec = [max_residual(A, matmul(matmul(F["Q"], F["SA"]), F["XA"])),
               max_residual(B, matmul(matmul(F["Q"], F["SB"]), F["XB"]))]
        unit = _unit(F["Q"])
        pairing = _orthocols(F["SA"][:, :int(meta["block.rank_A"])])
    else:
        raise FormatError(f"unknown command {command!r}")
    st, inn = _acc(rec)
    return {"residual_st": st, "residual_in": inn, "unitarity": unit,
            "pairing": pairing, "inverse": inverse}


# --------------------------------------------------------------------------
# decompositions

TWO_INPUTS = {"gsvd1", "gsvd1-regular", "gsvd2", "psvd", "ccd", "product-svd"}
COMMANDS = ["qr", "svd", "cs"] + sorted(TWO_INPUTS)


def _perm_matrix(perm) -> DQMatrix:
    n = len(perm)
    P = np.zeros((n, n))
    P[perm, np.arange(n)] = 1.0
    return DQMatrix.real(P)


def decompose(command: str, mats: list, tol: ToleranceConfig, split=None, col_split=None):
    """Run a decomposition; returns (factors, metadata lines)."""
    meta = {}
    if command == "qr":
        f = qr_pivoted(mats[0], tol)
        F = {"Q": f.Q, "R": f.R, "P": _perm_matrix(f.perm)}
        meta.update({"block.rank": f.rank, "block.arank": f.arank})
    elif command == "svd":
        f = dqsvd(mats[0], tol)
        F = {"U": f.U, "S": f.middle(), "V": f.V}
        meta.update({"block.rank": f.rank, "block.arank": f.arank,
                     "sigma": ", ".join(fmt_dual(x) for x in f.sigma)})
    elif command == "product-svd":
        f = product_svd(mats[0], mats[1], tol)
        F = {"H": f.U, "S": f.middle(), "N": f.V}
        F["U"], F["V"] = F.pop("H"), F.pop("N")
        meta.update({"block.rank": f.rank, "block.arank": f.arank,
                     "sigma": ", ".join(fmt_dual(x) for x in f.sigma)})
    elif command == "cs":
        if split is None:
            raise FormatError("cs needs --split")
        W = mats[0]
        if col_split is None:
            f = cs_decompose_2x1(W, split, tol)
            F = {"U1": f.U1, "U2": f.U2, "V1": f.V1, "M": f.middle}
        else:
            f = cs_decompose_2x2(W, split, col_split, tol)
            F = {"U1": f.U1, "U2": f.U2, "V1": f.V1, "V2": f.V2, "M": f.middle}
        meta["block.r1"] = split
        meta.update({f"block.{k}": v for k, v in f.blocks.items()})
        meta["C"] = ", ".join(fmt_dual(x) for x in f.C)
        meta["S"] = ", ".join(fmt_dual(x) for x in f.S)
    elif command in ("gsvd1", "gsvd1-regular"):
        A, B = mats
        g = (dqgsvd1_cs if command == "gsvd1" else dqgsvd1_regular)(A, B, tol)
        F = {"U": g.U, "V": g.V, "X": g.X, "SA": g.middle_A(), "SB": g.middle_B()}
        if command == "gsvd1-regular":
            F["Xinv"] = g.X_inv
            F["N"] = DQMatrix.vstack([g.NA, g.NB])
            meta["block.k_cs"] = g.blocks["t"]
        else:
            meta["X_singular"] = str(g.X_singular).lower()
        meta.update({f"block.{k}": v for k, v in g.blocks.items()})
        meta["sigma_C"] = ", ".join(fmt_dual(x) for x in g.sigma_C)
        meta["sigma_A"] = ", ".join(fmt_dual(x) for x in _diag_of(g.SigmaA))
        meta["sigma_B"] = ", ".join(fmt_dual(x) for x in _diag_of(g.SigmaB))
    elif command == "gsvd2":
        A, B = mats
        g = dqgsvd2(A, B, tol)
        F = {"U": g.U, "V": g.V, "X": g.X, "SA": g.SigmaA, "SB": g.SigmaB}
        meta.update({f"block.{k}": v for k, v in g.blocks.items()})
        meta["sigma_A"] = ", ".join(fmt_dual(x) for x in _diag_of(g.SigmaA))
        meta["sigma_B"] = ", ".join(fmt_dual(x) for x in _diag_of(g.SigmaB))
    elif command == "psvd":
        A, B = mats
        ps = dqpsvd(A, B, tol)
        F = {"U": ps.U, "X": ps.X, "Xinv": ps.X_inv, "Y": ps.Y, "DA": ps.DA, "DB": ps.DB}
        meta.update({f"block.{k}": v for k, v in ps.blocks.items()})
    elif command == "ccd":
        A, B = mats
        c = dqccd(A, B, tol)
        F = {"Q": c.Q, "XA": c.XA, "XB": c.XB, "SA": c.SigmaA, "SB": c.SigmaB}
        meta.update({f"block.{k}": v for k, v in c.blocks.items()})
        meta["regular"] = str(c.regular).lower()
        meta["correlations"] = ", ".join(fmt_dual(x) for x in c.correlations)
    else:  # pragma: no cover - argparse restricts choices
        raise FormatError(f"unknown command {command!r}")
    return F, meta


# --------------------------------------------------------------------------
# reports

def format_report(items: dict) -> str:
    return "".join(f"{k} = {v}\n" for k, v in items.items())


def parse_report(text: str) -> dict:
    out = {}
    for n, ln in enumerate(text.splitlines(), 1):
        if not ln.strip() or ln.lstrip().startswith("#"):
            continue
        if " = " not in ln:
            raise FormatError(f"report line {n} is not 'key = value'")
        k, v = ln.split(" = ", 1)
        out[k.strip()] = v.strip()
    return out


def _residual_items(res: dict, tol: ToleranceConfig):
    items = {k: f"{v:.3e}" for k, v in res.items()}
    items["residual_tol"] = f"{tol.residual_tol:.3e}"
    ok = all(v <= tol.residual_tol for v in res.values())
    items["pass"] = str(ok).lower()
    return items, ok


def cmd_run(args, tol: ToleranceConfig) -> int:
    command = args.command
    need = 2 if command in TWO_INPUTS else 1
    if len(args.inputs) != need:
        print(f"error: {command} takes {need} input file(s)", file=sys.stderr)
        return EXIT_PARSE
    mats = [read_dqm(p) for p in args.inputs]
    try:
        F, meta = decompose(command, mats, tol, args.split, args.col_split)
    except DQError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    first = Path(args.inputs[0])
    out_dir = Path(args.out_dir) if args.out_dir else first.parent
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = first.name[:-4] if first.name.endswith(".dqm") else first.name
    report = {"command": command}
    for i, p in enumerate(args.inputs):
        report[f"input.{i}"] = str(Path(p).resolve())
        report[f"input.{i}.sha256"] = sha256_of(p)
    for name, M in F.items():
        path = out_dir / f"{stem}.{command}.{name}.dqm"
        write_dqm(path, M)
        report[f"factor.{name}"] = str(path.resolve())
    report["tol.appreciable"] = repr(tol.appreciable_tol)
    report["tol.rank"] = repr(tol.rank_tol)
    report.update({k: str(v) for k, v in meta.items()})
    # residuals come from the written files so run and verify agree
    Fr = {name: read_dqm(report[f"factor.{name}"]) for name in F}
    items, ok = _residual_items(check(command, mats, Fr, report), tol)
    report.update(items)
    text = format_report(report)
    rpath = out_dir / f"{stem}.{command}.report"
    rpath.write_text(text)
    sys.stdout.write(text)
    sys.stdout.write(f"report = {rpath.resolve()}\n")
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_verify(args, tol: ToleranceConfig) -> int:
    try:
        rep = parse_report(Path(args.report).read_text())
    except OSError as exc:
        raise FormatError(f"cannot read report: {exc}") from exc
    command = rep.get("command")
    if command not in COMMANDS:
        raise FormatError(f"report has unknown command {command!r}")
    base = Path(args.report).resolve().parent
    inputs, digests_ok = [], True
    i = 0
    while f"input.{i}" in rep:
        p = Path(rep[f"input.{i}"])
        p = p if p.is_absolute() else base / p
        inputs.append(read_dqm(p))
        want = rep.get(f"input.{i}.sha256")
        if want is not None and want != sha256_of(p):
            digests_ok = False
        i += 1
    if len(inputs) != (2 if command in TWO_INPUTS else 1):
        raise FormatError("report lists the wrong number of inputs")
    F = {}
    for k, v in rep.items():
        if k.startswith("factor."):
            p = Path(v)
            F[k[len("factor."):]] = read_dqm(p if p.is_absolute() else base / p)
    if args.residual_tol is None and "residual_tol" in rep:
        tol = ToleranceConfig(tol.appreciable_tol, tol.rank_tol, float(rep["residual_tol"]))
    try:
        res = check(command, inputs, F, rep)
    except (KeyError, ValueError) as exc:
        raise FormatError(f"factor layout does not match {command}: {exc}") from exc
    except DQError as exc:
        raise FormatError(f"factor layout does not match {command}: {exc}") from exc
    items, ok = _residual_items(res, tol)
    out = {"command": command, "inputs_match": str(digests_ok).lower()}
    out.update(items)
    ok = ok and digests_ok
    out["pass"] = str(ok).lower()
    sys.stdout.write(format_report(out))
    return EXIT_OK if ok else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    tolp = argparse.ArgumentParser(add_help=False)
    tolp.add_argument("--appreciable-tol", type=float, default=None)
    tolp.add_argument("--rank-tol", type=float, default=None)
    tolp.add_argument("--residual-tol", type=float, default=None)
    ap = argparse.ArgumentParser(prog="dqlinalg", description="Dual quaternion matrix decompositions.")
    sub = ap.add_subparsers(dest="action", required=True)
    run = sub.add_parser("run", parents=[tolp], help="decompose matrices and write factors")
    run.add_argument("command", choices=COMMANDS)
    run.add_argument("inputs", nargs="+")
    run.add_argument("--split", type=int, default=None, help="row split for cs")
    run.add_argument("--col-split", type=int, default=None, help="column split for a 2x2 cs")
    run.add_argument("--out-dir", default=None)
    ver = sub.add_parser("verify", parents=[tolp], help="recheck a report against its files")
    ver.add_argument("report")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        base = ToleranceConfig()
        tol = ToleranceConfig(
            args.appreciable_tol if args.appreciable_tol is not None else base.appreciable_tol,
            args.rank_tol if args.rank_tol is not None else base.rank_tol,
            args.residual_tol if args.residual_tol is not None else base.residual_tol,
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        if args.action == "run":
            return cmd_run(args, tol)
        return cmd_verify(args, tol)
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
