"""Command-line front end.

Exit codes: 0 success, 1 invalid arguments, 2 oracle and theory disagree by
more than the factor K, 3 admissibility failure, 4 malformed weight or
problem document, 5 unsupported regime.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional

from . import weights as wm
from .embedding import (FORMULAS, Parameters, ReducedProblem, TrivialRegimeError, as_number,
                        classify_regime, copson_to_cesaro, embedding_constant, reduce_embedding,
                        regime_predicates)
from .errors import AdmissibilityError, DegenerateWeightError, UnsupportedRegimeError
from .extended import to_json_value
from .oracle import MIN_BUDGET, best_constant_lower_bound, triviality_probe

EXIT_OK, EXIT_ARGS, EXIT_EQUIV, EXIT_ADMISSIBILITY, EXIT_DOCUMENT, EXIT_UNSUPPORTED = range(6)
K_DEFAULT = 32.0
BUDGET_DEFAULT = 3000
TRIVIAL_HINT = "p > 1: run `cesaro oracle --triviality` to exhibit the blow-up on spikes"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ARGS, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    command: str
    params: Optional[str] = None
    u: Optional[str] = None
    v: Optional[str] = None
    w: Optional[str] = None
    problem: Optional[str] = None
    budget: int = BUDGET_DEFAULT
    K: float = K_DEFAULT
    seed: int = 0
    out: Optional[str] = None
    jobs: int = 1
    triviality: bool = False
    widths: List[float] = field(default_factory=lambda: [1e-1, 1e-2, 1e-3, 1e-4])
    tau: float = 1.0
    proof_variant: bool = False
    embedding: Optional[str] = None
    u1: Optional[str] = None
    v1: Optional[str] = None
    u2: Optional[str] = None
    v2: Optional[str] = None
    exponents: Optional[str] = None
    p_values: Optional[str] = None
    q_values: Optional[str] = None
    theta_values: Optional[str] = None
    no_oracle: bool = False

    def validate(self):
        if not self.K > 1:
            raise UsageError("--K must exceed 1")
        if self.command in ("oracle", "verify", "sweep") and not self.triviality \
                and self.budget < MIN_BUDGET:
            raise UsageError(f"--budget must be at least {MIN_BUDGET}")
        if self.jobs < 1:
            raise UsageError("--jobs must be positive")


# -- inputs ------------------------------------------------------------------------

def _weight(path, default=None):
    if path is None:
        if default is None:
            raise UsageError("missing weight document")
        return default
    return wm.load(path)


def _numbers(text, n=None, flag="--params"):
    parts = [s for s in (text or "").replace(" ", "").split(",") if s]
    if n is not None and len(parts) != n:
        raise UsageError(f"{flag} expects {n} comma-separated values")
    try:
        return [as_number(s) for s in parts]
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"{flag}: cannot parse {text!r}") from None


def _params(cfg):
    if cfg.params is None:
        raise UsageError("--params p,q,theta is required")
    return Parameters(*_numbers(cfg.params, 3))


def load_problem(path) -> ReducedProblem:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise wm.WeightDocumentError(f"invalid JSON ({exc.msg})", f"{path}:{exc.lineno}:{exc.colno}") from None
    if not isinstance(doc, dict) or not {"params", "u", "v", "w"} <= set(doc):
        raise wm.WeightDocumentError("problem document needs params, u, v and w", str(path))
    prm = doc["params"]
    try:
        P = Parameters(*(as_number(str(prm[k])) for k in ("p", "q", "theta")))
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise wm.WeightDocumentError(f"bad parameters ({exc})", f"{path}:params") from None
    ws = {}
    for k in "uvw":
        try:
            ws[k] = wm.from_dict(doc[k])
        except wm.WeightDocumentError as exc:
            raise wm.WeightDocumentError(exc.args[0], f"{path}:{k}") from None
    return ReducedProblem(P, ws["u"], ws["v"], ws["w"])


def _problem(cfg) -> ReducedProblem:
    if cfg.problem:
        return load_problem(cfg.problem)
    one = wm.constant(1.0)
    return ReducedProblem(_params(cfg), _weight(cfg.u, one), _weight(cfg.v, one), _weight(cfg.w, one))


def _dump(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


# -- commands ----------------------------------------------------------------------

def cmd_reduce(cfg):
    p1, q1, p2, q2 = _numbers(cfg.embedding, 4, "--embedding")
    pr = reduce_embedding(p1, q1, p2, q2, _weight(cfg.u1), _weight(cfg.v1), _weight(cfg.u2), _weight(cfg.v2))
    return EXIT_OK, _dump(pr.to_dict())


def cmd_copson(cfg):
    q, p = _numbers(cfg.exponents, 2, "--exponents")
    ut, vt = copson_to_cesaro(q, p, _weight(cfg.u), _weight(cfg.v))
    return EXIT_OK, _dump({"u": ut.to_dict(), "v": vt.to_dict()})


def cmd_classify(cfg):
    P = _params(cfg)
    reg = classify_regime(P)
    doc = {"params": P.to_dict(), "regime": reg.tag, "formulas": [f"A{i}" for i in reg.formulas],
           "predicates": regime_predicates(P)}
    if reg.tag == "Trivial_p_gt_1":
        doc["hint"] = TRIVIAL_HINT
        print(TRIVIAL_HINT, file=sys.stderr)
    return EXIT_OK, _dump(doc)


def cmd_constant(cfg):
    rep = embedding_constant(_problem(cfg), proof_variant=cfg.proof_variant)
    return (EXIT_OK if rep.applicable else EXIT_ADMISSIBILITY), _dump(rep.to_dict())


def cmd_oracle(cfg):
    pr = _problem(cfg)
    if cfg.triviality:
        rows = triviality_probe(pr, cfg.widths, cfg.tau)
        doc = {"params": pr.params.to_dict(), "tau": cfg.tau,
               "spikes": [{"width": d, "ratio": to_json_value(r)} for d, r in rows]}
        return EXIT_OK, _dump(doc)
    res = best_constant_lower_bound(pr, cfg.budget, cfg.seed)
    doc = {"params": pr.params.to_dict(), "lower_bound": to_json_value(res.value),
           "evaluations": res.evaluations, "witness": res.witness.to_dict(), "schedule": res.schedule}
    return EXIT_OK, _dump(doc)


def equivalence(T, L, K):
    """Two-sided check ``L <= K T`` and ``T <= K L``."""
    return bool(L <= K * T and T <= K * L)


def cmd_verify(cfg):
    pr = _problem(cfg)
    rep = embedding_constant(pr, proof_variant=cfg.proof_variant)
    doc = {"constant": rep.to_dict(), "K": cfg.K}
    if not rep.applicable:
        doc["verdict"] = "admissibility-failure"
        return EXIT_ADMISSIBILITY, _dump(doc)
    res = best_constant_lower_bound(pr, cfg.budget, cfg.seed)
    ok = equivalence(rep.combined, res.value, cfg.K)
    doc.update({"lower_bound": to_json_value(res.value), "witness": res.witness.to_dict(),
                "evaluations": res.evaluations, "schedule": res.schedule,
                "verdict": "pass" if ok else "fail"})
    return (EXIT_OK if ok else EXIT_EQUIV), _dump(doc)


SWEEP_COLUMNS = ["p", "q", "theta", "regime"] + [f"A{i}" for i in range(1, 15)] + \
    ["combined", "oracle", "verdict"]


def _fmt(x):
    if x is None or x == "":
        return ""
    return "inf" if x == math.inf else repr(float(x))


def sweep_row(P: Parameters, u, v, w, budget, seed, K, oracle=True):
    """One CSV row (as a list of strings) for the point ``P``."""
    reg = classify_regime(P)
    row = {"p": str(P.p), "q": str(P.q), "theta": str(P.theta), "regime": reg.tag}
    if not reg.is_theorem_case:
        row["verdict"] = "trivial" if reg.tag == "Trivial_p_gt_1" else "unsupported"
        return [row.get(c, "") for c in SWEEP_COLUMNS]
    pr = ReducedProblem(P, u, v, w)
    try:
        rep = embedding_constant(pr)
    except (AdmissibilityError, DegenerateWeightError):
        row["verdict"] = "admissibility-failure"
        return [row.get(c, "") for c in SWEEP_COLUMNS]
    for i, val in rep.components.items():
        row[f"A{i}"] = _fmt(val)
    row["combined"] = _fmt(rep.combined)
    if not rep.applicable:
        row["verdict"] = "admissibility-failure"
    elif oracle:
        L = best_constant_lower_bound(pr, budget, seed).value
        row["oracle"] = _fmt(L)
        row["verdict"] = "pass" if equivalence(rep.combined, L, K) else "fail"
    else:
        row["verdict"] = "applicable"
    return [row.get(c, "") for c in SWEEP_COLUMNS]


def _sweep_task(args):
    return sweep_row(*args)


def cmd_sweep(cfg):
    ps = _numbers(cfg.p_values, None, "--p")
    qs = _numbers(cfg.q_values, None, "--q")
    ts = _numbers(cfg.theta_values, None, "--theta")
    if not (ps and qs and ts):
        raise UsageError("--p, --q and --theta need at least one value each")
    one = wm.constant(1.0)
    u, v, w = _weight(cfg.u, one), _weight(cfg.v, one), _weight(cfg.w, one)
    tasks = [(Parameters(p, q, t), u, v, w, cfg.budget, cfg.seed, cfg.K, not cfg.no_oracle)
             for p in ps for q in qs for t in ts]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(cfg.jobs) as ex:
            rows = list(ex.map(_sweep_task, tasks))
    else:
        rows = [_sweep_task(t) for t in tasks]
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(SWEEP_COLUMNS)
    wr.writerows(rows)
    failed = any(r[-1] == "fail" for r in rows)
    return (EXIT_EQUIV if failed else EXIT_OK), buf.getvalue()


COMMANDS = {"reduce": cmd_reduce, "classify": cmd_classify, "constant": cmd_constant,
            "oracle": cmd_oracle, "verify": cmd_verify, "sweep": cmd_sweep,
            "copson-transform": cmd_copson}


def run(cfg: RunConfig):
    """Execute a configuration; returns ``(exit_status, report_text)``."""
    try:
        cfg.validate()
        return COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        return EXIT_ARGS, f"error: {exc}\n"
    except wm.WeightDocumentError as exc:
        return EXIT_DOCUMENT, f"malformed document: {exc}\n"
    except TrivialRegimeError as exc:
        return EXIT_UNSUPPORTED, f"unsupported: {exc}\n"
    except UnsupportedRegimeError as exc:
        return EXIT_UNSUPPORTED, f"unsupported: {exc}\n"
    except (AdmissibilityError, DegenerateWeightError) as exc:
        return EXIT_ADMISSIBILITY, f"admissibility failure: {exc}\n"


def build_parser():
    ap = _Parser(prog="cesaro", description="Best constants for embeddings between weighted Cesaro spaces.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, weights=True):
        sp.add_argument("--params", help="p,q,theta (fractions such as 1/2 are exact)")
        if weights:
            sp.add_argument("--u", help="weight document for u (default 1)")
            sp.add_argument("--v", help="weight document for v (default 1)")
            sp.add_argument("--w", help="weight document for w (default 1)")
            sp.add_argument("--problem", help="problem document (as written by `reduce`)")
        sp.add_argument("--out", help="write the report here instead of stdout")

    def search(sp):
        sp.add_argument("--budget", type=int, default=BUDGET_DEFAULT)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--K", type=float, default=K_DEFAULT)

    sp = sub.add_parser("reduce", help="map an embedding onto the reduced inequality")
    sp.add_argument("--embedding", required=True, help="p1,q1,p2,q2")
    for k in ("u1", "v1", "u2", "v2"):
        sp.add_argument(f"--{k}", required=True)
    sp.add_argument("--out")

    sp = sub.add_parser("copson-transform", help="tilde weights t^(-2/s) w(1/t)")
    sp.add_argument("--exponents", required=True, help="q,p")
    sp.add_argument("--u", required=True)
    sp.add_argument("--v", required=True)
    sp.add_argument("--out")

    sp = sub.add_parser("classify", help="regime of p,q,theta")
    common(sp, weights=False)

    sp = sub.add_parser("constant", help="characterizing functionals")
    common(sp)
    sp.add_argument("--proof-variant", action="store_true", help="alternative inner exponent in A7")

    sp = sub.add_parser("oracle", help="step-function lower bound or spike probe")
    common(sp)
    search(sp)
    sp.add_argument("--triviality", action="store_true")
    sp.add_argument("--widths", default="1e-1,1e-2,1e-3,1e-4")
    sp.add_argument("--tau", type=float, default=1.0)

    sp = sub.add_parser("verify", help="constant and oracle with the two-sided K check")
    common(sp)
    search(sp)
    sp.add_argument("--proof-variant", action="store_true")

    sp = sub.add_parser("sweep", help="CSV over a parameter grid")
    sp.add_argument("--p", dest="p_values", required=True)
    sp.add_argument("--q", dest="q_values", required=True)
    sp.add_argument("--theta", dest="theta_values", required=True)
    for k in "uvw":
        sp.add_argument(f"--{k}")
    search(sp)
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--no-oracle", action="store_true")
    sp.add_argument("--out")
    return ap


def config_from_args(ns) -> RunConfig:
    d = {k: v for k, v in vars(ns).items() if v is not None}
    if "widths" in d:
        try:
            d["widths"] = [float(x) for x in d["widths"].split(",") if x]
        except ValueError:
            raise UsageError("--widths expects comma-separated numbers") from None
    d.pop("proof_variant", None) if not getattr(ns, "proof_variant", False) else None
    return RunConfig(**d)


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(ns)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ARGS
    status, text = run(cfg)
    if status in (EXIT_ARGS, EXIT_DOCUMENT, EXIT_UNSUPPORTED) or (
            status == EXIT_ADMISSIBILITY and not text.startswith(("{", "p,"))):
        sys.stderr.write(text)
    elif cfg.out:
        Path(cfg.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
