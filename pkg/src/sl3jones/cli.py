"""Command line interface: ``sl3jones <command> ...``.

Every command prints its result, writes its outputs and a ``manifest.txt``
under ``--out`` (default ``out/<command>``) and exits with status 0 only if
all of its checks pass.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

from .formats import RunManifest, format_comm, load_document, serialize_operators, sha256_file, sha256_text
from .golden import load_golden
from .groebner import (
    QuotientModule,
    buchberger,
    fan_is_swap_symmetric,
    fglm,
    groebner_fan,
    interior_rays,
    staircase,
)
from .guess import GuessConfig, exact_lift, heldout_verify, region_square, support_search
from .jones import jones_table
from .modfield import GUESS_PRIME
from .ore import canonicalize, comm_content_split, conjugate_transport, epsilon_primitive
from .orders import TermOrder, mono_str
from . import pipeline as pl


def _load_ops(path: str | None, names: str | None = None) -> dict:
    if path is None:
        ops = pl.load_derived()
    else:
        ops = dict(load_document(path).sections)
    if names:
        want = [n.strip() for n in names.split(",") if n.strip()]
        missing = [n for n in want if n not in ops]
        if missing:
            raise SystemExit(f"operators not found: {', '.join(missing)}")
        ops = {n: ops[n] for n in want}
    return ops


def _region(text: str) -> list:
    lo, hi = (int(x) for x in text.split(":"))
    return region_square(lo, hi)


def staircase_picture(lms, standard, size: int = 6) -> str:
    """Rows L2^size .. L2^0, columns L1^0 .. L1^size: '#' standard,
    'o' leading monomial, '.' other."""
    lms, standard = set(map(tuple, lms)), set(map(tuple, standard))
    rows = []
    for j in range(size, -1, -1):
        row = "".join("#" if (i, j) in standard else "o" if (i, j) in lms else "." for i in range(size + 1))
        rows.append(f"L2^{j} {row}")
    rows.append("     " + "".join(str(i % 10) for i in range(size + 1)) + "  (L1 exponent)")
    return "\n".join(rows)


# ---------------------------------------------------------------------------
# commands; each returns (ok, outputs: name -> text, parameters)
# ---------------------------------------------------------------------------


def cmd_jones(a):
    tab = jones_table(a.b, a.nmax, a.mode, a.v0, a.p, fallback=a.mode == "modular")
    lines = [f"{i} {j} {tab.value(i, j)}" for i in range(a.nmax + 1) for j in range(a.nmax + 1)]
    ok = all(tab.value(i, j) == tab.value(j, i) for i in range(a.nmax + 1) for j in range(a.nmax + 1))
    print("\n".join(lines))
    return ok, {"table.txt": "\n".join(lines) + "\n"}


def cmd_guess_run(a):
    cfg = GuessConfig(v0=a.v0, p=a.p, max_ldeg=a.max_ldeg, max_mdeg=a.max_mdeg,
                      oversampling=a.oversampling)
    tab = jones_table(a.b, a.nmax, "modular", a.v0, a.p, fallback=True)
    rep = support_search(tab, cfg)
    text = rep.summary() + "\n" + "\n".join(rep.log)
    print(text)
    out = {"shapes.txt": text + "\n"}
    if a.lift:
        ops = {}
        order = TermOrder.deglex(cfg.precedence)
        for k, r in enumerate(rep.shapes):
            name = pl.SHAPE_NAMES.get(order.max(r.l_support), f"G{k + 1}")
            ops[name] = exact_lift(r, a.b, cfg)
        out["lifted.ops"] = serialize_operators(ops)
        print(f"lifted {', '.join(sorted(ops))}")
    return rep.complete, out


def cmd_guess_verify(a):
    ops = _load_ops(a.op, a.names)
    tab = jones_table(a.b, int(a.region.split(":")[1]) + 4)
    ok, lines = True, []
    for name, P in ops.items():
        rep = heldout_verify(P, tab, _region(a.region))
        ok &= rep.passed
        lines.append(f"{name}: {'pass' if rep.passed else 'FAIL'} ({rep.checked} points"
                     + (f", failures {rep.failures[:5]}" if rep.failures else "") + ")")
    print("\n".join(lines))
    return ok, {"verify.txt": "\n".join(lines) + "\n"}


def cmd_gb(a):
    ops = _load_ops(a.op, a.names)
    order = TermOrder.parse(a.order)
    G = buchberger(list(ops.values()), order)
    sc = staircase(G)
    lines = [f"order {order}", f"basis {G.describe()}"]
    lines.append("staircase {" + ", ".join(mono_str(m) for m in sc.monomials) + f"}}, rank {sc.rank}")
    if sc.zero_dimensional:
        lines.append(staircase_picture(G.leading_monomials(), sc.monomials))
    out = {"basis.ops": serialize_operators({f"G{k + 1}": g for k, g in enumerate(G)})}
    if a.to:
        H = fglm(G, TermOrder.parse(a.to))
        lines.append(f"converted to {H.order}: {H.describe()}")
        out["converted.ops"] = serialize_operators(
            {f"H{k + 1}": canonicalize(h, H.order, "integral") for k, h in enumerate(H)})
    print("\n".join(lines))
    out["gb.txt"] = "\n".join(lines) + "\n"
    return True, out


def cmd_fan(a):
    ops = _load_ops(a.op, a.names)
    G = buchberger(list(ops.values()), TermOrder.deglex())
    cones = groebner_fan(G, module=QuotientModule(G))
    text = pl.describe_fan(cones) + f"\nswap symmetric {fan_is_swap_symmetric(cones)}"
    print(text)
    return True, {"fan.txt": text + "\n"}


def cmd_eps(a):
    ops = _load_ops(a.op, a.names)
    images = load_golden().images
    ok, lines = True, []
    for name, P in ops.items():
        e = epsilon_primitive(canonicalize(P, flavor="integral"))
        line = f"{name} := {format_comm(e)}"
        if name.lower() in images and a.compare:
            want = comm_content_split(images[name.lower()])[1]
            match = e == want or e == -want
            ok &= match
            line += f"\n# matches printed {name.lower()}: {match}"
        lines.append(line)
    print("\n".join(lines))
    return ok, {"eps.txt": "\n".join(lines) + "\n"}


def cmd_transport(a):
    ops = _load_ops(a.op, a.names)
    out_ops, lines, ok = {}, [], True
    for name, P in ops.items():
        T = conjugate_transport(P, a.c, a.direction)
        if T.retracted:
            out_ops[name] = T.op
            lines.append(f"{name}: retracted to the base algebra")
        else:
            lines.append(f"{name}: stays in the extension (v, M1~, M2~)")
    if a.verify is not None and a.direction == "to-TQFT":
        res = pl.transport_check(ops, a.c, a.verify, a.b)
        for name, v in res.items():
            lines.append(f"{name}: annihilates F on [0,{a.verify}]^2: {v}")
            ok &= v
    print("\n".join(lines))
    out = {"transport.txt": "\n".join(lines) + "\n"}
    if out_ops:
        out["transported.ops"] = serialize_operators(out_ops)
    return ok, out


def cmd_diag(a):
    rel = None
    if not a.recompute:
        rel = pl.load_derived().get("D")
    rep = pl.diag_recurrence(None, a.nmax, a.b, relation=rel)
    text = rep.describe()
    print(text)
    ok = rep.order == 4 and rep.tau_symmetric and rep.annihilates
    return ok, {"diag.txt": text + "\n", "diag.ops": serialize_operators({"D": rep.op, "Dn": rep.univariate})}


def cmd_pipeline(a):
    overrides = {"recompute": True if a.recompute else None, "out_dir": a.out}
    if a.config:
        cfg = pl.PipelineConfig.from_file(a.config, **overrides)
    else:
        cfg = pl.PipelineConfig(**{k: v for k, v in overrides.items() if v is not None})
    bundle = pl.pipeline_trefoil(cfg)
    print(bundle.report())
    return bundle.ok, None


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sl3jones", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, ops=False):
        p.add_argument("--out", default=None, help="output directory (default out/<command>)")
        if ops:
            p.add_argument("--op", default=None, help="operator file (default: frozen derived operators)")
            p.add_argument("--names", default=None, help="comma separated operator names to use")

    p = sub.add_parser("jones", help="colored Jones table of T(2,b)")
    common(p)
    p.add_argument("--b", type=int, default=3)
    p.add_argument("--nmax", type=int, default=10)
    p.add_argument("--mode", choices=("symbolic", "modular"), default="symbolic")
    p.add_argument("--v0", type=int, default=2)
    p.add_argument("--p", type=int, default=2147483647)
    p.set_defaults(fn=cmd_jones)

    p = sub.add_parser("guess", help="guess recurrences")
    gsub = p.add_subparsers(dest="action", required=True)
    r = gsub.add_parser("run", help="support search (and exact lift)")
    common(r)
    r.add_argument("--b", type=int, default=3)
    r.add_argument("--nmax", type=int, default=40)
    r.add_argument("--v0", type=int, default=2)
    r.add_argument("--p", type=int, default=GUESS_PRIME)
    r.add_argument("--max-ldeg", type=int, default=3)
    r.add_argument("--max-mdeg", type=int, default=30)
    r.add_argument("--oversampling", type=float, default=0.2)
    r.add_argument("--lift", action="store_true")
    r.set_defaults(fn=cmd_guess_run)
    v = gsub.add_parser("verify", help="check operators on a region")
    common(v, ops=True)
    v.add_argument("--b", type=int, default=3)
    v.add_argument("--region", default="0:20")
    v.set_defaults(fn=cmd_guess_verify)

    p = sub.add_parser("gb", help="Gröbner basis, staircase and order change")
    common(p, ops=True)
    p.add_argument("--order", default="deglex:L1,L2")
    p.add_argument("--to", default=None, help="target order for FGLM, e.g. lex:L1,L2")
    p.set_defaults(fn=cmd_gb)

    p = sub.add_parser("fan", help="Gröbner fan in the positive quadrant")
    common(p, ops=True)
    p.set_defaults(fn=cmd_fan)

    p = sub.add_parser("eps", help="q = 1 images")
    common(p, ops=True)
    p.add_argument("--no-compare", dest="compare", action="store_false")
    p.set_defaults(fn=cmd_eps)

    p = sub.add_parser("transport", help="conjugate by d * theta^c")
    common(p, ops=True)
    p.add_argument("--c", type=int, default=3)
    p.add_argument("--direction", choices=("to-TQFT", "from-TQFT"), default="to-TQFT")
    p.add_argument("--verify", type=int, default=None, help="check on [0,N]^2")
    p.add_argument("--b", type=int, default=3)
    p.set_defaults(fn=cmd_transport)

    p = sub.add_parser("diag", help="recurrence of the diagonal f(n, n)")
    common(p)
    p.add_argument("--nmax", type=int, default=15)
    p.add_argument("--b", type=int, default=3)
    p.add_argument("--recompute", action="store_true")
    p.set_defaults(fn=cmd_diag)

    p = sub.add_parser("pipeline", help="all stages end to end")
    common(p)
    p.add_argument("--config", default=None)
    p.add_argument("--recompute", action="store_true", help="rerun guessing and lifting")
    p.set_defaults(fn=cmd_pipeline)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    a = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if a.verbose else logging.WARNING,
                        format="%(asctime)s %(name)s %(message)s")
    name = a.command + (f"-{a.action}" if getattr(a, "action", None) else "")
    if a.out is None:
        a.out = str(Path("out") / name)
    t0 = time.time()
    ok, outputs = a.fn(a)
    if outputs is None:  # the pipeline writes its own bundle and manifest
        return 0 if ok else 1
    out = Path(a.out)
    out.mkdir(parents=True, exist_ok=True)
    for fname, text in outputs.items():
        (out / fname).write_text(text)
    params = {k: str(v) for k, v in sorted(vars(a).items()) if k not in ("fn", "out", "verbose")}
    inputs = {}
    if getattr(a, "op", None):
        inputs["op"] = sha256_file(a.op)
    elif hasattr(a, "op"):
        inputs["derived"] = sha256_file(pl.data_path(pl.DERIVED))
    man = RunManifest(name, params, inputs, {k: sha256_text(v) for k, v in outputs.items()},
                      {"total": time.time() - t0}, "ok" if ok else "failed")
    (out / "manifest.txt").write_text(man.dumps())
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
