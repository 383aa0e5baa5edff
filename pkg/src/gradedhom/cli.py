"""Batch front end: run a session script and emit one report per command."""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any, Sequence

from . import homalg, module as fpm, spectrum
from .errors import GradedHomError, ParseError
from .matrix import Matrix
from .poly import Polynomial, Ring, format_poly, make_ring
from .sentinels import to_json
from .session import (
    Command,
    DualizerDecl,
    GradeFnDecl,
    ModuleDecl,
    PrimeDecl,
    RingDecl,
    Session,
    format_statement,
    format_tree,
    parse_session,
)

__all__ = ["main", "run", "Runner"]

HILBERT_SPAN = 8


def module_json(M: fpm.FpModule) -> dict:
    M0 = fpm.minimal_presentation(M)
    rows = [[format_poly(e) for e in r] for r in M0.relations.rows()]
    lo = min(M0.degrees) if M0.degrees else 0
    return {
        "degrees": list(M0.degrees),
        "relations": rows,
        "hilbert": {"start": lo, "values": fpm.hilbert_series(M0, lo + HILBERT_SPAN, lo)},
    }


def _monic(f: Polynomial) -> Polynomial:
    _, c = f.lead()
    return f * f.ring.char.inv(c)


def describe_module(M: fpm.FpModule) -> tuple[str, int]:
    """Short name plus twist, e.g. ("R/(x)", 1) for (R/(x))(1)."""
    M0 = fpm.minimal_presentation(M)
    if M0.ngens == 0:
        return "0", 0
    if M0.ngens == 1:
        gens = [format_poly(_monic(c[0])) for c in M0.relations.cols]
        body = "R" if not gens else f"R/({', '.join(gens)})"
        return body, -M0.degrees[0]
    return f"coker {module_json(M0)['relations']} degrees {list(M0.degrees)}", 0


class CommandError(GradedHomError):
    pass


class Runner:
    def __init__(self, session: Session, bound: int = 20, seed: int = 0, trials: int = 64):
        self.session = session
        self.bound = bound
        self.seed = seed
        self.trials = trials
        self.ring: Ring | None = None
        self.modules: dict[str, fpm.FpModule] = {}
        self.dualizers: dict[str, homalg.Dualizer] = {}
        self.primes: dict[str, spectrum.PrimeRecord] = {}
        self.tables: dict[str, spectrum.GradeFnTable] = {}
        self.broken: dict[str, str] = {}

    # declarations -----------------------------------------------------------
    def _poly(self, text: str) -> Polynomial:
        return self.ring.poly(text)

    def declare(self, decl) -> dict | None:
        try:
            if self.ring is None and not isinstance(decl, RingDecl):
                raise CommandError("the ring failed to load")
            if isinstance(decl, RingDecl):
                self.ring = make_ring(decl.p, decl.vars, decl.order, [self._ambient_poly(decl, t) for t in decl.ideal])
            elif isinstance(decl, ModuleDecl):
                rows = [[self._poly(t) for t in r] for r in decl.rows]
                degrees = decl.degrees if decl.degrees is not None else [0] * len(rows)
                ncols = len(rows[0]) if rows else 0
                mat = Matrix.from_rows(self.ring, rows, ncols)
                self.modules[decl.name] = fpm.FpModule(self.ring, degrees, mat)
            elif isinstance(decl, DualizerDecl):
                self._need(decl.module)
                self.dualizers[decl.name] = homalg.Dualizer(self.modules[decl.module])
            elif isinstance(decl, PrimeDecl):
                for q in decl.inside:
                    self._need(q)
                rec = spectrum.make_prime(self.ring, decl.name, [self._poly(t) for t in decl.gens])
                self.primes[decl.name] = rec
                for q in decl.inside:
                    outer = self.primes[q]
                    self.primes[q] = spectrum.PrimeRecord(outer.label, outer.ideal, outer.declared_inclusions + (decl.name,))
                spectrum.validate_primes(self.ring, list(self.primes.values()))
            elif isinstance(decl, GradeFnDecl):
                for label, _ in decl.entries:
                    self._need(label)
                self.tables[decl.name] = spectrum.GradeFnTable(dict(decl.entries))
        except GradedHomError as exc:
            self.broken[decl.name] = f"{type(exc).__name__}: {exc}"
            return {
                "declaration": decl.name,
                "inputs": format_statement(decl),
                "error": {"type": type(exc).__name__, "message": str(exc)},
            }
        return None

    @staticmethod
    def _ambient_poly(decl: RingDecl, text: str) -> Polynomial:
        return Ring(decl.p, decl.vars, decl.order).poly(text)

    def _need(self, name: str) -> None:
        if name in self.broken:
            raise CommandError(f"{name} failed to load ({self.broken[name]})")

    def module(self, name: str) -> fpm.FpModule:
        self._need(name)
        if name in self.modules:
            return self.modules[name]
        return self.dualizers[name].module

    def dualizer(self, name: str | None, bound: int) -> homalg.Dualizer:
        if name is None:
            d = homalg.Dualizer(fpm.FpModule.free(self.ring))
        else:
            self._need(name)
            d = self.dualizers[name]
        if d.verdict is None or (d.verdict.ok and d.verdict.bound < bound):
            d.certify(bound)
        d.require(bound)
        return d

    def prime_list(self, which) -> list[spectrum.PrimeRecord]:
        names = list(self.primes) if which in (None, "all") else list(which)
        for n in names:
            self._need(n)
        return [self.primes[n] for n in names]

    def kind(self, which, bound: int):
        if which in (None, "projective"):
            return spectrum.PROJECTIVES
        return self.dualizer(which, bound)

    # commands ---------------------------------------------------------------
    def run_command(self, cmd: Command) -> dict:
        bound = cmd.option("bound", self.bound)
        report: dict[str, Any] = {
            "command": cmd.name,
            "inputs": format_statement(cmd),
            "verdict": None,
            "certificates": {},
            "bound": bound,
            "seed": self.seed,
        }
        try:
            if self.ring is None:
                raise CommandError("the ring failed to load")
            verdict, certs = getattr(self, "cmd_" + cmd.name)(cmd, bound)
            report["verdict"] = verdict
            report["certificates"] = certs
        except (GradedHomError, KeyError) as exc:
            report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        return report

    def cmd_semidual(self, cmd, bound):
        C = self.module(cmd.args[0])
        v = homalg.is_semidualizing(C, bound)
        if cmd.args[0] in self.dualizers:
            self.dualizers[cmd.args[0]].verdict = v
        if v.ok:
            return f"SemidualizingUpTo({bound})", {"ext_vanishing": f"Ext^i(C,C) = 0 for 1 <= i <= {bound}", "homothety": "iso"}
        certs = {"failures": [f.describe() for f in v.failures]}
        w = v.witness
        name, twist = describe_module(w.module)
        if w.condition == "ext":
            certs["witness"] = f"Ext^{w.index} ≅ {name}"
        else:
            certs["witness"] = f"Hom(C,C) ≅ {name}"
        certs["witness_twist"] = twist
        return "Fail", certs

    def _reflexive(self, cmd, bound, fn):
        X = self.module(cmd.args[0])
        C = self.dualizer(cmd.option("dualizer"), bound)
        return fn(X, C, bound)

    def cmd_totref(self, cmd, bound):
        v = self._reflexive(cmd, bound, homalg.is_totally_reflexive)
        if v.ok:
            return "Pass", {}
        return "Fail", {"failures": [f.describe() for f in v.failures]}

    def cmd_gcdim(self, cmd, bound):
        v = self._reflexive(cmd, bound, homalg.gc_dim)
        return to_json(v.value), {k: to_json(x) for k, x in v.checks.items()}

    def cmd_depth(self, cmd, bound):
        return homalg.depth(self.module(cmd.args[0])), {}

    def cmd_grade(self, cmd, bound):
        p = self.prime_list([cmd.args[0]])[0]
        return spectrum.grade(self.ring, list(p.ideal)), {}

    def cmd_transpose(self, cmd, bound):
        C = self.dualizer(cmd.option("dualizer"), 0)
        t = homalg.transpose(self.module(cmd.args[0]), C)
        return module_json(t.module), {"flavor": t.flavor}

    def cmd_transpose_ses(self, cmd, bound):
        C = self.dualizer(cmd.option("dualizer"), 0)
        _, _, _, inc, proj = fpm.syzygy_sequence(self.module(cmd.args[0]))
        six = homalg.transpose_ses(inc, proj, C)
        names = ["Z+", "Y+", "X+", "TrZ", "TrY", "TrX"]
        return (
            "exact" if six.certified else "not exact",
            {"exact_at": six.exact, "modules": {n: module_json(M) for n, M in zip(names, six.modules)}},
        )

    def cmd_cosyzygy(self, cmd, bound):
        C = self.dualizer(cmd.option("dualizer"), 0)
        return module_json(homalg.cosyzygy(self.module(cmd.args[0]), C)), {}

    def cmd_ext(self, cmd, bound):
        i = cmd.option("index")
        return module_json(fpm.ext(self.module(cmd.args[0]), self.module(cmd.args[1]), i)), {"index": i}

    def cmd_tor(self, cmd, bound):
        i = cmd.option("index")
        return module_json(fpm.tor(self.module(cmd.args[0]), self.module(cmd.args[1]), i)), {"index": i}

    def cmd_hom(self, cmd, bound):
        return module_json(fpm.hom(self.module(cmd.args[0]), self.module(cmd.args[1]))), {}

    def cmd_resolution(self, cmd, bound):
        res = fpm.free_resolution(self.module(cmd.args[0]), bound)
        graded = [{str(d): n for d, n in row.items()} for row in res.graded_betti()]
        return res.betti(), {"graded_betti": graded, "complete": res.complete, "exact": res.check_exact()}

    def cmd_hilbert(self, cmd, bound):
        M = self.module(cmd.args[0])
        D = cmd.option("to", 10)
        lo = min([0, *fpm.minimal_presentation(M).degrees])
        return fpm.hilbert_series(M, D, lo), {"start": lo}

    def cmd_dim(self, cmd, bound):
        return to_json(fpm.krull_dim(self.module(cmd.args[0]))), {}

    def cmd_iso(self, cmd, bound):
        M, N = self.module(cmd.args[0]), self.module(cmd.args[1])
        res = fpm.is_isomorphic(M, N, trials=self.trials, seed=self.seed)
        certs: dict[str, Any] = {"trials": self.trials}
        if res.verdict == "Iso":
            certs["map"] = [[format_poly(e) for e in r] for r in res.map.matrix.rows()]
        elif res.verdict == "NotIso":
            certs["reason"] = res.reason
        else:
            certs["retry"] = "inconclusive; rerun with a different --seed"
        return res.verdict, certs

    def _table_json(self, t: spectrum.GradeFnTable) -> dict:
        return {k: to_json(v) for k, v in t.entries.items()}

    def cmd_phi(self, cmd, bound):
        S = [self.module(n) for n in cmd.option("set")]
        primes = self.prime_list(cmd.option("primes"))
        t = spectrum.phi(S, self.kind(cmd.option("kind"), bound), primes, bound)
        return self._table_json(t), {"relative_to": [p.label for p in primes]}

    def cmd_lambda(self, cmd, bound):
        X = self.module(cmd.args[0])
        self._need(cmd.option("table"))
        f = self.tables[cmd.option("table")]
        primes = self.prime_list(cmd.option("primes"))
        v = spectrum.lambda_member(X, f, self.kind(cmd.option("kind"), bound), primes, bound)
        certs = {"relative_to": [p.label for p in primes]}
        if v.verdict == "No":
            certs.update({"witness": v.prime, "detail": v.detail})
        return v.verdict, certs

    def cmd_gcheck(self, cmd, bound):
        self._need(cmd.args[0])
        f = self.tables[cmd.args[0]]
        primes = self.prime_list(cmd.option("primes"))
        v = spectrum.is_grade_consistent(f, primes, self.ring)
        certs = {"relative_to": [p.label for p in primes]}
        if v.verdict == "No":
            certs.update({"violation": v.violation, "prime": v.prime, "detail": v.detail})
        return v.verdict, certs

    def cmd_witness(self, cmd, bound):
        S = [self.module(n) for n in cmd.option("set")]
        target = self.module(cmd.args[0])
        w = build_witness(cmd.option("tree"), S, self.modules)
        v = spectrum.check_resolving_witness(w, S, target, seed=self.seed)
        certs = {"tree": format_tree(cmd.option("tree"))}
        if v.verdict == "Invalid":
            certs.update({"node": v.node, "reason": v.reason})
        return v.verdict, certs

    def cmd_wwords(self, cmd, bound):
        C = self.dualizer(cmd.option("dualizer"), 0)
        mods = homalg.w_words(C, cmd.option("length", 1), seed=self.seed)
        return len(mods), {"modules": [module_json(M) for M in mods]}

    def cmd_extvdim(self, cmd, bound):
        M = self.module(cmd.args[0])
        B = [self.module(n) for n in cmd.option("set")]
        return to_json(homalg.ext_vanishing_dim(M, B, bound).value), {}

    # driver -----------------------------------------------------------------
    def reports(self):
        for stmt in self.session.statements:
            if isinstance(stmt, Command):
                yield self.run_command(stmt)
            else:
                err = self.declare(stmt)
                if err is not None:
                    yield err


def build_witness(tree, S, modules) -> spectrum.ResolvingWitness:
    """Turn a parsed witness expression into a witness graph with nodes n0, n1, ..."""
    nodes: dict[str, Any] = {}
    counter = [0]

    def fresh():
        name = f"n{counter[0]}"
        counter[0] += 1
        return name

    def module_of(name):
        return nodes_mod[name]

    nodes_mod: dict[str, fpm.FpModule] = {}

    def go(t) -> str:
        name = fresh()
        head = t[0]
        if head == "gen":
            nodes[name] = spectrum.Generator(t[1])
            nodes_mod[name] = S[t[1]] if 0 <= t[1] < len(S) else fpm.FpModule.zero(S[0].ring)
        elif head == "free":
            nodes[name] = spectrum.FreeModule(tuple(t[1]))
            nodes_mod[name] = fpm.FpModule.free(S[0].ring, t[1])
        elif head == "syz":
            c = go(t[1])
            nodes[name] = spectrum.Syzygy(c)
            nodes_mod[name] = fpm.syzygy(module_of(c), 1)
        elif head == "sum":
            a, b = go(t[1]), go(t[2])
            A, B = module_of(a), module_of(b)
            AB = fpm.direct_sum(A, B)
            ring = A.ring
            na, nb = A.ngens, B.ngens
            inc = Matrix(ring, na + nb, [[ring.one() if i == j else ring.zero() for i in range(na + nb)] for j in range(na)])
            prj = Matrix(ring, nb, [[ring.one() if i == j - na else ring.zero() for i in range(nb)] for j in range(na + nb)])
            f = fpm.ModuleMap(A, AB, inc)
            g = fpm.ModuleMap(AB, B, prj)
            nodes[name] = spectrum.Extension(a, b, AB, f, g)
            nodes_mod[name] = AB
        else:
            c = go(t[1])
            M, comp = modules[t[2]], modules[t[3]]
            nodes[name] = spectrum.Summand(c, comp, M, None)
            nodes_mod[name] = M
        return name

    root = go(tree)
    return spectrum.ResolvingWitness(nodes, root)


# ---------------------------------------------------------------------------
# output


def render_text(report: dict) -> str:
    if "declaration" in report:
        return f"declaration {report['declaration']}: ERROR {report['error']['type']}: {report['error']['message']}"
    head = f"{report['inputs']}"
    if "error" in report:
        return f"{head}\n  ERROR {report['error']['type']}: {report['error']['message']}"
    lines = [head, f"  verdict: {json.dumps(report['verdict'], ensure_ascii=False)}"]
    for k, v in report["certificates"].items():
        lines.append(f"  {k}: {json.dumps(v, ensure_ascii=False)}")
    lines.append(f"  bound: {report['bound']}  seed: {report['seed']}")
    return "\n".join(lines)


def run(text: str, bound: int = 20, seed: int = 0, trials: int = 64, fmt: str = "json", out=None) -> int:
    """Parse and run a session; returns the process exit code."""
    out = out or sys.stdout
    try:
        session = parse_session(text)
    except ParseError as exc:
        print(json.dumps({"parse_error": {"line": exc.line, "col": exc.col, "expected": exc.expected}}), file=sys.stderr)
        return 2
    fpm.clear_caches()
    failed = False
    for report in Runner(session, bound, seed, trials).reports():
        failed |= "error" in report
        if fmt == "json":
            out.write(json.dumps(report, ensure_ascii=False) + "\n")
        else:
            out.write(render_text(report) + "\n")
    return 1 if failed else 0


def main(argv: Sequence[str] | None = None) -> int:
    ap = argparse.ArgumentParser(prog="gradedhom", description="Run a graded homological algebra session script.")
    ap.add_argument("session", help="session file, or - for stdin")
    ap.add_argument("--bound", type=int, default=20, help="Ext/resolution bound (default 20)")
    ap.add_argument("--seed", type=int, default=0, help="seed for randomized searches (default 0)")
    ap.add_argument("--format", choices=["json", "text"], default="json")
    ap.add_argument("--trials", type=int, default=64, help="isomorphism search trials (default 64)")
    args = ap.parse_args(argv)
    if args.session == "-":
        text = sys.stdin.read()
    else:
        with open(args.session, encoding="utf-8") as fh:
            text = fh.read()
    return run(text, args.bound, args.seed, args.trials, args.format)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
