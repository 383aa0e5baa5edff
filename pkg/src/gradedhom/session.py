"""Session scripts: a line-oriented language declaring one ring, modules,
dualizers, primes and grade tables, followed by commands.

``parse_session`` produces an AST of frozen dataclasses and
``format_session`` prints it back in canonical form; parsing the printed
text yields the same AST.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .errors import ParseError
from .poly import ORDERS, Ring, parse_poly

# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class RingDecl:
    name: str
    p: int
    vars: tuple
    order: str
    ideal: tuple = ()


@dataclass(frozen=True)
class ModuleDecl:
    name: str
    rows: tuple  # tuple of tuples of polynomial text
    degrees: tuple | None = None


@dataclass(frozen=True)
class DualizerDecl:
    name: str
    module: str


@dataclass(frozen=True)
class PrimeDecl:
    name: str
    gens: tuple
    inside: tuple = ()  # this prime is contained in each listed prime


@dataclass(frozen=True)
class GradeFnDecl:
    name: str
    entries: tuple  # ((prime label, int), ...)


@dataclass(frozen=True)
class Command:
    name: str
    args: tuple  # positional names
    options: tuple  # ((key, value), ...) in source order

    def option(self, key, default=None):
        for k, v in self.options:
            if k == key:
                return v
        return default


Statement = Union[RingDecl, ModuleDecl, DualizerDecl, PrimeDecl, GradeFnDecl, Command]


@dataclass(frozen=True)
class Session:
    statements: tuple

    @property
    def ring(self) -> RingDecl:
        return next(s for s in self.statements if isinstance(s, RingDecl))

    @property
    def declarations(self) -> list:
        return [s for s in self.statements if not isinstance(s, Command)]

    @property
    def commands(self) -> list[Command]:
        return [s for s in self.statements if isinstance(s, Command)]


# argument kinds: "module", "dualizer", "prime", "gradefn", "modset",
# "primeset", "kind", "int", "tree", "target" (module or dualizer)
COMMANDS: dict[str, tuple[tuple, dict]] = {
    "semidual": (("target",), {"bound": "int"}),
    "totref": (("module",), {"dualizer": "dualizer", "bound": "int"}),
    "gcdim": (("module",), {"dualizer": "dualizer", "bound": "int"}),
    "depth": (("module",), {}),
    "grade": (("prime",), {}),
    "transpose": (("module",), {"dualizer": "dualizer"}),
    "transpose_ses": (("module",), {"dualizer": "dualizer"}),
    "cosyzygy": (("module",), {"dualizer": "dualizer"}),
    "ext": (("module", "module"), {"index": "int"}),
    "tor": (("module", "module"), {"index": "int"}),
    "hom": (("module", "module"), {}),
    "resolution": (("module",), {"bound": "int"}),
    "hilbert": (("module",), {"to": "int"}),
    "dim": (("module",), {}),
    "iso": (("module", "module"), {}),
    "phi": ((), {"set": "modset", "kind": "kind", "primes": "primeset", "bound": "int"}),
    "lambda": (("module",), {"table": "gradefn", "kind": "kind", "primes": "primeset", "bound": "int"}),
    "gcheck": (("gradefn",), {"primes": "primeset"}),
    "witness": (("module",), {"set": "modset", "tree": "tree"}),
    "wwords": ((), {"dualizer": "dualizer", "length": "int"}),
    "extvdim": (("module",), {"set": "modset", "bound": "int"}),
}
REQUIRED = {
    "ext": ("index",),
    "tor": ("index",),
    "phi": ("set",),
    "lambda": ("table",),
    "witness": ("set", "tree"),
    "extvdim": ("set",),
}

# ---------------------------------------------------------------------------
# lexing helpers


class _Cursor:
    def __init__(self, text: str, line: int):
        self.s = text
        self.i = 0
        self.line = line

    def error(self, expected: str, at: int | None = None) -> ParseError:
        return ParseError(self.line, (self.i if at is None else at) + 1, expected)

    def ws(self) -> None:
        while self.i < len(self.s) and self.s[self.i].isspace():
            self.i += 1

    def at_end(self) -> bool:
        self.ws()
        return self.i >= len(self.s)

    def peek(self) -> str:
        self.ws()
        return self.s[self.i] if self.i < len(self.s) else ""

    def expect(self, ch: str) -> None:
        if self.peek() != ch:
            raise self.error(repr(ch))
        self.i += 1

    def accept(self, ch: str) -> bool:
        if self.peek() == ch:
            self.i += 1
            return True
        return False

    def name(self, what: str = "name") -> str:
        self.ws()
        j = self.i
        if j < len(self.s) and (self.s[j].isalpha() or self.s[j] == "_"):
            j += 1
            while j < len(self.s) and (self.s[j].isalnum() or self.s[j] in "_'"):
                j += 1
            out = self.s[self.i : j]
            self.i = j
            return out
        raise self.error(what)

    def peek_name(self) -> str | None:
        save = self.i
        try:
            return self.name()
        except ParseError:
            return None
        finally:
            self.i = save

    def keyword(self, word: str) -> None:
        save = self.i
        got = self.peek_name()
        if got != word:
            self.i = save
            raise self.error(f"'{word}'")
        self.name()

    def integer(self) -> int:
        self.ws()
        j = self.i
        if j < len(self.s) and self.s[j] in "+-":
            j += 1
        k = j
        while k < len(self.s) and self.s[k].isdigit():
            k += 1
        if k == j:
            raise self.error("integer")
        out = int(self.s[self.i : k])
        self.i = k
        return out

    def poly_text(self) -> tuple[str, int]:
        """Raw polynomial text up to a depth-0 ',' or closing bracket."""
        self.ws()
        start = self.i
        depth = 0
        while self.i < len(self.s):
            ch = self.s[self.i]
            if ch == "(":
                depth += 1
            elif ch == ")":
                if depth == 0:
                    break
                depth -= 1
            elif ch in ",]}" and depth == 0:
                break
            self.i += 1
        text = "".join(self.s[start : self.i].split())
        if not text:
            raise self.error("polynomial", start)
        return text, start

    def end(self) -> None:
        if not self.at_end():
            raise self.error("end of line")


def _names_list(cur: _Cursor, open_: str, close: str) -> tuple:
    cur.expect(open_)
    out = []
    if cur.accept(close):
        return ()
    while True:
        out.append(cur.name())
        if cur.accept(close):
            return tuple(out)
        cur.expect(",")


def _ints_list(cur: _Cursor) -> tuple:
    cur.expect("[")
    out = []
    if cur.accept("]"):
        return ()
    while True:
        out.append(cur.integer())
        if cur.accept("]"):
            return tuple(out)
        cur.expect(",")


# ---------------------------------------------------------------------------
# parser


class _Parser:
    def __init__(self):
        self.ring: RingDecl | None = None
        self.check_ring: Ring | None = None
        self.names: dict[str, str] = {}  # name -> kind
        self.out: list = []

    def poly(self, cur: _Cursor) -> str:
        text, start = cur.poly_text()
        if self.check_ring is not None:
            try:
                parse_poly(text, self.check_ring)
            except ValueError as exc:
                raise ParseError(cur.line, start + 1, f"polynomial ({exc})") from None
        return text

    def polys_in(self, cur: _Cursor, open_: str, close: str) -> tuple:
        cur.expect(open_)
        if cur.accept(close):
            return ()
        out = []
        while True:
            out.append(self.poly(cur))
            if cur.accept(close):
                return tuple(out)
            cur.expect(",")

    def declare(self, cur: _Cursor, name: str, kind: str, at: int) -> None:
        if name in self.names:
            raise ParseError(cur.line, at + 1, f"fresh name ({name!r} already declared)")
        if name in COMMANDS or name in {"ring", "module", "dualizer", "prime", "gradefn"}:
            raise ParseError(cur.line, at + 1, f"non-reserved name ({name!r} is reserved)")
        self.names[name] = kind

    def use(self, cur: _Cursor, name: str, kinds: tuple, at: int) -> None:
        if self.names.get(name) not in kinds:
            raise ParseError(cur.line, at + 1, f"declared {'/'.join(kinds)} name (got {name!r})")

    def need_ring(self, cur: _Cursor) -> None:
        if self.ring is None:
            raise cur.error("ring declaration before this line", 0)

    # statements -------------------------------------------------------------
    def statement(self, cur: _Cursor) -> None:
        cur.ws()
        at = cur.i
        word = cur.name("declaration or command")
        if word == "ring":
            return self.ring_decl(cur, at)
        self.need_ring(cur)
        if word == "module":
            return self.module_decl(cur)
        if word == "dualizer":
            return self.dualizer_decl(cur)
        if word == "prime":
            return self.prime_decl(cur)
        if word == "gradefn":
            return self.gradefn_decl(cur)
        if word in COMMANDS:
            return self.command(cur, word)
        raise cur.error("declaration or command", at)

    def ring_decl(self, cur: _Cursor, at: int) -> None:
        if self.ring is not None:
            raise cur.error("at most one ring per session", at)
        n_at = cur.i
        name = cur.name()
        cur.expect("=")
        cur.keyword("poly")
        cur.expect("(")
        p_at = cur.i
        p = cur.integer()
        cur.expect(",")
        vars_ = _names_list(cur, "[", "]")
        if not vars_:
            raise cur.error("at least one variable")
        cur.expect(",")
        o_at = cur.i
        order = cur.name("monomial order")
        if order not in ORDERS:
            raise cur.error(f"one of {', '.join(ORDERS)}", o_at)
        cur.expect(")")
        try:
            self.check_ring = Ring(p, vars_, order)
        except ValueError as exc:
            raise ParseError(cur.line, p_at + 1, f"odd prime characteristic ({exc})") from None
        ideal: tuple = ()
        if cur.accept("/"):
            cur.keyword("ideal")
            ideal = self.polys_in(cur, "(", ")")
        cur.end()
        self.declare(cur, name, "ring", n_at)
        self.ring = RingDecl(name, p, vars_, order, ideal)
        self.out.append(self.ring)

    def module_decl(self, cur: _Cursor) -> None:
        n_at = cur.i
        name = cur.name()
        cur.expect("=")
        cur.keyword("coker")
        cur.expect("[")
        rows = []
        width = None
        while True:
            r_at = cur.i
            cur.ws()
            r_at = cur.i
            row = self.polys_in(cur, "[", "]")
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise ParseError(cur.line, r_at + 1, f"matrix row with {width} entries")
            rows.append(row)
            if cur.accept("]"):
                break
            cur.expect(",")
        degrees = None
        if not cur.at_end():
            cur.keyword("degrees")
            d_at = cur.i
            degrees = _ints_list(cur)
            if len(degrees) != len(rows):
                raise ParseError(cur.line, d_at + 1, f"{len(rows)} degrees (one per matrix row)")
        cur.end()
        self.declare(cur, name, "module", n_at)
        self.out.append(ModuleDecl(name, tuple(rows), degrees))

    def dualizer_decl(self, cur: _Cursor) -> None:
        n_at = cur.i
        name = cur.name()
        cur.expect("=")
        m_at = cur.i
        mod = cur.name("module name")
        self.use(cur, mod, ("module",), m_at)
        cur.end()
        self.declare(cur, name, "dualizer", n_at)
        self.out.append(DualizerDecl(name, mod))

    def prime_decl(self, cur: _Cursor) -> None:
        n_at = cur.i
        name = cur.name()
        cur.expect("=")
        cur.keyword("ideal")
        gens = self.polys_in(cur, "(", ")")
        inside = []
        if not cur.at_end():
            cur.keyword("in")
            while True:
                q_at = cur.i
                q = cur.name("prime name")
                self.use(cur, q, ("prime",), q_at)
                inside.append(q)
                if not cur.accept(","):
                    break
        cur.end()
        self.declare(cur, name, "prime", n_at)
        self.out.append(PrimeDecl(name, gens, tuple(inside)))

    def gradefn_decl(self, cur: _Cursor) -> None:
        n_at = cur.i
        name = cur.name()
        cur.expect("=")
        cur.expect("{")
        entries = []
        if not cur.accept("}"):
            while True:
                l_at = cur.i
                label = cur.name("prime name")
                self.use(cur, label, ("prime",), l_at)
                cur.expect(":")
                entries.append((label, cur.integer()))
                if cur.accept("}"):
                    break
                cur.expect(",")
        cur.end()
        self.declare(cur, name, "gradefn", n_at)
        self.out.append(GradeFnDecl(name, tuple(entries)))

    def command(self, cur: _Cursor, word: str) -> None:
        positional, opts = COMMANDS[word]
        args = []
        for kind in positional:
            a_at = cur.i
            nm = cur.name(f"{kind} name")
            self.use(cur, nm, ("module", "dualizer") if kind == "target" else (kind,), a_at)
            args.append(nm)
        options = []
        seen = set()
        while not cur.at_end():
            k_at = cur.i
            key = cur.name("option keyword")
            if key not in opts:
                raise cur.error(f"one of {', '.join(opts) or 'no options'}", k_at)
            if key in seen:
                raise cur.error(f"option {key} only once", k_at)
            seen.add(key)
            options.append((key, self.option_value(cur, opts[key])))
        for key in REQUIRED.get(word, ()):
            if key not in seen:
                raise cur.error(f"option '{key}'")
        self.out.append(Command(word, tuple(args), tuple(options)))

    def option_value(self, cur: _Cursor, kind: str):
        at = cur.i
        if kind == "int":
            return cur.integer()
        if kind in ("dualizer", "gradefn"):
            nm = cur.name(f"{kind} name")
            self.use(cur, nm, (kind,), at)
            return nm
        if kind == "modset":
            names = _names_list(cur, "{", "}")
            for nm in names:
                self.use(cur, nm, ("module",), at)
            return names
        if kind == "primeset":
            if cur.peek() == "{":
                names = _names_list(cur, "{", "}")
                for nm in names:
                    self.use(cur, nm, ("prime",), at)
                return names
            cur.keyword("all")
            return "all"
        if kind == "kind":
            nm = cur.name("'projective' or a dualizer name")
            if nm != "projective":
                self.use(cur, nm, ("dualizer",), at)
            return nm
        if kind == "tree":
            return self.tree(cur)
        raise AssertionError(kind)

    def tree(self, cur: _Cursor):
        at = cur.i
        head = cur.name("witness step (gen, free, syz, sum, summand)")
        cur.expect("(")
        if head == "gen":
            out = ("gen", cur.integer())
        elif head == "free":
            out = ("free", _ints_list(cur))
        elif head == "syz":
            out = ("syz", self.tree(cur))
        elif head == "sum":
            a = self.tree(cur)
            cur.expect(",")
            out = ("sum", a, self.tree(cur))
        elif head == "summand":
            child = self.tree(cur)
            cur.expect(",")
            m_at = cur.i
            m = cur.name("module name")
            self.use(cur, m, ("module",), m_at)
            cur.expect(",")
            c_at = cur.i
            c = cur.name("module name")
            self.use(cur, c, ("module",), c_at)
            out = ("summand", child, m, c)
        else:
            raise cur.error("witness step (gen, free, syz, sum, summand)", at)
        cur.expect(")")
        return out


def parse_session(text: str) -> Session:
    parser = _Parser()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        cur = _Cursor(line, lineno)
        parser.statement(cur)
    if parser.ring is None:
        raise ParseError(max(1, len(text.splitlines())), 1, "a ring declaration")
    return Session(tuple(parser.out))


# ---------------------------------------------------------------------------
# printer


def format_tree(t) -> str:
    head = t[0]
    if head == "gen":
        return f"gen({t[1]})"
    if head == "free":
        return f"free([{', '.join(str(d) for d in t[1])}])"
    if head == "syz":
        return f"syz({format_tree(t[1])})"
    if head == "sum":
        return f"sum({format_tree(t[1])}, {format_tree(t[2])})"
    return f"summand({format_tree(t[1])}, {t[2]}, {t[3]})"


def _format_value(kind: str, v) -> str:
    if kind in ("modset",) or (kind == "primeset" and v != "all"):
        return "{" + ", ".join(v) + "}"
    if kind == "tree":
        return format_tree(v)
    return str(v)


def format_statement(s: Statement) -> str:
    if isinstance(s, RingDecl):
        out = f"ring {s.name} = poly({s.p}, [{', '.join(s.vars)}], {s.order})"
        if s.ideal:
            out += f" / ideal({', '.join(s.ideal)})"
        return out
    if isinstance(s, ModuleDecl):
        rows = ", ".join("[" + ", ".join(r) + "]" for r in s.rows)
        out = f"module {s.name} = coker [{rows}]"
        if s.degrees is not None:
            out += f" degrees [{', '.join(str(d) for d in s.degrees)}]"
        return out
    if isinstance(s, DualizerDecl):
        return f"dualizer {s.name} = {s.module}"
    if isinstance(s, PrimeDecl):
        out = f"prime {s.name} = ideal({', '.join(s.gens)})"
        if s.inside:
            out += f" in {', '.join(s.inside)}"
        return out
    if isinstance(s, GradeFnDecl):
        return f"gradefn {s.name} = {{" + ", ".join(f"{k}: {v}" for k, v in s.entries) + "}"
    opts = COMMANDS[s.name][1]
    parts = [s.name, *s.args]
    for k, v in s.options:
        parts += [k, _format_value(opts[k], v)]
    return " ".join(parts)


def format_session(session: Session) -> str:
    return "\n".join(format_statement(s) for s in session.statements) + "\n"
