"""Text formats for families, cover families and tournaments.

Family files::

    # comment
    ground 10
    uniform 4
    0 1 2 3
    {}            <- the empty set (makes the family degenerate)

Cover files add a ``covers-of <hash> cap <k>`` header line before
``ground``. Digraph files hold ``vertices m``, ``n <n>`` and one
``arc i j`` line per vertex pair, with vertices numbered from 1.
"""
from __future__ import annotations

from pathlib import Path

from .family import FamilyError, SetFamily

EMPTY_TOKEN = "{}"


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None, source: str | None = None):
        where = ""
        if source:
            where += f"{source}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)
        self.line = line


def _lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def _int(token: str, lineno: int, what: str, source: str | None = None) -> int:
    try:
        v = int(token)
    except ValueError:
        raise ParseError(f"{what}: expected an integer, got {token!r}", lineno, source) from None
    if v < 0:
        raise ParseError(f"{what}: expected a non-negative integer, got {v}", lineno, source)
    return v


def parse_family(text: str, source: str | None = None) -> SetFamily:
    family, header = _parse_family_body(text, source, allow_cover_header=False)
    return family


def _parse_family_body(text: str, source: str | None, allow_cover_header: bool):
    ground = None
    uniform = None
    cover_header = None
    sets = []
    for lineno, line in _lines(text):
        head, *rest = line.split()
        if ground is None:
            if head == "covers-of" and allow_cover_header and cover_header is None:
                if len(rest) != 3 or rest[1] != "cap":
                    raise ParseError("expected 'covers-of <hash> cap <k>'", lineno, source)
                cover_header = (rest[0], _int(rest[2], lineno, "cap", source))
                continue
            if head != "ground" or len(rest) != 1:
                raise ParseError("first line must be 'ground <N>'", lineno, source)
            ground = _int(rest[0], lineno, "ground", source)
            continue
        if head == "uniform" and not sets and uniform is None:
            if len(rest) != 1:
                raise ParseError("expected 'uniform <n>'", lineno, source)
            uniform = _int(rest[0], lineno, "uniform", source)
            continue
        if line == EMPTY_TOKEN:
            members = []
        else:
            members = [_int(tok, lineno, "element", source) for tok in line.split()]
        for x in members:
            if x >= ground:
                raise ParseError(f"element {x} outside ground set of size {ground}", lineno, source)
        if len(set(members)) != len(members):
            raise ParseError("repeated element within a set", lineno, source)
        if uniform is not None and len(members) != uniform:
            raise ParseError(f"set of size {len(members)} in a {uniform}-uniform family", lineno, source)
        sets.append(frozenset(members))
    if ground is None:
        raise ParseError("missing 'ground <N>' line", None, source)
    try:
        family = SetFamily(tuple(sets), ground, uniform, degenerate=any(not s for s in sets))
    except FamilyError as exc:
        raise ParseError(str(exc), None, source) from None
    return family, cover_header


def format_sets(sets) -> str:
    return "".join((" ".join(map(str, sorted(s))) if s else EMPTY_TOKEN) + "\n" for s in sets)


def format_family(F: SetFamily) -> str:
    out = f"ground {F.ground}\n"
    if F.uniformity is not None:
        out += f"uniform {F.uniformity}\n"
    return out + format_sets(F.sets)


def read_family(path: str | Path) -> SetFamily:
    path = Path(path)
    return parse_family(path.read_text(encoding="utf-8"), source=str(path))


def write_family(F: SetFamily, path: str | Path) -> None:
    Path(path).write_text(format_family(F), encoding="utf-8")


def format_cover_family(covers) -> str:
    return (
        f"covers-of {covers.source_family_hash} cap {covers.size_cap}\n"
        f"ground {covers.ground}\n" + format_sets(covers.covers)
    )


def parse_cover_family(text: str, source: str | None = None):
    from .transversal import CoverFamily

    family, header = _parse_family_body(text, source, allow_cover_header=True)
    if header is None:
        raise ParseError("missing 'covers-of <hash> cap <k>' header", None, source)
    source_hash, cap = header
    return CoverFamily(family.sets, cap, source_hash, family.ground)


def parse_digraph(text: str, source: str | None = None):
    """Parse a tournament file into a :class:`DigraphConstruction`."""
    from .constructions import DigraphConstruction

    m = None
    n = None
    arcs = []
    seen = {}
    for lineno, line in _lines(text):
        head, *rest = line.split()
        if head == "vertices" and len(rest) == 1 and m is None:
            m = _int(rest[0], lineno, "vertices", source)
        elif head == "n" and len(rest) == 1 and n is None:
            n = _int(rest[0], lineno, "n", source)
        elif head == "arc" and len(rest) == 2:
            if m is None:
                raise ParseError("'arc' before 'vertices'", lineno, source)
            i, j = (_int(t, lineno, "vertex", source) for t in rest)
            if not (1 <= i <= m and 1 <= j <= m) or i == j:
                raise ParseError(f"bad arc {i} {j} for {m} vertices", lineno, source)
            pair = (min(i, j), max(i, j))
            if pair in seen:
                raise ParseError(f"pair {pair} already oriented on line {seen[pair]}", lineno, source)
            seen[pair] = lineno
            arcs.append((i - 1, j - 1))
        else:
            raise ParseError(f"unrecognized line {line!r}", lineno, source)
    if m is None or n is None:
        raise ParseError("digraph file needs 'vertices m' and 'n <n>'", None, source)
    missing = [(i + 1, j + 1) for i in range(m) for j in range(i + 1, m) if (i + 1, j + 1) not in seen]
    if missing:
        raise ParseError(f"not a tournament: pair {missing[0]} has no arc", None, source)
    try:
        return DigraphConstruction(m, frozenset(arcs), n)
    except ValueError as exc:
        raise ParseError(str(exc), None, source) from None


def format_digraph(D) -> str:
    out = f"vertices {D.m}\nn {D.n}\n"
    return out + "".join(f"arc {i + 1} {j + 1}\n" for i, j in sorted(D.arcs))


def read_digraph(path: str | Path):
    path = Path(path)
    return parse_digraph(path.read_text(encoding="utf-8"), source=str(path))
