"""Plain-text interchange: sparse matrix files, point files and key-value
result documents.

Matrix file::

    # comment
    3 3 rational
    1 1 1/2
    2 3 -4

Point file header is ``n d domain`` optionally followed by ``colored``
and/or ``mult``; each point line then carries the extra integer columns in
that order.
"""

from __future__ import annotations

import configparser
import io
from fractions import Fraction

import numpy as np

from .matrix import ScalarDomain, ScalarMatrix

__all__ = [
    "ParseError",
    "format_scalar",
    "parse_scalar",
    "read_matrix",
    "write_matrix",
    "dumps_matrix",
    "loads_matrix",
    "PointFile",
    "loads_points",
    "dumps_points",
    "read_points",
    "write_points",
    "dumps_document",
    "loads_document",
]


class ParseError(ValueError):
    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def format_scalar(x, domain):
    if domain.kind == "complex":
        z = complex(x)
        return f"{z.real!r}{'-' if np.signbit(z.imag) else '+'}{abs(z.imag)!r}i"
    if domain.kind == "prime":
        return str(int(x))
    return str(Fraction(x))


def parse_scalar(token, domain):
    if domain.kind == "complex":
        return complex(token.replace("i", "j"))
    return Fraction(token)


def _content_lines(text):
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line.split()


def loads_matrix(text):
    lines = _content_lines(text)
    try:
        no, head = next(lines)
    except StopIteration:
        raise ParseError("empty matrix file") from None
    if len(head) != 3:
        raise ParseError("header must be 'm n domain'", no)
    try:
        m, n = int(head[0]), int(head[1])
        domain = ScalarDomain.parse(head[2])
    except ValueError as exc:
        raise ParseError(str(exc), no) from None
    if m < 1 or n < 1:
        raise ParseError("matrix dimensions must be positive", no)
    entries = np.zeros((m, n), dtype=complex if domain.kind == "complex" else object)
    if domain.kind != "complex":
        entries[...] = Fraction(0)
    seen = set()
    for no, tok in lines:
        if len(tok) != 3:
            raise ParseError("expected 'row col value'", no)
        try:
            i, j = int(tok[0]), int(tok[1])
            v = parse_scalar(tok[2], domain)
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(str(exc), no) from None
        if not (1 <= i <= m and 1 <= j <= n):
            raise ParseError(f"index ({i}, {j}) outside {m}x{n}", no)
        if (i, j) in seen:
            raise ParseError(f"duplicate entry ({i}, {j})", no)
        seen.add((i, j))
        entries[i - 1, j - 1] = v
    try:
        return ScalarMatrix(entries, domain)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(str(exc)) from None


def dumps_matrix(A):
    lines = [f"{A.m} {A.n} {A.domain}"]
    for (i, j), v in np.ndenumerate(A.entries):
        if v != 0:
            lines.append(f"{i + 1} {j + 1} {format_scalar(v, A.domain)}")
    return "\n".join(lines) + "\n"


def read_matrix(path):
    with open(path, encoding="utf-8") as fh:
        return loads_matrix(fh.read())


def write_matrix(path, A):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_matrix(A))


class PointFile:
    """Parsed point file: coordinates plus optional colors and multiplicities."""

    def __init__(self, points, domain, colors=None, mults=None):
        self.points = tuple(tuple(p) for p in points)
        self.domain = domain
        self.colors = None if colors is None else tuple(colors)
        self.mults = None if mults is None else tuple(mults)

    def expanded(self):
        """Points with each one repeated by its multiplicity."""
        if self.mults is None:
            return self.points
        return tuple(p for p, k in zip(self.points, self.mults) for _ in range(k))


def loads_points(text):
    lines = _content_lines(text)
    try:
        no, head = next(lines)
    except StopIteration:
        raise ParseError("empty point file") from None
    if len(head) < 3:
        raise ParseError("header must be 'n d domain [colored] [mult]'", no)
    try:
        n, d = int(head[0]), int(head[1])
        domain = ScalarDomain.parse(head[2])
    except ValueError as exc:
        raise ParseError(str(exc), no) from None
    if domain.kind == "prime":
        raise ParseError("point files use rational or complex coordinates", no)
    flags = head[3:]
    if any(f not in ("colored", "mult") for f in flags) or len(set(flags)) != len(flags):
        raise ParseError(f"unknown header flags {flags}", no)
    if n < 1 or d < 1:
        raise ParseError("n and d must be positive", no)
    colored, with_mult = "colored" in flags, "mult" in flags
    width = d + colored + with_mult
    points, colors, mults = [], [], []
    for no, tok in lines:
        if len(tok) != width:
            raise ParseError(f"expected {width} fields, got {len(tok)}", no)
        try:
            points.append(tuple(parse_scalar(t, domain) for t in tok[:d]))
            extra = [int(t) for t in tok[d:]]
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(str(exc), no) from None
        if colored:
            colors.append(extra.pop(0))
        if with_mult:
            if extra[0] < 1:
                raise ParseError("multiplicity must be positive", no)
            mults.append(extra[0])
    if len(points) != n:
        raise ParseError(f"header declares {n} points, found {len(points)}")
    return PointFile(points, domain, colors if colored else None, mults if with_mult else None)


def dumps_points(points, domain=None, colors=None, mults=None):
    points = [tuple(p) for p in points]
    if domain is None:
        exact = all(isinstance(x, (int, Fraction)) for p in points for x in p)
        domain = ScalarDomain("rational" if exact else "complex")
    flags = (" colored" if colors is not None else "") + (" mult" if mults is not None else "")
    lines = [f"{len(points)} {len(points[0])} {domain}{flags}"]
    for t, p in enumerate(points):
        fields = [format_scalar(x, domain) for x in p]
        if colors is not None:
            fields.append(str(colors[t]))
        if mults is not None:
            fields.append(str(mults[t]))
        lines.append(" ".join(fields))
    return "\n".join(lines) + "\n"


def read_points(path):
    with open(path, encoding="utf-8") as fh:
        return loads_points(fh.read())


def write_points(path, points, domain=None, colors=None, mults=None):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_points(points, domain, colors, mults))


def _parser():
    cp = configparser.ConfigParser(interpolation=None, delimiters=("=",))
    cp.optionxform = str
    return cp


def dumps_document(sections):
    """Serialize ``{section: {key: value}}`` as an INI-style document.

    ``None`` becomes ``none``; floats use ``repr`` so they round-trip.
    """
    cp = _parser()
    for name, body in sections.items():
        cp[name] = {k: _fmt_value(v) for k, v in body.items()}
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()


def _fmt_value(v):
    if v is None:
        return "none"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, np.integer):
        return str(int(v))
    return str(v)


def loads_document(text):
    """Parse a document back into nested dicts of strings."""
    cp = _parser()
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ParseError(str(exc), getattr(exc, "lineno", None)) from None
    return {name: dict(cp[name]) for name in cp.sections()}
