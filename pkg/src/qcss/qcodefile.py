"""Reader/writer for the "qcode v1" text format.

A file carries a protograph stage (parameters plus the f/g permutation
lists, from which the binary pair is always re-derivable) and, once
extended, the field line plus the label exponent lists:

    qcode 1
    field e=3 poly=1101
    proto J=2 L=4 P=9
    f: cpm 8
    f: apm 7 7
    g: cpm 3
    g: cpm 6
    lambda: <2PL integers>
    delta: <2PL integers, row-major over the hz support>

Lines starting with '#' are comments; writers embed the invoking
configuration there.  Parse errors report the offending line number.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .csscode import CssCode
from .extend import ExtendedPair
from .field import GF2e, poly_from_string, poly_to_string
from .perms import Perm
from .protograph import PermArrays, ProtoPair, assemble


class QCodeParseError(Exception):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass
class QCodeFile:
    """Parsed contents of a qcode file (field/labels present once extended)."""

    P: int
    L: int
    f: tuple
    g: tuple
    e: int | None = None
    poly: tuple | None = None
    log_labels: np.ndarray | None = None
    z_exponents: np.ndarray | None = None
    comments: list = dc_field(default_factory=list)

    @property
    def extended(self) -> bool:
        return self.log_labels is not None

    def arrays(self) -> PermArrays:
        return PermArrays(f=self.f, g=self.g, P=self.P, L=self.L)

    def proto_pair(self) -> ProtoPair:
        return assemble(self.arrays())

    def build_field(self) -> GF2e:
        if self.e is None:
            raise ValueError("file has no field line")
        return GF2e(self.e, self.poly)

    def extended_pair(self) -> ExtendedPair:
        if not self.extended:
            raise ValueError("file has no label lines; run the extend stage first")
        gf = self.build_field()
        z_exp = self.z_exponents.reshape(2 * self.P, self.L)
        return ExtendedPair(self.proto_pair(), gf, self.log_labels, z_exp)

    def css_code(self, code_id: str = "") -> CssCode:
        return CssCode(self.extended_pair(), code_id=code_id)


def _parse_kv(parts, lineno):
    out = {}
    for p in parts:
        if "=" not in p:
            raise QCodeParseError(lineno, f"expected key=value, got {p!r}")
        k, v = p.split("=", 1)
        out[k] = v
    return out


def loads(text: str) -> QCodeFile:
    lines = text.splitlines()
    header_seen = False
    e = poly = None
    P = L = None
    f_texts: list[tuple[int, str]] = []
    g_texts: list[tuple[int, str]] = []
    log_labels = z_exponents = None
    comments = []

    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            comments.append(line)
            continue
        if not header_seen:
            if line.split() != ["qcode", "1"]:
                raise QCodeParseError(lineno, f"expected header 'qcode 1', got {line!r}")
            header_seen = True
            continue
        key, _, rest = line.partition(" ")
        if key == "field":
            kv = _parse_kv(rest.split(), lineno)
            try:
                e = int(kv["e"])
                poly = poly_from_string(kv["poly"])
            except (KeyError, ValueError) as exc:
                raise QCodeParseError(lineno, f"bad field line: {exc}") from None
        elif key == "proto":
            kv = _parse_kv(rest.split(), lineno)
            try:
                if int(kv.get("J", "2")) != 2:
                    raise QCodeParseError(lineno, "only J=2 is supported")
                L = int(kv["L"])
                P = int(kv["P"])
            except KeyError as exc:
                raise QCodeParseError(lineno, f"proto line missing {exc}") from None
        elif key == "f:":
            f_texts.append((lineno, rest))
        elif key == "g:":
            g_texts.append((lineno, rest))
        elif key == "lambda:":
            log_labels = np.array([int(v) for v in rest.split()], dtype=np.int64)
        elif key == "delta:":
            z_exponents = np.array([int(v) for v in rest.split()], dtype=np.int64)
        else:
            raise QCodeParseError(lineno, f"unknown line {line!r}")

    if not header_seen:
        raise QCodeParseError(1, "missing 'qcode 1' header")
    if P is None or L is None:
        raise QCodeParseError(len(lines), "missing proto line")

    def parse_perms(texts, name):
        perms = []
        for lineno, t in texts:
            try:
                perms.append(Perm.from_text(t, P))
            except ValueError as exc:
                raise QCodeParseError(lineno, f"bad {name} permutation: {exc}") from None
        return tuple(perms)

    f = parse_perms(f_texts, "f")
    g = parse_perms(g_texts, "g")
    if len(f) != L // 2 or len(g) != L // 2:
        raise QCodeParseError(
            len(lines), f"need L/2={L // 2} f and g lines, got {len(f)} and {len(g)}"
        )

    if (log_labels is None) != (z_exponents is None):
        raise QCodeParseError(len(lines), "lambda and delta lines must appear together")
    if log_labels is not None:
        if e is None:
            raise QCodeParseError(len(lines), "label lines require a field line")
        if log_labels.size != 2 * P * L:
            raise QCodeParseError(len(lines), f"lambda needs {2 * P * L} integers")
        if z_exponents.size != 2 * P * L:
            raise QCodeParseError(len(lines), f"delta needs {2 * P * L} integers")

    return QCodeFile(P=P, L=L, f=f, g=g, e=e, poly=poly,
                     log_labels=log_labels, z_exponents=z_exponents,
                     comments=comments)


def load(path) -> QCodeFile:
    with open(path, "r", encoding="utf-8") as fh:
        return loads(fh.read())


def dumps(arrays: PermArrays, field: GF2e | None = None,
          log_labels=None, z_exponents=None, comments=()) -> str:
    lines = ["qcode 1"]
    lines.extend(f"# {c}" if not str(c).startswith("#") else str(c) for c in comments)
    if field is not None:
        lines.append(f"field e={field.e} poly={poly_to_string(field.poly)}")
    lines.append(f"proto J=2 L={arrays.L} P={arrays.P}")
    for p in arrays.f:
        lines.append(f"f: {p.to_text()}")
    for p in arrays.g:
        lines.append(f"g: {p.to_text()}")
    if log_labels is not None:
        lines.append("lambda: " + " ".join(str(int(v)) for v in np.asarray(log_labels).ravel()))
        lines.append("delta: " + " ".join(str(int(v)) for v in np.asarray(z_exponents).ravel()))
    return "\n".join(lines) + "\n"


def dump_proto(path, arrays: PermArrays, comments=()):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(arrays, comments=comments))


def dump_extended(path, ext: ExtendedPair, comments=()):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(ext.proto.arrays, ext.field, ext.log_labels,
                       ext.z_exponents, comments=comments))
