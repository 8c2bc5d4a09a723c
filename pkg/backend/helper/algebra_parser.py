"""
Reader and writer for algebra description files (.alg)

A file is a header followed by sections:

    ring Q
    rho +1
    truncation 3

    generators
    u 0
    x 0

    differential
    x -> 0

    pi 0
    u x -> x

    involution
    x -> -x

    tau 0 [0]
    -> u

Lines starting with # are comments. Missing entries are zero.
"""
import logging
import re
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from .ainfinity import AInfAlgebraDesc, HuStructureDesc, MultilinearMap, tau_name
from .errors import ParseError, SemanticError
from .exact_linalg import RingSpec

logger = logging.getLogger(__name__)

HEADER_RE = re.compile(r"^(ring|rho|truncation)\s+(\S+)$")
PI_RE = re.compile(r"^pi\s+(\d+)$")
TAU_RE = re.compile(r"^tau\s+(\d+)\s*\[\s*([\d\s,]*)\]$")
NAME_RE = re.compile(r"[A-Za-z_]\w*$")
TERM_RE = re.compile(r"\s*([+-])?\s*(?:(\d+(?:/\d+)?)\s*\*?\s*)?([A-Za-z_]\w*)\s*")

Section = Tuple[str, Tuple[int, ...]]


class AlgebraParser:
    """Line-oriented parser; every error carries the 1-based line and column"""

    def __init__(self, ring: Optional[RingSpec] = None, truncation: int = 3):
        self.ring_override = ring
        self.default_truncation = truncation
        self.logger = logger

    def parse(self, text: str) -> Tuple[AInfAlgebraDesc, Optional[HuStructureDesc]]:
        header: Dict[str, Tuple[str, int]] = {}
        generators: List[Tuple[str, int]] = []
        entries: Dict[Section, List[Tuple[int, int, str, str]]] = {}
        order: List[Section] = []
        section: Optional[Section] = None

        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].rstrip()
            if not line.strip():
                continue
            indent = len(line) - len(line.lstrip())
            line = line.strip()
            if "->" not in line:
                m = HEADER_RE.match(line) if section is None else None
                if m:
                    if m.group(1) in header:
                        raise SemanticError(f"Header '{m.group(1)}' given twice (line {lineno})")
                    header[m.group(1)] = (m.group(2), lineno)
                    continue
                new = self._section_header(line, lineno, indent)
                if new is not None:
                    section = new
                    if section in entries:
                        raise SemanticError(f"Section '{line}' declared twice (line {lineno})")
                    entries[section] = []
                    order.append(section)
                    continue
                if section == ("generators", ()):
                    generators.append(self._generator(line, lineno, indent))
                    continue
                if section is None:
                    raise ParseError(f"Unknown header line '{line}'", lineno, indent + 1)
                raise ParseError("Expected 'inputs -> combination'", lineno, indent + 1)
            if section is None or section == ("generators", ()):
                raise ParseError("Entry outside of a structure-map section", lineno, indent + 1)
            lhs, rhs = line.split("->", 1)
            entries[section].append((lineno, indent + len(lhs) + 3, lhs.strip(), rhs))

        ring = self.ring_override or RingSpec.parse(header.get("ring", ("Q", 0))[0])
        rho = self._rho(header)
        truncation = self._int_header(header, "truncation", str(self.default_truncation))
        if not generators:
            raise SemanticError("No generators declared")
        names = [g for g, _ in generators]
        if len(set(names)) != len(names):
            raise SemanticError(f"Duplicate generator names in {names}")
        degrees = dict(generators)

        d = MultilinearMap("d", 1, -1)
        pi: Dict[int, MultilinearMap] = {}
        involution: Optional[MultilinearMap] = None
        tau: Dict[Tuple[int, Tuple[int, ...]], MultilinearMap] = {}
        for section in order:
            kind, params = section
            if kind == "generators":
                continue
            if kind == "differential":
                target = d
            elif kind == "involution":
                target = involution = MultilinearMap("star", 1, 0)
            elif kind == "pi":
                n = params[0]
                if n > truncation:
                    raise SemanticError(f"pi {n} lies above the truncation order {truncation}")
                target = pi[n] = MultilinearMap(f"pi_{n}", n + 2, n)
            else:
                n, indices = params[0], params[1:]
                target = tau[(n, indices)] = MultilinearMap(tau_name(n, indices), n - len(indices) + 1,
                                                            n + len(indices) - 1)
            for lineno, col, lhs, rhs in entries[section]:
                word = self._word(lhs, lineno, degrees)
                if len(word) != target.arity:
                    raise SemanticError(f"{target.name} takes {target.arity} inputs, line {lineno} gives {len(word)}")
                if word in target.table:
                    raise SemanticError(f"{target.name}({' '.join(word)}) defined twice (line {lineno})")
                image = self._combination(rhs, lineno, col, ring, degrees)
                expected = sum(degrees[g] for g in word) + target.degree
                for g in image:
                    if degrees[g] != expected:
                        raise SemanticError(f"{target.name}({' '.join(word)}) -> {g}: degree {degrees[g]}, "
                                            f"expected {expected} (line {lineno})")
                if image:
                    target.table[word] = image

        a = AInfAlgebraDesc(ring, generators, d, pi, involution, rho, truncation)
        h = HuStructureDesc(tau) if tau else None
        self.logger.info(f"Parsed algebra with {len(generators)} generators over {ring.label} "
                         f"(pi: {sorted(pi)}, involution: {involution is not None}, tau: {len(tau)})")
        return a, h

    def _section_header(self, line: str, lineno: int, indent: int) -> Optional[Section]:
        if line in ("generators", "differential", "involution"):
            return (line, ())
        m = PI_RE.match(line)
        if m:
            return ("pi", (int(m.group(1)),))
        m = TAU_RE.match(line)
        if m:
            n = int(m.group(1))
            raw = [s for s in re.split(r"[\s,]+", m.group(2).strip()) if s]
            indices = tuple(int(s) for s in raw)
            if not indices:
                raise SemanticError(f"tau {n} needs at least one index (line {lineno})")
            if any(i < 0 or i > n for i in indices) or list(indices) != sorted(set(indices), reverse=True):
                raise SemanticError(f"tau indices {list(indices)} must strictly decrease inside [0, {n}] "
                                    f"(line {lineno})")
            return ("tau", (n,) + indices)
        if line.split()[0] in ("pi", "tau"):
            raise ParseError(f"Malformed section header '{line}'", lineno, indent + 1)
        return None

    def _generator(self, line: str, lineno: int, indent: int) -> Tuple[str, int]:
        parts = line.split()
        if len(parts) != 2 or not NAME_RE.match(parts[0]):
            raise ParseError("Expected 'name degree'", lineno, indent + 1)
        try:
            degree = int(parts[1])
        except ValueError:
            raise ParseError(f"Degree '{parts[1]}' is not an integer", lineno, indent + len(parts[0]) + 2)
        if degree < 0:
            raise SemanticError(f"Generator {parts[0]} has negative degree {degree}")
        return parts[0], degree

    def _rho(self, header: Dict[str, Tuple[str, int]]) -> int:
        raw, lineno = header.get("rho", ("+1", 0))
        if raw not in ("+1", "1", "-1"):
            raise SemanticError(f"rho must be +1 or -1, got '{raw}' (line {lineno})")
        return -1 if raw == "-1" else 1

    def _int_header(self, header: Dict[str, Tuple[str, int]], key: str, default: str) -> int:
        raw, lineno = header.get(key, (default, 0))
        try:
            value = int(raw)
        except ValueError:
            raise ParseError(f"{key} must be an integer, got '{raw}'", lineno, len(key) + 2)
        if value < 0:
            raise SemanticError(f"{key} must be nonnegative, got {value}")
        return value

    def _word(self, lhs: str, lineno: int, degrees: Dict[str, int]) -> Tuple[str, ...]:
        word = tuple(lhs.split())
        for g in word:
            if g not in degrees:
                raise SemanticError(f"Unknown generator '{g}' (line {lineno})")
        return word

    def _combination(self, text: str, lineno: int, col: int, ring: RingSpec,
                     degrees: Dict[str, int]) -> Dict[str, Any]:
        if text.strip() == "0":
            return {}
        out: Dict[str, Any] = {}
        pos, first = 0, True
        while text[pos:].strip():
            m = TERM_RE.match(text, pos)
            if m is None or (not first and m.group(1) is None):
                offset = pos + len(text[pos:]) - len(text[pos:].lstrip())
                raise ParseError("Expected a term like '2*x', '- 1/2 y' or 'x'", lineno, col + offset)
            name = m.group(3)
            if name not in degrees:
                raise SemanticError(f"Unknown generator '{name}' (line {lineno})")
            c = ring.coerce(Fraction(m.group(2) or 1) * (-1 if m.group(1) == "-" else 1))
            total = ring.reduce(out.get(name, 0) + c)
            if total == 0:
                out.pop(name, None)
            else:
                out[name] = total
            pos, first = m.end(), False
        return out


def parse_algebra(source: Union[str, Path], ring: Optional[RingSpec] = None, truncation: int = 3
                  ) -> Tuple[AInfAlgebraDesc, Optional[HuStructureDesc]]:
    """
    Parse an algebra description

    Args:
        source: file path or the description text itself
        ring: coefficient ring overriding the file's ring header
        truncation: truncation order used when the file has no truncation header

    Returns:
        (algebra, homotopy-unit data or None)

    Raises:
        ParseError, SemanticError
    """
    if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source and source.endswith(".alg")):
        path = Path(source)
        logger.info(f"Reading algebra description {path}")
        text = path.read_text(encoding="utf-8")
    else:
        text = source
    return AlgebraParser(ring, truncation).parse(text)


def _format_combination(image: Dict[str, Any], names: List[str]) -> str:
    parts = []
    for g in sorted(image, key=names.index):
        c = Fraction(image[g])
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        term = g if mag == 1 else f"{mag}*{g}"
        parts.append((sign, term))
    if not parts:
        return "0"
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, term in parts[1:]:
        out += f" {sign} {term}"
    return out


def _format_table(f: MultilinearMap, names: List[str]) -> List[str]:
    lines = []
    for word in sorted(f.table, key=lambda w: [names.index(g) for g in w]):
        lhs = " ".join(word)
        lines.append(f"{lhs} -> {_format_combination(f.table[word], names)}".lstrip())
    return lines


def serialize_algebra(a: AInfAlgebraDesc, h: Optional[HuStructureDesc] = None) -> str:
    """Write a description back in the input grammar; parse_algebra(serialize_algebra(a, h)) == (a, h)"""
    names = a.names
    lines = [f"ring {a.ring.label}", f"rho {a.rho:+d}", f"truncation {a.truncation}", "", "generators"]
    lines += [f"{g} {deg}" for g, deg in a.generators]
    if a.d.table:
        lines += ["", "differential"] + _format_table(a.d, names)
    for n in sorted(a.pi):
        lines += ["", f"pi {n}"] + _format_table(a.pi[n], names)
    if a.involution is not None:
        lines += ["", "involution"] + _format_table(a.involution, names)
    if h is not None:
        for (n, indices) in sorted(h.tau):
            lines += ["", f"tau {n} [{', '.join(str(i) for i in indices)}]"]
            lines += _format_table(h.tau[(n, indices)], names)
    return "\n".join(lines) + "\n"
