"""CPLEX-style LP text format: writer plus a reader for the subset it emits.

Layout::

    Minimize
     obj: 9 r_0_1 + W + 3
    Subject To
     name: terms <= rhs
    Bounds
     0 <= v <= 1 | v free | v >= lo
    Binary
     x_0_1 ...
    End

Rows and terms appear in declaration order; long expressions wrap onto
continuation lines.
"""

from __future__ import annotations

import re
from fractions import Fraction

from ..milp.model import BINARY, CONTINUOUS, LinExpr, MilpModel

__all__ = ["LpFormatError", "format_number", "read_lp", "write_lp"]

_TERMS_PER_LINE = 8

_TOKEN = re.compile(
    r"\s*(?:(?P<sense><=|>=|=<|=>|=)"
    r"|(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_.\[\]#]*)(?P<colon>\s*:)?"
    r"|(?P<sign>[+-]))"
)


class LpFormatError(ValueError):
    pass


def format_number(x) -> str:
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return str(x.numerator)
        return repr(float(x))
    if isinstance(x, float):
        return str(int(x)) if x.is_integer() else repr(x)
    return str(x)


def _terms(pairs, names) -> list[str]:
    out = []
    for j, c in pairs:
        mag = -c if c < 0 else c
        body = names[j] if mag == 1 else f"{format_number(mag)} {names[j]}"
        if out:
            out.append(("- " if c < 0 else "+ ") + body)
        else:
            out.append(("-" if c < 0 else "") + body)
    return out


def _wrap(head: str, pieces: list[str]) -> list[str]:
    lines = []
    for i in range(0, max(len(pieces), 1), _TERMS_PER_LINE):
        chunk = " ".join(pieces[i : i + _TERMS_PER_LINE])
        lines.append((head if i == 0 else "   ") + chunk)
    return lines


def write_lp(model: MilpModel) -> str:
    names = [v.name for v in model.variables]
    lines = ["Minimize"]
    obj = _terms(model.objective.items(), names)
    const = model.objective_constant
    if const:
        if obj:
            obj.append(("- " if const < 0 else "+ ") + format_number(abs(const)))
        else:
            obj.append(format_number(const))
    if not obj:
        obj = ["0"]
    lines += _wrap(" obj: ", obj)
    lines.append("Subject To")
    for row in model.constraints:
        pieces = _terms(row.coeffs, names) + [row.sense, format_number(row.rhs)]
        lines += _wrap(f" {row.name}: ", pieces)
    lines.append("Bounds")
    for var in model.variables:
        if var.kind != CONTINUOUS:
            continue
        lo, hi = var.lower, var.upper
        if lo is None and hi is None:
            lines.append(f" {var.name} free")
        elif hi is not None:
            lo_text = "-inf" if lo is None else format_number(lo)
            lines.append(f" {lo_text} <= {var.name} <= {format_number(hi)}")
        elif lo != 0:
            lines.append(f" {var.name} >= {format_number(lo)}")
    lines.append("Binary")
    binaries = [v.name for v in model.variables if v.kind == BINARY]
    for i in range(0, len(binaries), _TERMS_PER_LINE):
        lines.append(" " + " ".join(binaries[i : i + _TERMS_PER_LINE]))
    lines.append("End")
    return "\n".join(lines) + "\n"


# reader

_SECTIONS = {
    "minimize": "obj",
    "minimise": "obj",
    "minimum": "obj",
    "min": "obj",
    "subject to": "rows",
    "such that": "rows",
    "st": "rows",
    "s.t.": "rows",
    "bounds": "bounds",
    "bound": "bounds",
    "binary": "binary",
    "binaries": "binary",
    "bin": "binary",
    "general": "general",
    "generals": "general",
    "gen": "general",
    "end": "end",
}


def _number(text: str):
    if re.fullmatch(r"\d+", text):
        return int(text)
    f = Fraction(text)
    return f.numerator if f.denominator == 1 else f


def _tokenize(text: str) -> list[tuple[str, str]]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise LpFormatError(f"cannot tokenize near {text[pos:pos + 20]!r}")
        pos = m.end()
        if m.group("sense"):
            s = m.group("sense")
            tokens.append(("sense", {"=<": "<=", "=>": ">="}.get(s, s)))
        elif m.group("num"):
            tokens.append(("num", m.group("num")))
        elif m.group("name"):
            tokens.append(("label" if m.group("colon") else "name", m.group("name")))
        else:
            tokens.append(("sign", m.group("sign")))
    return tokens


def _expression(tokens, i, declare):
    """Parse ``[sign] [coef] name ...`` until a sense or the end; returns (expr, i)."""
    expr = LinExpr()
    while i < len(tokens) and tokens[i][0] != "sense":
        sign = 1
        while i < len(tokens) and tokens[i][0] == "sign":
            if tokens[i][1] == "-":
                sign = -sign
            i += 1
        coef = 1
        saw_num = False
        if i < len(tokens) and tokens[i][0] == "num":
            coef = _number(tokens[i][1])
            saw_num = True
            i += 1
        if i < len(tokens) and tokens[i][0] == "name":
            expr.add(LinExpr.var(declare(tokens[i][1]), sign * coef))
            i += 1
        elif saw_num:
            expr.add(sign * coef)
        else:
            raise LpFormatError(f"unexpected token {tokens[i] if i < len(tokens) else 'end of input'}")
    return expr, i


def read_lp(text: str) -> MilpModel:
    sections: dict[str, list[str]] = {"obj": [], "rows": [], "bounds": [], "binary": [], "general": []}
    current = None
    for raw in text.splitlines():
        line = raw.split("\\", 1)[0].strip()
        if not line:
            continue
        key = " ".join(line.lower().split())
        if key in _SECTIONS:
            current = _SECTIONS[key]
            if current == "end":
                break
            continue
        if current is None:
            raise LpFormatError(f"content before the objective section: {line!r}")
        sections[current].append(line)

    model = MilpModel(name="lp")
    order: list[str] = []
    slot: dict[str, int] = {}
    kinds: dict[str, str] = {}

    def declare(name):
        if name not in slot:
            slot[name] = len(order)
            order.append(name)
            kinds[name] = CONTINUOUS
        return slot[name]

    obj_tokens = _tokenize(" ".join(sections["obj"]))
    if obj_tokens and obj_tokens[0][0] == "label":
        obj_tokens = obj_tokens[1:]
    objective, i = _expression(obj_tokens, 0, declare)
    if i != len(obj_tokens):
        raise LpFormatError("objective contains a relational operator")

    rows = []
    tokens = _tokenize(" ".join(sections["rows"]))
    i = 0
    while i < len(tokens):
        name = None
        if tokens[i][0] == "label":
            name = tokens[i][1]
            i += 1
        lhs, i = _expression(tokens, i, declare)
        if i >= len(tokens):
            raise LpFormatError(f"row {name} has no relational operator")
        sense = tokens[i][1]
        i += 1
        sign = 1
        while i < len(tokens) and tokens[i][0] == "sign":
            sign = -sign if tokens[i][1] == "-" else sign
            i += 1
        if i >= len(tokens) or tokens[i][0] != "num":
            raise LpFormatError(f"row {name} lacks a numeric right-hand side")
        rhs = sign * _number(tokens[i][1])
        i += 1
        rows.append((name, lhs, sense, rhs))

    bounds: dict[str, list] = {}
    for line in sections["bounds"]:
        parts = line.split()
        low = [p.lower() for p in parts]
        if len(parts) == 2 and low[1] == "free":
            declare(parts[0])
            bounds[parts[0]] = [None, None]
        elif len(parts) == 5 and parts[1] in ("<=", "=<") and parts[3] in ("<=", "=<"):
            declare(parts[2])
            bounds[parts[2]] = [_bound(parts[0]), _bound(parts[4])]
        elif len(parts) == 3 and parts[1] in (">=", "=>", "<=", "=<", "="):
            declare(parts[0])
            b = bounds.setdefault(parts[0], [0, None])
            value = _bound(parts[2])
            if parts[1] in (">=", "=>"):
                b[0] = value
            elif parts[1] in ("<=", "=<"):
                b[1] = value
            else:
                b[0] = b[1] = value
        else:
            raise LpFormatError(f"unsupported bound line {line!r}")
    for line in sections["binary"]:
        for name in line.split():
            declare(name)
            kinds[name] = BINARY
    if sections["general"]:
        raise LpFormatError("general integer variables are not supported")

    for name in order:
        lo, hi = bounds.get(name, [0, None])
        model.add_var(name, kinds[name], lo, hi)
    model.set_objective(objective)
    for name, lhs, sense, rhs in rows:
        model.add_constraint(lhs, sense, rhs, name=name)
    return model


def _bound(text: str):
    t = text.lower().lstrip("+")
    if t in ("inf", "infinity"):
        return None
    if t in ("-inf", "-infinity"):
        return None
    return _number(t) if not t.startswith("-") else -_number(t[1:])
