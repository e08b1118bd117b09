"""Line-oriented regression corpus: parsing and expectation checking.

Format (hand-editable, diffable):

    # comment
    [entry <id>]
    equation = <text>
    param <name> = <p/q>
    notes = <free text>
    expect.symmetry_degree = <int>
    expect.symmetry_dim = <int>
    expect.contains_generator = <xi>, <eta>
    expect.painleve.overall = passes | weak | fails | no-branches
    expect.branch = p=<r|unresolved>, a0=<r|arbitrary|unresolved>, res={r,...}, dir=<right|left|mixed|none>

Branch expectations are positional against the report's deterministic
(p, a0) branch order and `res` is compared as an exact multiset.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .expressions import ode_problem, parse_xy_poly
from .lie import VectorField, span_contains
from .painleve import ARBITRARY, painleve_test
from .solver import default_degree, solve_point_symmetries

__all__ = ["CorpusEntry", "CorpusError", "parse_corpus", "run_corpus"]


class CorpusError(ValueError):
    def __init__(self, message: str, line: int):
        self.line = line
        super().__init__(f"line {line}: {message}")


@dataclass
class ExpectedBranch:
    p: str
    a0: str
    res: list
    dir: str


@dataclass
class CorpusEntry:
    id: str
    equation: str = ""
    parameters: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    symmetry_dim: int | None = None
    symmetry_degree: int | None = None
    contains_generators: list = field(default_factory=list)
    painleve_overall: str | None = None
    branches: list = field(default_factory=list)
    line: int = 0


def _parse_rational(text: str, line: int) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise CorpusError(f"bad rational {text!r}", line) from exc


def _parse_branch(value: str, line: int) -> ExpectedBranch:
    fields = {}
    rest = value
    while rest.strip():
        rest = rest.strip().lstrip(",").strip()
        if not rest:
            break
        if "=" not in rest:
            raise CorpusError(f"bad branch spec near {rest!r}", line)
        key, rest = rest.split("=", 1)
        key = key.strip()
        if key == "res":
            rest = rest.strip()
            if not rest.startswith("{"):
                raise CorpusError("res expects {...}", line)
            close = rest.find("}")
            if close < 0:
                raise CorpusError("unterminated res set", line)
            inner = rest[1:close].strip()
            fields["res"] = [s.strip() for s in inner.split(",")] if inner else []
            rest = rest[close + 1:]
        else:
            cut = rest.find(",")
            token, rest = (rest, "") if cut < 0 else (rest[:cut], rest[cut + 1:])
            fields[key] = token.strip()
    for need in ("p", "a0", "res", "dir"):
        if need not in fields:
            raise CorpusError(f"branch spec missing {need!r}", line)
    if fields["dir"] not in ("right", "left", "mixed", "none"):
        raise CorpusError(f"bad direction {fields['dir']!r}", line)
    return ExpectedBranch(fields["p"], fields["a0"], fields["res"], fields["dir"])


def parse_corpus(text: str):
    entries = []
    current = None
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[entry") and line.endswith("]"):
            name = line[len("[entry"):-1].strip()
            if not name:
                raise CorpusError("entry id missing", lineno)
            if name in seen:
                raise CorpusError(f"duplicate entry id {name!r}", lineno)
            seen.add(name)
            current = CorpusEntry(name, line=lineno)
            entries.append(current)
            continue
        if current is None:
            raise CorpusError("directive outside of any [entry ...] block", lineno)
        if "=" not in line:
            raise CorpusError("expected key = value", lineno)
        key, value = line.split("=", 1)
        key = key.strip()
        value = value.strip()
        if key == "equation":
            current.equation = value
        elif key.startswith("param "):
            name = key[len("param "):].strip()
            current.parameters[name] = _parse_rational(value, lineno)
        elif key == "notes":
            current.notes.append(value)
        elif key == "expect.symmetry_dim":
            current.symmetry_dim = int(value)
        elif key == "expect.symmetry_degree":
            current.symmetry_degree = int(value)
        elif key == "expect.contains_generator":
            current.contains_generators.append(value)
        elif key == "expect.painleve.overall":
            if value not in ("passes", "weak", "fails", "no-branches"):
                raise CorpusError(f"bad overall verdict {value!r}", lineno)
            current.painleve_overall = value
        elif key == "expect.branch":
            current.branches.append(_parse_branch(value, lineno))
        else:
            raise CorpusError(f"unknown directive {key!r}", lineno)
    for entry in entries:
        if not entry.equation:
            raise CorpusError(f"entry {entry.id!r} has no equation", entry.line)
    return entries


def _split_field_text(text: str):
    depth = 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            return text[:i], text[i + 1:]
    raise ValueError(f"vector field needs 'xi,eta': {text!r}")


def _branch_matches(expected: ExpectedBranch, branch) -> str | None:
    got_p = "unresolved" if branch.p is None else str(branch.p)
    if expected.p != got_p:
        return f"p: expected {expected.p}, got {got_p}"
    if isinstance(branch.a0, Fraction):
        got_a0 = str(branch.a0)
    elif branch.a0 == ARBITRARY:
        got_a0 = "arbitrary"
    else:
        got_a0 = "unresolved"
    if expected.a0 != got_a0:
        return f"a0: expected {expected.a0}, got {got_a0}"
    want = sorted(Fraction(s) for s in expected.res)
    got = sorted(
        value for value, mult in branch.resonances for _ in range(mult)
    )
    if want != got:
        return f"res: expected {expected.res}, got {[str(v) for v in got]}"
    if expected.dir != (branch.direction or "none"):
        return f"dir: expected {expected.dir}, got {branch.direction or 'none'}"
    return None


def check_entry(entry: CorpusEntry):
    """Evaluate one entry; returns a list of mismatch strings (empty = pass)."""
    problems = []
    problem = ode_problem(entry.equation, entry.parameters)
    needs_symmetry = entry.symmetry_dim is not None or entry.contains_generators
    if needs_symmetry:
        degree = entry.symmetry_degree if entry.symmetry_degree is not None else default_degree()
        basis = solve_point_symmetries(problem, degree)
        if entry.symmetry_dim is not None and basis.dimension != entry.symmetry_dim:
            problems.append(
                f"symmetry_dim: expected {entry.symmetry_dim}, got {basis.dimension}"
            )
        for text in entry.contains_generators:
            xi_text, eta_text = _split_field_text(text)
            g = VectorField(
                parse_xy_poly(xi_text, dep=problem.dep, indep=problem.indep),
                parse_xy_poly(eta_text, dep=problem.dep, indep=problem.indep),
            )
            if not span_contains(basis.fields, g):
                problems.append(f"generator not in span: {text}")
    if entry.painleve_overall is not None or entry.branches:
        report = painleve_test(problem)
        if entry.painleve_overall is not None and report.overall != entry.painleve_overall:
            problems.append(
                f"painleve.overall: expected {entry.painleve_overall}, got {report.overall}"
            )
        if entry.branches:
            if len(entry.branches) != len(report.branches):
                problems.append(
                    f"branch count: expected {len(entry.branches)}, got {len(report.branches)}"
                )
            else:
                for i, (want, got) in enumerate(zip(entry.branches, report.branches)):
                    mismatch = _branch_matches(want, got)
                    if mismatch:
                        problems.append(f"branch {i}: {mismatch}")
    return problems


def run_corpus(text: str):
    """Evaluate a corpus file; returns (passed, failed, per-entry output lines)."""
    entries = parse_corpus(text)
    lines = []
    passed = 0
    failed = 0
    for entry in entries:
        try:
            problems = check_entry(entry)
        except Exception as exc:  # surfaced per entry, not fatal to the run
            problems = [f"error: {exc}"]
        if problems:
            failed += 1
            lines.append(f"FAIL {entry.id}")
            lines.extend(f"    {p}" for p in problems)
        else:
            passed += 1
            lines.append(f"ok   {entry.id}")
    lines.append(f"{passed} passed, {failed} failed")
    return passed, failed, lines
