"""Piecewise-linear membership functions over visit counts.

A membership function is an ordered list of branches. Each branch pairs an
interval condition with an affine expression ``slope * v + intercept``; the
first branch whose interval contains ``v`` is evaluated and the result is
clamped into [0, 1]. Arithmetic is exact (``Fraction``) and converted to
float only on output.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .errors import EmptyInput, FuzzySpecError, NoBranchMatches

Number = int | float | Fraction


class LinguisticLabel(str, enum.Enum):
    LOW = "Low"
    MEDIUM = "Medium"
    HIGH = "High"

    @classmethod
    def parse(cls, text: str) -> LinguisticLabel:
        for label in cls:
            if label.value.lower() == text.strip().lower():
                return label
        raise ValueError(f"unknown label {text!r}; expected one of Low, Medium, High")


LABEL_ORDER = (LinguisticLabel.LOW, LinguisticLabel.MEDIUM, LinguisticLabel.HIGH)


@dataclass(frozen=True)
class Interval:
    lo: Optional[Fraction] = None  # None is unbounded
    hi: Optional[Fraction] = None
    lo_closed: bool = False
    hi_closed: bool = False

    def __contains__(self, v: Fraction) -> bool:
        if self.lo is not None and (v < self.lo or (v == self.lo and not self.lo_closed)):
            return False
        if self.hi is not None and (v > self.hi or (v == self.hi and not self.hi_closed)):
            return False
        return True

    def __str__(self) -> str:
        lo = "-inf" if self.lo is None else str(self.lo)
        hi = "inf" if self.hi is None else str(self.hi)
        return f"{'[' if self.lo_closed else '('}{lo},{hi}{']' if self.hi_closed else ')'}"

    @classmethod
    def parse(cls, text: str) -> Interval:
        m = re.fullmatch(r"\s*([\[(])\s*([^,\s]+)\s*,\s*([^\]\s)]+)\s*([\])])\s*", text)
        if not m:
            raise FuzzySpecError(f"bad interval {text!r}")
        left, lo, hi, right = m.groups()
        lo_v = None if lo in ("-inf", "-oo") else Fraction(lo)
        hi_v = None if hi in ("inf", "+inf", "oo") else Fraction(hi)
        return cls(lo_v, hi_v, left == "[" and lo_v is not None, right == "]" and hi_v is not None)


def below(x: Number, closed: bool = False) -> Interval:
    return Interval(None, Fraction(x), False, closed)


def above(x: Number, closed: bool = False) -> Interval:
    return Interval(Fraction(x), None, closed, False)


def between(lo: Number, hi: Number, lo_closed: bool = False, hi_closed: bool = False) -> Interval:
    return Interval(Fraction(lo), Fraction(hi), lo_closed, hi_closed)


@dataclass(frozen=True)
class Branch:
    interval: Interval
    slope: Fraction = Fraction(0)
    intercept: Fraction = Fraction(0)

    @classmethod
    def const(cls, interval: Interval, value: Number) -> Branch:
        return cls(interval, Fraction(0), Fraction(value))

    @classmethod
    def ratio(cls, interval: Interval, a: Number, b: Number, d: Number) -> Branch:
        """Branch computing ``(a*v + b) / d``, the form the published functions use."""
        return cls(interval, Fraction(a) / Fraction(d), Fraction(b) / Fraction(d))

    def __call__(self, v: Fraction) -> Fraction:
        return self.slope * v + self.intercept


@dataclass(frozen=True)
class MembershipFunction:
    label: LinguisticLabel
    branches: tuple[Branch, ...]
    domain: tuple[int, int]

    def exact(self, visits: Number) -> Fraction:
        v = Fraction(visits)
        for br in self.branches:
            if v in br.interval:
                return min(Fraction(1), max(Fraction(0), br(v)))
        raise NoBranchMatches(f"{self.label.value}: no branch covers visits={visits}")

    def __call__(self, visits: Number) -> float:
        return float(self.exact(visits))


@dataclass(frozen=True)
class FuzzySetSpec:
    name: str
    functions: dict[LinguisticLabel, MembershipFunction]
    domain: tuple[int, int]
    # crisp classification: total <= low_max -> Low, <= medium_max -> Medium, else High
    thresholds: tuple[int, int] = (2, 5)

    def __post_init__(self) -> None:
        if set(self.functions) != set(LinguisticLabel):
            raise FuzzySpecError(f"{self.name}: need exactly one function per label")
        for fn in self.functions.values():
            if fn.domain != self.domain:
                raise FuzzySpecError(f"{self.name}: {fn.label.value} domain differs from spec domain")
        lo, mid = self.thresholds
        if lo >= mid:
            raise FuzzySpecError(f"{self.name}: thresholds must be increasing")

    def __getitem__(self, label: LinguisticLabel | str) -> MembershipFunction:
        if isinstance(label, str) and not isinstance(label, LinguisticLabel):
            label = LinguisticLabel.parse(label)
        return self.functions[label]

    def degrees(self, visits: Number) -> dict[LinguisticLabel, float]:
        return {label: self.functions[label](visits) for label in LABEL_ORDER}

    def classify(self, total: int) -> LinguisticLabel:
        return classify_total(total, self.thresholds)


@dataclass
class VisitStats:
    imsi: str
    per_day_visits: list[int] = field(default_factory=lambda: [0] * 7)

    def __post_init__(self) -> None:
        if len(self.per_day_visits) < 1:
            raise ValueError("window must cover at least one day")
        if any(v < 0 for v in self.per_day_visits):
            raise ValueError("visit counts must be non-negative")

    @property
    def window_days(self) -> int:
        return len(self.per_day_visits)

    @property
    def total_visits(self) -> int:
        return sum(self.per_day_visits)


def eval_membership(fn: MembershipFunction, visits: Number) -> float:
    if visits < 0:
        raise ValueError("visits must be non-negative")
    return fn(visits)


def min_intersection(degrees: Iterable[float]) -> float:
    degrees = list(degrees)
    if not degrees:
        raise EmptyInput("min_intersection of nothing")
    return min(degrees)


def select_frequent(candidates: Sequence[tuple[str, float]]) -> tuple[str, float]:
    """Pick the minimum-degree candidate; ties go to the smallest IMSI."""
    if not candidates:
        raise EmptyInput("no candidates")
    imsi, degree = min(candidates, key=lambda c: (c[1], c[0]))
    return imsi, degree


def classify_total(total: int, thresholds: tuple[int, int] = (2, 5)) -> LinguisticLabel:
    low_max, medium_max = thresholds
    if total <= low_max:
        return LinguisticLabel.LOW
    if total <= medium_max:
        return LinguisticLabel.MEDIUM
    return LinguisticLabel.HIGH


def classify_visits(stats: VisitStats, thresholds: tuple[int, int] = (2, 5)) -> LinguisticLabel:
    return classify_total(stats.total_visits, thresholds)


def _observation_spec() -> FuzzySetSpec:
    dom = (0, 20)
    low = MembershipFunction(LinguisticLabel.LOW, (
        Branch.const(below(4, closed=True), 1),
        Branch.ratio(between(4, 8), -1, 8, 5),  # (8 - v) / 5
        Branch.const(above(8, closed=True), 0),
    ), dom)
    medium = MembershipFunction(LinguisticLabel.MEDIUM, (
        Branch.const(below(8, closed=True), 0),
        # original form "(v-12)/5, 9 < v < 12", which is negative throughout
        Branch.ratio(between(8, 12), 1, -8, 5),
        Branch.ratio(between(12, 14, lo_closed=True), -1, 14, 5),  # (14 - v) / 5
        # original form "1, 14 < v >= 15"
        Branch.const(above(14, closed=True), 1),
    ), dom)
    high = MembershipFunction(LinguisticLabel.HIGH, (
        Branch.const(below(16), 0),
        Branch.ratio(between(16, 18, lo_closed=True), -1, 18, 5),  # (18 - v) / 5
        Branch.const(above(18, closed=True), 1),
    ), dom)
    return FuzzySetSpec(
        "observation",
        {f.label: f for f in (low, medium, high)},
        dom,
        thresholds=(7, 15),
    )


def _weekly_spec() -> FuzzySetSpec:
    dom = (0, 7)
    low = MembershipFunction(LinguisticLabel.LOW, (
        Branch.const(below(1, closed=True), 1),  # original form "v < 1"
        Branch.ratio(between(1, 2, hi_closed=True), -1, 2, 1),  # original form "(v-1)/3"
        Branch.const(above(2), 0),
    ), dom)
    medium = MembershipFunction(LinguisticLabel.MEDIUM, (
        Branch.const(below(2, closed=True), 0),  # original form "v > 2"
        Branch.ratio(between(2, 4), 1, -2, 3),  # (v - 2) / 3
        Branch.ratio(between(4, 5, lo_closed=True), -1, 6, 3),  # (6 - v) / 3
        Branch.const(above(5, closed=True), 0),  # original form "1, v < 5"
    ), dom)
    high = MembershipFunction(LinguisticLabel.HIGH, (
        Branch.const(below(5), 0),  # original form "v > 5"
        Branch.ratio(between(5, 6, lo_closed=True), -1, 7, 3),  # (7 - v) / 3
        Branch.const(above(6, closed=True), 1),  # original form "v < 6"
    ), dom)
    return FuzzySetSpec("weekly", {f.label: f for f in (low, medium, high)}, dom, thresholds=(2, 5))


def default_fuzzy_specs() -> tuple[FuzzySetSpec, FuzzySetSpec]:
    """Return ``(observation, weekly)`` specs on [0, 20] and [0, 7]."""
    return _observation_spec(), _weekly_spec()


def spec_by_name(name: str) -> FuzzySetSpec:
    obs, weekly = default_fuzzy_specs()
    specs = {"observation": obs, "weekly": weekly}
    try:
        return specs[name]
    except KeyError:
        raise ValueError(f"unknown fuzzy spec {name!r}; expected observation or weekly") from None


# Text format, whitespace separated, '#' comments:
#   name <name>
#   domain <lo> <hi>
#   thresholds <low_max> <medium_max>
#   <label> <interval> <slope> <intercept>
# e.g. "Low (4,8) -1/5 8/5". Branch order within a label is evaluation order.


def parse_fuzzy_spec(text: str) -> FuzzySetSpec:
    name = "custom"
    domain: tuple[int, int] | None = None
    thresholds = (2, 5)
    branches: dict[LinguisticLabel, list[Branch]] = {label: [] for label in LinguisticLabel}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            head = parts[0].lower()
            if head == "name":
                name = parts[1]
            elif head == "domain":
                domain = (int(parts[1]), int(parts[2]))
            elif head == "thresholds":
                thresholds = (int(parts[1]), int(parts[2]))
            else:
                label = LinguisticLabel.parse(parts[0])
                if len(parts) != 4:
                    raise FuzzySpecError("expected: label interval slope intercept")
                branches[label].append(Branch(Interval.parse(parts[1]), Fraction(parts[2]), Fraction(parts[3])))
        except (ValueError, IndexError, ZeroDivisionError, FuzzySpecError) as exc:
            raise FuzzySpecError(f"line {lineno}: {exc}") from None
    if domain is None:
        raise FuzzySpecError("missing 'domain' line")
    functions = {}
    for label, brs in branches.items():
        if not brs:
            raise FuzzySpecError(f"no branches for {label.value}")
        fn = MembershipFunction(label, tuple(brs), domain)
        for v in range(domain[0], domain[1] + 1):
            fn.exact(v)  # every integer in the domain must be covered
        functions[label] = fn
    return FuzzySetSpec(name, functions, domain, thresholds)


def read_fuzzy_spec(path: str | Path) -> FuzzySetSpec:
    return parse_fuzzy_spec(Path(path).read_text())


def format_fuzzy_spec(spec: FuzzySetSpec) -> str:
    lines = [
        f"name {spec.name}",
        f"domain {spec.domain[0]} {spec.domain[1]}",
        f"thresholds {spec.thresholds[0]} {spec.thresholds[1]}",
    ]
    for label in LABEL_ORDER:
        for br in spec.functions[label].branches:
            lines.append(f"{label.value} {br.interval} {br.slope} {br.intercept}")
    return "\n".join(lines) + "\n"
