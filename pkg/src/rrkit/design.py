"""Choosing the device parameter from a privacy requirement.

Both guaranteed bounds are strictly monotone in the device parameter p, so a
target threshold xi pins down the largest p that still meets it — the most
statistically efficient device the requirement admits. The two closed forms
here invert the corresponding worst-case bounds exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import (
    Device,
    PolicyMode,
    PrivacyPolicy,
    SupportSpec,
    ValidationError,
    validate_policy,
)

DEFAULT_TABLE_MS = (3, 4, 5)
DEFAULT_TABLE_XIS = (0.1, 0.2, 0.3, 0.4)


def _check_m(m: int) -> int:
    if not isinstance(m, int) or isinstance(m, bool) or m < 2:
        raise ValidationError("BAD_SUPPORT", f"m must be an integer >= 2, got {m!r}")
    return m


def _check_xi(xi: float) -> float:
    if not isinstance(xi, (int, float)) or not 0.0 < xi < 1.0:
        raise ValidationError("XI_OUT_OF_RANGE", f"xi must lie in (0,1), got {xi!r}")
    return float(xi)


def p0_all_stigmatizing(m: int, xi: float) -> float:
    """Largest p with guaranteed prior/posterior gap at most xi, all values sensitive.

    Inverts the worst-case gap: p0 = 1 / (1 + (m/xi) * ((1-xi)/2)^2).
    """
    _check_m(m)
    _check_xi(xi)
    return 1.0 / (1.0 + (m / xi) * ((1.0 - xi) / 2.0) ** 2)


def p0_nonstigmatizing(m: int, xi: float, c: float) -> float:
    """Largest p guaranteeing posterior non-stigmatizing mass at least xi, when
    the prior non-stigmatizing mass is at least c. Needs xi < c: randomization
    can only dilute the prior mass, never amplify it."""
    _check_m(m)
    _check_xi(xi)
    if not isinstance(c, (int, float)) or not 0.0 < c < 1.0:
        raise ValidationError("C_OUT_OF_RANGE", f"c must lie in (0,1), got {c!r}")
    if xi >= c:
        raise ValidationError(
            "XI_GE_C", f"required posterior mass xi={xi} must be below the prior floor c={c}"
        )
    a = (c - xi) / m
    return a / (a + xi * (1.0 - c))


@dataclass(frozen=True)
class DesignCertificate:
    """What a designed device promises, and under which mode/thresholds."""

    p0: float
    mode: PolicyMode
    xi: float
    m: int
    c: float | None = None
    t: int = 0
    guarantee_statement: str = ""

    def to_json_dict(self) -> dict:
        return {
            "p0": self.p0,
            "mode": self.mode.value,
            "xi": self.xi,
            "c": self.c,
            "m": self.m,
            "t": self.t,
            "guarantee_statement": self.guarantee_statement,
        }


def design_device(policy: PrivacyPolicy, support: SupportSpec) -> tuple[Device, DesignCertificate]:
    """Most efficient device meeting ``policy`` on ``support``, with its certificate."""
    validate_policy(policy, support)
    m = support.m
    if policy.mode is PolicyMode.ALL_STIGMATIZING:
        p0 = p0_all_stigmatizing(m, policy.xi)
        statement = (
            f"For every population on {m} values, no response shifts any posterior "
            f"probability by more than {policy.xi:g} from its prior at p = {p0:.6f}."
        )
        cert = DesignCertificate(
            p0=p0, mode=policy.mode, xi=policy.xi, m=m, c=None, t=0,
            guarantee_statement=statement,
        )
    else:
        p0 = p0_nonstigmatizing(m, policy.xi, policy.c)
        t = policy.t
        statement = (
            f"For every population on {m} values with at least {policy.c:g} prior mass on "
            f"the {t} non-stigmatizing value(s), every response leaves posterior "
            f"non-stigmatizing mass at least {policy.xi:g} at p = {p0:.6f}."
        )
        cert = DesignCertificate(
            p0=p0, mode=policy.mode, xi=policy.xi, m=m, c=policy.c, t=t,
            guarantee_statement=statement,
        )
    return Device(p=p0, m=m), cert


@dataclass(frozen=True)
class DesignTable:
    """Grid of all-stigmatizing design parameters: one row per m, one column per xi."""

    ms: tuple[int, ...]
    xis: tuple[float, ...]
    p0: tuple[tuple[float, ...], ...]  # p0[row][col], rounded to 4 decimals

    def to_json_dict(self) -> dict:
        return {
            "xi": list(self.xis),
            "rows": [
                {"m": m, "p0": list(row)} for m, row in zip(self.ms, self.p0)
            ],
        }

    def to_csv(self) -> str:
        header = "m," + ",".join(f"{xi:g}" for xi in self.xis)
        lines = [header]
        for m, row in zip(self.ms, self.p0):
            lines.append(f"{m}," + ",".join(f"{v:.4f}" for v in row))
        return "\n".join(lines) + "\n"


def p0_table(
    ms: tuple[int, ...] = DEFAULT_TABLE_MS,
    xis: tuple[float, ...] = DEFAULT_TABLE_XIS,
) -> DesignTable:
    """All-stigmatizing p0 over a grid, rounded to 4 decimals for display."""
    ms = tuple(int(m) for m in ms)
    xis = tuple(float(x) for x in xis)
    if not ms or not xis:
        raise ValidationError("BAD_GRID", "table needs at least one m and one xi")
    rows = tuple(
        tuple(round(p0_all_stigmatizing(m, xi), 4) for xi in xis) for m in ms
    )
    return DesignTable(ms=ms, xis=xis, p0=rows)
