"""Counting formulas: block sizes B_{t,n}, spline space dimensions, parameter tables."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import NotMinimalFamily
from .exact import binomial
from .multiindex import ElementConfig, check_assumption, enumerate_sigma0


def compute_B(config: ElementConfig) -> dict:
    """``{(t, n): B_{t,n}}`` for ``0 <= t <= d-1`` and ``0 <= n <= r_{d-t}``, by recursion."""
    config.require_valid()
    d, k = config.d, config.k
    B: dict = {}
    for t in range(d):
        for n in range(config.face_order(t) + 1):
            if t == 0:
                B[(t, n)] = 1
                continue
            val = binomial(k - n + t, t)
            for tp in range(t):
                inner = 0
                for nn in range(n, config.face_order(tp) + 1):
                    inner += binomial(nn - n + t - tp - 1, t - tp - 1) * B[(tp, nn)]
                val -= binomial(t + 1, tp + 1) * inner
            B[(t, n)] = val
    return B


def enumerate_B(config: ElementConfig) -> dict:
    """The same table by counting ``Sigma_0^{q_{t,n}}(I_t, k - n)`` directly."""
    out = {}
    for t in range(config.d):
        for n in range(config.face_order(t) + 1):
            out[(t, n)] = len(enumerate_sigma0(tuple(range(t + 1)), config.q(t, n), config.k - n))
    return out


def _face_sum(config: ElementConfig, B: dict, t: int, start: int) -> int:
    d = config.d
    return sum(
        binomial(n - start + d - t - 1, d - t - 1) * B[(t, n)] for n in range(start, config.face_order(t) + 1)
    )


def dim_superspline(config: ElementConfig, N: Sequence[int]) -> tuple[int, int]:
    """Both displayed forms of the global dimension for face counts ``N_0..N_d``."""
    d, k, b, rho = config.d, config.k, config.b, config.rho
    if len(N) != d + 1:
        raise ValueError(f"expected {d + 1} face counts")
    B = compute_B(config)
    Nd = N[d]
    form1 = binomial(rho + d, d) * Nd
    for t in range(d):
        form1 += N[t] * _face_sum(config, B, t, 0)
        form1 -= binomial(d + 1, t + 1) * Nd * _face_sum(config, B, t, b)
    form2 = binomial(k + d, d) * Nd
    for t in range(d):
        form2 += (N[t] - binomial(d, t + 1) * Nd) * _face_sum(config, B, t, 0)
        form2 -= binomial(d, t) * Nd * _face_sum(config, B, t, b)
    return form1, form2


def simplex_face_counts(d: int) -> tuple:
    return tuple(binomial(d + 1, t + 1) for t in range(d + 1))


def dim_shape(config: ElementConfig) -> tuple[int, int]:
    """Dimension of the local shape space on one simplex, in two forms."""
    d, k, b, rho = config.d, config.k, config.b, config.rho
    B = compute_B(config)
    form1 = binomial(rho + d, d)
    form2 = binomial(k + d, d)
    for t in range(d):
        full, layer = _face_sum(config, B, t, 0), _face_sum(config, B, t, b)
        form1 += binomial(d + 1, t + 1) * (full - layer)
        form2 += binomial(d, t) * (full - layer)
    return form1, form2


# ---------------------------------------------------------------------------
# minimal families


def minimal_row(d: int, m: int, parity: str) -> dict:
    """One row of the minimal-parameter table; ``parity`` is ``"odd"`` or ``"even"`` (of r_1)."""
    if d < 1 or m < 1:
        raise ValueError("need d >= 1 and m >= 1")
    if parity == "odd":
        r = [2 * m - 1] + [2 ** (s - 2) * (3 * m - 2) for s in range(2, d + 1)]
        k = 2 ** (d - 1) * (3 * m - 2) + 1
        rho = (3 * 2 ** (d - 1) - 1) * m - 2**d + 1
    elif parity == "even":
        r = [2 * m] + [2 ** (s - 2) * 3 * m for s in range(2, d + 1)]
        k = 2 ** (d - 1) * 3 * m + 1
        rho = (3 * 2 ** (d - 1) - 1) * m + 1
    else:
        raise ValueError("parity must be 'odd' or 'even'")
    b = m
    row = {"d": d, "m": m, "parity": parity, "r": r, "rho": rho, "k": k, "b": b}
    if d == 1:
        row["element_construction"] = "unsupported"
        row["valid"] = None
    else:
        row["element_construction"] = "supported"
        row["valid"] = check_assumption(d, r, k, b).valid
    return row


def minimal_table(ds: Sequence[int], ms: Sequence[int]) -> list[dict]:
    return [minimal_row(d, m, parity) for d in ds for m in ms for parity in ("odd", "even")]


def minimal_config(d: int, m: int, parity: str) -> ElementConfig:
    row = minimal_row(d, m, parity)
    return ElementConfig(d, tuple(row["r"]), row["k"], row["b"])


def identify_minimal(config: ElementConfig) -> tuple[int, str]:
    """``(m, parity)`` when ``config`` is a minimal-family row; else NotMinimalFamily."""
    r1 = config.r[0]
    m, parity = ((r1 + 1) // 2, "odd") if r1 % 2 else (r1 // 2, "even")
    if m >= 1:
        row = minimal_row(config.d, m, parity)
        if tuple(row["r"]) == config.r and row["k"] == config.k and row["b"] == config.b:
            return m, parity
    raise NotMinimalFamily(f"{config.as_dict()} is not a minimal-family configuration")


def closed_forms(config: ElementConfig, N: Sequence[int]) -> dict:
    """Polynomial-in-m and binomial closed forms for the minimal families, d in {2, 3}."""
    d = config.d
    if d not in (2, 3):
        raise NotMinimalFamily("closed forms exist for d = 2 and d = 3 only")
    m, parity = identify_minimal(config)
    r1, r2 = config.r[0], config.r[1]
    F = Fraction
    if d == 2:
        if parity == "odd":
            coeffs = [F(9 * m * m - 3 * m, 2), F(2 * m * m - m), F(2 * m * m - 3 * m + 1)]
        else:
            coeffs = [F(9 * m * m + 9 * m + 2, 2), F(2 * m * m + m), F(2 * m * m - m)]
        binom = [binomial(r2 + 2, 2), binomial(r1 + 1, 2), binomial(r1, 2)]
    else:
        m2, m3 = m * m, m**3
        if parity == "odd":
            coeffs = [
                F(36 * m3 - 36 * m2 + 11 * m - 1),
                F(9 * m3 - 9 * m2 + 2 * m),
                F(134 * m3 - 174 * m2 + 58 * m, 6),
                F(311 * m3 - 639 * m2 + 430 * m - 96, 6),
            ]
        else:
            coeffs = [
                F(36 * m3 + 36 * m2 + 11 * m + 1),
                F(9 * m3 + 9 * m2 + 2 * m),
                F(134 * m3 + 57 * m2 - 5 * m, 6),
                F(311 * m3 - 99 * m2 - 2 * m, 6),
            ]
        binom = [
            binomial(2 * r2 + 3, 3),
            2 * binomial(r2 + 2, 3),
            binomial(r2, 2) * (r1 + 1) + 2 * r2 * binomial(r1 + 1, 2) + binomial(r1 + 2, 3),
            binomial(r2 + 2 * r1, 3) - 4 * binomial(r1, 3),
        ]
    poly_value = sum((c * x for c, x in zip(coeffs, N)), F(0))
    binom_value = sum(c * x for c, x in zip(binom, N))
    return {
        "m": m,
        "parity": parity,
        "polynomial_coefficients": coeffs,
        "binomial_coefficients": binom,
        "polynomial_value": poly_value,
        "binomial_value": binom_value,
    }


def minimal_B2(r2: int, n: int) -> int:
    """Closed form of ``B_{2,n}`` for the d = 3 minimal families."""
    return binomial(r2, 2) + 2 * r2 * n + binomial(n + 1, 2)


# ---------------------------------------------------------------------------
# split-only spaces


def schenck_dim(d: int, r1: int, k: int) -> int:
    """Dimension of all C^{r1} piecewise degree-k polynomials on an Alfeld split."""
    if r1 % 2:
        m = (r1 + 1) // 2
        return binomial(k + d, d) + d * binomial(k + d - m * (d + 1), d)
    m = r1 // 2
    return binomial(k + d, d) + sum(binomial(k + t - m * (d + 1), d) for t in range(d))


def rho_star(d: int, r1: int) -> int:
    """Order of the automatic smoothness at the split point of any C^{r1} spline."""
    return r1 + (d - 1) * ((r1 + 1) // 2)


def smoothness_chain(config: ElementConfig) -> tuple[int, int, int]:
    """``(rho, r_1 + (2^{d-1} - 1) r_2, rho*)``; valid configs give a non-increasing triple."""
    d, r = config.d, config.r
    return config.rho, r[0] + (2 ** (d - 1) - 1) * r[1], rho_star(d, r[0])


@dataclass(frozen=True)
class DimensionReport:
    config: ElementConfig
    B: dict
    N: tuple
    form1: int
    form2: int
    shape_dim: int | None
    closed: dict | None
    rho_star: int

    def as_dict(self) -> dict:
        return {
            "config": self.config.as_dict(),
            "B": [{"t": t, "n": n, "value": v} for (t, n), v in sorted(self.B.items())],
            "N": list(self.N),
            "dim_form1": self.form1,
            "dim_form2": self.form2,
            "forms_agree": self.form1 == self.form2,
            "shape_dim": self.shape_dim,
            "closed_forms": self.closed,
            "rho_star": self.rho_star,
        }


def dimension_report(config: ElementConfig, N: Sequence[int] | None = None) -> DimensionReport:
    d = config.d
    N = tuple(N) if N is not None else simplex_face_counts(d)
    f1, f2 = dim_superspline(config, N)
    shape = dim_shape(config)[0] if N == simplex_face_counts(d) else None
    closed = None
    if d in (2, 3):
        try:
            closed = closed_forms(config, N)
        except NotMinimalFamily:
            closed = None
    return DimensionReport(config, compute_B(config), N, f1, f2, shape, closed, rho_star(d, config.r[0]))
