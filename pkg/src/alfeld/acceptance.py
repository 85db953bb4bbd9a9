"""The desk-scale acceptance suite, shared by ``verify-all`` and the test harness.

Each ``criterion_N`` returns a :class:`CriterionResult` whose ``details`` are
exact values only (no timings), so serialized suites are byte-reproducible.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .barypoly import BaryPoly, cell_frame
from .dimension import (
    closed_forms,
    compute_B,
    dim_shape,
    dim_superspline,
    enumerate_B,
    minimal_B2,
    minimal_config,
    minimal_table,
    schenck_dim,
    simplex_face_counts,
    smoothness_chain,
)
from .dofs import build_local_dofs
from .errors import NotMinimalFamily
from .geometry import alfeld_split, builtin_mesh, reference_simplex
from .multiindex import (
    ElementConfig,
    bijection_boundary,
    bijection_interior_b,
    boundary_preimage,
    check_assumption,
    check_partition,
    decomposition_pair,
    enumerate_sigma,
    interior_preimage,
    proper_faces,
    refined_decomposition,
)
from .qop import apply_q, derivative_scaling_holds, invert_q, vanishing_transfer_check
from .reporting import dumps
from .spline_space import continuity_check, dimension_oracle, dual_basis_check, unisolvence_check

CT = ElementConfig(2, (1, 1), 3, 1)
QUINTIC = ElementConfig(3, (1, 1, 2), 5, 1)
SEPTIC = ElementConfig(2, (2, 3), 7, 1)
BASE_CONFIGS = (CT, QUINTIC, SEPTIC)


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    details: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"number": self.number, "name": self.name, "passed": self.passed, "details": self.details}


def element_reproduction(config: ElementConfig, expected: int) -> dict:
    mesh = reference_simplex(config.d)
    split = alfeld_split(mesh, 0)
    dofs = build_local_dofs(config, mesh, 0)
    uni = unisolvence_check(config, mesh)
    form1, form2 = dim_superspline(config, simplex_face_counts(config.d))
    shape1, shape2 = dim_shape(config)
    try:
        closed = closed_forms(config, simplex_face_counts(config.d))
        closed_values = [closed["polynomial_value"], closed["binomial_value"]]
    except NotMinimalFamily:
        closed_values = []
    values = {
        "dof_count": len(dofs),
        "matrix_size": uni.matrix_size,
        "oracle_dim": dimension_oracle(config, split),
        "theorem_forms": [form1, form2],
        "shape_forms": [shape1, shape2],
        "closed_forms": closed_values,
    }
    flat = [values["dof_count"], values["matrix_size"], values["oracle_dim"], form1, form2, shape1, shape2]
    flat += closed_values
    values["nonsingular"] = uni.nonsingular
    values["expected"] = expected
    values["ok"] = uni.nonsingular and all(v == expected for v in flat)
    return values


def criterion_1() -> CriterionResult:
    d = element_reproduction(CT, 12)
    return CriterionResult(1, "Clough-Tocher element: 12 DOFs, unisolvent", d["ok"], d)


def criterion_2() -> CriterionResult:
    d = element_reproduction(QUINTIC, 65)
    return CriterionResult(2, "quintic C1 element in 3D: 65 DOFs, unisolvent", d["ok"], d)


def criterion_3() -> CriterionResult:
    d = element_reproduction(SEPTIC, 40)
    return CriterionResult(3, "C2 element in 2D with k=7: 40 DOFs, unisolvent", d["ok"], d)


# ---------------------------------------------------------------------------
# tables


def _brute_minimal(d: int, r1: int) -> tuple:
    """Sequential minimization of r_2, ..., r_d, k, b by exhaustive feasibility search."""

    def feasible(prefix: list) -> bool:
        r = list(prefix)
        while len(r) < d:
            r.append(2 * r[-1])
        k = 2 * r[-1] + 1
        return any(check_assumption(d, r, k, b).valid for b in range(k + 1))

    r = [r1]
    for _ in range(1, d):
        lo = 2 * r[-1] if len(r) >= 2 else 0
        c = lo
        while not feasible(r + [c]):
            c += 1
            if c > 8 * (r[-1] + 2):
                return None
        r.append(c)
    k = 0
    while not any(check_assumption(d, r, k, b).valid for b in range(k + 1)):
        k += 1
    b = next(b for b in range(k + 1) if check_assumption(d, r, k, b).valid)
    return tuple(r), k - b, k, b


def _table2_expected(d: int, m: int, parity: str) -> tuple:
    if d == 2:
        if parity == "odd":
            return (2 * m - 1, 3 * m - 2), 5 * m - 3, 6 * m - 3, m
        return (2 * m, 3 * m), 5 * m + 1, 6 * m + 1, m
    if parity == "odd":
        return (2 * m - 1, 3 * m - 2, 6 * m - 4), 11 * m - 7, 12 * m - 7, m
    return (2 * m, 3 * m, 6 * m), 11 * m + 1, 12 * m + 1, m


def criterion_4() -> CriterionResult:
    rows = minimal_table(range(1, 5), range(1, 4))
    mismatches = []
    for row in rows:
        d, m, parity = row["d"], row["m"], row["parity"]
        got = (tuple(row["r"]), row["rho"], row["k"], row["b"])
        if row["k"] - row["b"] != row["rho"]:
            mismatches.append({"row": row, "reason": "rho != k - b"})
        if d in (2, 3) and got != _table2_expected(d, m, parity):
            mismatches.append({"row": row, "reason": "second table"})
        if d >= 2:
            if not row["valid"]:
                mismatches.append({"row": row, "reason": "assumption"})
            if got != _brute_minimal(d, row["r"][0]):
                mismatches.append({"row": row, "reason": "not minimal"})
        elif row["element_construction"] != "unsupported":
            mismatches.append({"row": row, "reason": "d = 1 flag"})
    return CriterionResult(
        4, "parameter tables for d = 1..4, m = 1..3", not mismatches, {"rows": rows, "mismatches": mismatches}
    )


# ---------------------------------------------------------------------------
# B numbers


def criterion_5() -> CriterionResult:
    configs = list(BASE_CONFIGS) + [minimal_config(3, 1, "even")]
    out = []
    ok = True
    for c in configs:
        rec, enum = compute_B(c), enumerate_B(c)
        entry = {"config": c.as_dict(), "B": [[t, n, v] for (t, n), v in sorted(rec.items())]}
        entry["recursion_equals_enumeration"] = rec == enum
        try:
            closed_forms(c, simplex_face_counts(c.d))
            minimal = True
        except NotMinimalFamily:
            minimal = False
        if minimal and c.d == 2:
            entry["B1_equals_n"] = all(rec[(1, n)] == n for n in range(c.face_order(1) + 1))
        if minimal and c.d == 3:
            entry["B2_formula"] = all(
                rec[(2, n)] == minimal_B2(c.r[1], n) for n in range(c.face_order(2) + 1)
            )
        ok = ok and all(v for k, v in entry.items() if isinstance(v, bool))
        out.append(entry)
    return CriterionResult(5, "B-number recursion and closed forms", ok, {"configs": out})


# ---------------------------------------------------------------------------
# Q-operator


def _random_poly(frame, degree: int, rng: random.Random) -> BaryPoly:
    return BaryPoly(frame, degree, {a: rng.randint(-9, 9) for a in enumerate_sigma(frame.size, degree)})


def lemma_trial(config: ElementConfig, split, rng: random.Random) -> tuple:
    """One seeded draw: a face, an order and a polynomial that may or may not vanish there."""
    K = cell_frame(split)
    faces = proper_faces(tuple(range(config.d + 1)))
    F = faces[rng.randrange(len(faces))]
    q = rng.randrange(max(config.rho, 1))
    p = _random_poly(K, config.rho, rng)
    low = [a for a in p.coeffs if sum(x for i, x in enumerate(a) if i not in F) <= q]
    coeffs = {a: c for a, c in p.coeffs.items() if a not in low}
    if rng.random() < 0.5 and low:
        a = low[rng.randrange(len(low))]
        coeffs[a] = rng.choice([-1, 1]) * rng.randint(1, 9)
    return F, q, BaryPoly(K, config.rho, coeffs)


def criterion_6(seed: int = 0) -> CriterionResult:
    rng = random.Random(seed)
    out = []
    ok = True
    for c in BASE_CONFIGS:
        split = alfeld_split(reference_simplex(c.d), 0)
        K = cell_frame(split)
        basis = enumerate_sigma(c.d + 1, c.rho)
        round_trip = all(
            invert_q(c, apply_q(c, BaryPoly.monomial(K, beta), split), split) == BaryPoly.monomial(K, beta)
            for beta in basis
        )
        scaling = all(derivative_scaling_holds(c, _random_poly(K, c.rho, rng), split) for _ in range(3))
        counts = {"both_true": 0, "both_false": 0, "disagree": 0}
        for _ in range(50):
            F, q, p = lemma_trial(c, split, rng)
            a, b = vanishing_transfer_check(c, p, F, q, split)
            counts["both_true" if a and b else "both_false" if a == b else "disagree"] += 1
        entry = {
            "config": c.as_dict(),
            "round_trip_basis_size": len(basis),
            "round_trip": round_trip,
            "derivative_scaling": scaling,
            "lemma_draws": counts,
        }
        ok = ok and round_trip and scaling and counts["disagree"] == 0
        out.append(entry)
    return CriterionResult(6, "layer-shifting operator: inverse, scaling, vanishing transfer", ok, {"configs": out})


# ---------------------------------------------------------------------------
# decompositions


EXTRA_REFINED = ((2, (1, 2), 7),)
EXTRA_PAIRS = (ElementConfig(2, (3, 4), 9, 2), ElementConfig(3, (3, 4, 8), 17, 2))


def _pair_summary(c: ElementConfig) -> dict:
    boundary, interior = decomposition_pair(c)
    full_k = refined_decomposition(c.d, c.r_boundary, c.k)
    full_rho = refined_decomposition(c.d, c.r_interior, c.rho)
    pk = check_partition(full_k, c.d, c.k)
    prho = check_partition(full_rho, c.d, c.rho)
    # interior cells are the Sigma0 cell and the facet cells of the degree-rho decomposition
    rho_cells = {(x.label.kind, x.label.F, x.label.n): x.indices for x in full_rho}
    pint = [
        check_partition(interior, c.d, c.rho)[0],
        all(rho_cells.get((x.label.kind, x.label.F, x.label.n)) == x.indices for x in interior),
    ]
    rt_boundary = True
    for cell in boundary:
        for alpha in cell.indices:
            theta, sigma = bijection_boundary(alpha, cell.label, c.r_boundary)
            if boundary_preimage(theta, sigma, cell.label.F, c.d, c.k) != alpha:
                rt_boundary = False
    rt_interior = True
    for cell in interior[1:]:
        for beta in cell.indices:
            theta, sigma = bijection_interior_b(beta, cell.label, c)
            if interior_preimage(theta, sigma, cell.label.F, c) != beta:
                rt_interior = False
    nb = sum(len(x) for x in boundary)
    ni = sum(len(x) for x in interior)
    return {
        "config": c.as_dict(),
        "boundary_count": nb,
        "interior_count": ni,
        "count_matches_dimension": nb + ni == dim_shape(c)[0],
        "degree_k_partition": list(pk),
        "degree_rho_partition": list(prho),
        "interior_cells_disjoint_subcells": pint,
        "boundary_round_trip": rt_boundary,
        "interior_round_trip": rt_interior,
    }


def criterion_7() -> CriterionResult:
    out = []
    ok = True
    for d, rbar, kbar in EXTRA_REFINED:
        cells = refined_decomposition(d, rbar, kbar)
        disjoint, exhaustive = check_partition(cells, d, kbar)
        rt = all(
            boundary_preimage(*bijection_boundary(a, cell.label, rbar), cell.label.F, d, kbar) == a
            for cell in cells
            if cell.label.kind == "SigmaFn"
            for a in cell.indices
        )
        out.append({"refined": {"d": d, "rbar": list(rbar), "kbar": kbar}, "partition": [disjoint, exhaustive], "round_trip": rt})
        ok = ok and disjoint and exhaustive and rt
    for c in BASE_CONFIGS + EXTRA_PAIRS:
        s = _pair_summary(c)
        out.append(s)
        ok = ok and all(v if isinstance(v, bool) else all(v) for k, v in s.items() if k not in ("config", "boundary_count", "interior_count"))
    return CriterionResult(7, "refined decompositions partition and biject", ok, {"cases": out})


# ---------------------------------------------------------------------------
# global checks


def criterion_8(seed: int = 0) -> CriterionResult:
    out = []
    ok = True
    for c, name in ((CT, "two-triangles"), (QUINTIC, "two-tets")):
        rep = continuity_check(c, builtin_mesh(name), trials=5, seed=seed)
        jumps = [[j.as_dict() for j in trial] for trial in rep.jumps]
        out.append(
            {
                "config": c.as_dict(),
                "mesh": name,
                "trials": rep.trials,
                "jumps": jumps,
                "all_zero": rep.all_zero,
                "defect_detected": rep.defect_detected,
            }
        )
        ok = ok and rep.all_zero and bool(rep.defect_detected)
    return CriterionResult(8, "inter-element continuity on two-cell meshes", ok, {"meshes": out})


def criterion_9() -> CriterionResult:
    mesh = builtin_mesh("two-triangles")
    identity, size = dual_basis_check(CT, mesh)
    N = mesh.face_counts()
    form1, form2 = dim_superspline(CT, N)
    details = {"size": size, "identity": identity, "face_counts": list(N), "theorem_forms": [form1, form2]}
    ok = identity and size == 17 and N == (4, 5, 2) and form1 == form2 == 17
    return CriterionResult(9, "global dual basis on two triangles", ok, details)


def criterion_10() -> CriterionResult:
    checks = []
    for c in (CT, QUINTIC):
        split = alfeld_split(reference_simplex(c.d), 0)
        formula = schenck_dim(c.d, c.r[0], c.k)
        oracle = dimension_oracle(c, split, supersmoothness=False, split_point=False)
        checks.append({"d": c.d, "r1": c.r[0], "k": c.k, "formula": formula, "oracle": oracle})
    expected = [12, 68]
    chains = []
    for row in minimal_table(range(2, 5), range(1, 4)):
        c = ElementConfig(row["d"], tuple(row["r"]), row["k"], row["b"])
        rho, mid, star = smoothness_chain(c)
        chains.append({"d": c.d, "r": list(c.r), "rho": rho, "middle": mid, "rho_star": star, "ok": rho >= mid >= star})
    ok = all(x["formula"] == x["oracle"] == e for x, e in zip(checks, expected)) and all(x["ok"] for x in chains)
    return CriterionResult(10, "split-only dimensions and split point smoothness", ok, {"schenck": checks, "chains": chains})


def run_suite(seed: int = 0) -> list[CriterionResult]:
    return [
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(seed),
        criterion_7(),
        criterion_8(seed),
        criterion_9(),
        criterion_10(),
    ]


def suite_report(results: list[CriterionResult], seed: int) -> dict:
    return {
        "suite": "desk",
        "seed": seed,
        "criteria": [r.as_dict() for r in results],
        "passed": all(r.passed for r in results),
    }


def verify_all(seed: int = 0) -> dict:
    """Criteria 1-10, plus 11: a second run must serialize to identical bytes."""
    first = run_suite(seed)
    second = run_suite(seed)
    same = dumps(suite_report(first, seed)) == dumps(suite_report(second, seed))
    results = first + [CriterionResult(11, "repeat run serializes identically", same, {"identical": same})]
    return suite_report(results, seed)
