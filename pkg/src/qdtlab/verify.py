"""Executable checkers for the inequality claims, exhaustive at small arity.

Each checker scans a population (all vertex subsets, all Boolean tables, a
seeded sample, or one supplied object), records every violation together
with the tightest witness seen, and returns a reproducible report.  A report
with any violation counts as a failed run.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .adegree import FEAS_TOL, PolyFamily, family_degree
from .boolfunc import BoolFunction, RealFunction, indicator
from .fourier import interpolate
from .metrics import avg_sensitivity, binary_entropy, density, entropy
from .qsim import QueryAlgorithm, amplitude_table, extract_amplitude_polys

EXHAUSTIVE_MAX_ARITY = 4
SAMPLED_MAX_ARITY = 10
DEFAULT_SAMPLES = 100_000
_BATCH = 8192


@dataclass(frozen=True)
class VerificationReport:
    claim: str
    population: dict
    violations: tuple[dict, ...]
    extremal: dict | None = None   # witness with the least slack seen
    info: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "claim": self.claim,
            "population": self.population,
            "passed": self.passed,
            "violations": list(self.violations),
            "extremal": self.extremal,
            "info": self.info,
        }


def _merge_extremal(a: dict | None, b: dict | None) -> dict | None:
    if a is None:
        return b
    if b is None:
        return a
    return a if a["slack"] <= b["slack"] else b


def _population(mode: str, n: int, count: int, seed: int | None) -> dict:
    return {"mode": mode, "n": n, "count": count, "seed": seed}


def _check_mode(mode: str, n: int) -> None:
    if mode not in ("exhaustive", "sampled"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "exhaustive" and n > EXHAUSTIVE_MAX_ARITY:
        raise ValueError(f"exhaustive scans are capped at n <= {EXHAUSTIVE_MAX_ARITY}")
    if mode == "sampled" and n > SAMPLED_MAX_ARITY:
        raise ValueError(f"sampled scans are capped at n <= {SAMPLED_MAX_ARITY}")


def _batch_seeds(seed: int, batches: int) -> list[np.random.Generator]:
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(batches)]


def _run_batches(jobs, threads: int):
    if threads <= 1:
        return [job() for job in jobs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda job: job(), jobs))


def _direction_masks(n: int) -> list[tuple[int, int]]:
    """(shift, keep-mask) pairs for pairing each vertex with its i-neighbor."""
    size = 1 << n
    pairs = []
    for i in range(n):
        step = 1 << i
        keep = 0
        for v in range(size):
            if not (v >> i) & 1:
                keep |= 1 << v
        pairs.append((step, keep))
    return pairs


# -- edge bound ---------------------------------------------------------------


def check_edge_bound(n: int, mode: str = "exhaustive", budget: int | None = None,
                     seed: int = 0, threads: int = 1) -> VerificationReport:
    """Internal edge count of every vertex subset against (k/2) log2 k."""
    _check_mode(mode, n)
    if mode == "exhaustive":
        population = (1 << (1 << n)) - 1
        if budget is not None and population > budget:
            raise ValueError(f"budget exceeded: {population} subsets > {budget}")
        return _edge_bound_exhaustive(n, threads)
    samples = budget if budget is not None else DEFAULT_SAMPLES
    return _edge_bound_sampled(n, samples, seed, threads)


def _edge_slack(subset: int, n: int, dirs) -> tuple[int, int, float]:
    k = subset.bit_count()
    t = 0
    for step, keep in dirs:
        t += (subset & (subset >> step) & keep).bit_count()
    bound = 0.0 if k == 1 else k * math.log2(k) / 2.0
    return k, t, bound - t


def _edge_bound_exhaustive(n: int, threads: int) -> VerificationReport:
    size = 1 << n
    dirs = _direction_masks(n)

    def scan(lo: int, hi: int):
        violations, extremal = [], None
        for subset in range(lo, hi):
            k, t, slack = _edge_slack(subset, n, dirs)
            if slack < -1e-9:
                violations.append({"subset": subset, "k": k, "edges": t,
                                   "bound": k * math.log2(k) / 2.0, "slack": slack})
            witness = {"subset": subset, "k": k, "edges": t, "slack": slack}
            extremal = _merge_extremal(extremal, witness)
        return violations, extremal

    total = 1 << size
    chunk = max(1, total // 64)
    jobs = [(lambda lo=lo: scan(lo, min(lo + chunk, total)))
            for lo in range(1, total, chunk)]
    results = _run_batches(jobs, threads)
    violations, extremal = [], None
    for vs, ex in results:
        violations.extend(vs)
        extremal = _merge_extremal(extremal, ex)
    violations.sort(key=lambda v: v["subset"])
    return VerificationReport(
        claim="edge-bound",
        population=_population("exhaustive", n, total - 1, None),
        violations=tuple(violations),
        extremal=extremal,
    )


def _edge_bound_sampled(n: int, samples: int, seed: int, threads: int) -> VerificationReport:
    size = 1 << n
    xor_index = [np.arange(size) for _ in range(1)][0]
    lo_sides = [np.flatnonzero(((np.arange(size) >> i) & 1) == 0) for i in range(n)]
    batches = (samples + _BATCH - 1) // _BATCH
    rngs = _batch_seeds(seed, batches)

    def scan(batch: int):
        rng = rngs[batch]
        count = min(_BATCH, samples - batch * _BATCH)
        bias = rng.random((count, 1))
        member = rng.random((count, size)) < bias
        k = member.sum(axis=1)
        t = np.zeros(count, dtype=np.int64)
        for i in range(n):
            lo = lo_sides[i]
            t += (member[:, lo] & member[:, lo ^ (1 << i)]).sum(axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            bound = np.where(k > 1, k * np.log2(np.maximum(k, 2)) / 2.0, 0.0)
        live = k >= 1
        slack = bound - t
        bad = live & (slack < -1e-9)
        violations = [{"sample": int(batch * _BATCH + row), "k": int(k[row]),
                       "edges": int(t[row]), "bound": float(bound[row]),
                       "slack": float(slack[row])}
                      for row in np.flatnonzero(bad)]
        extremal = None
        live_rows = np.flatnonzero(live)
        if live_rows.size:
            row = live_rows[np.argmin(slack[live_rows])]
            extremal = {"sample": int(batch * _BATCH + row), "k": int(k[row]),
                        "edges": int(t[row]), "slack": float(slack[row])}
        return violations, extremal

    results = _run_batches([(lambda b=b: scan(b)) for b in range(batches)], threads)
    violations, extremal = [], None
    for vs, ex in results:
        violations.extend(vs)
        extremal = _merge_extremal(extremal, ex)
    violations.sort(key=lambda v: v["sample"])
    return VerificationReport(
        claim="edge-bound",
        population=_population("sampled", n, samples, seed),
        violations=tuple(violations),
        extremal=extremal,
    )


# -- entropy vs sensitivity ----------------------------------------------------


def check_entropy_sensitivity(n: int, mode: str = "exhaustive", budget: int | None = None,
                              seed: int = 0, threads: int = 1) -> VerificationReport:
    """avg sensitivity >= H(density)/n for Boolean tables, scanned or sampled."""
    _check_mode(mode, n)
    if mode == "exhaustive":
        population = 1 << (1 << n)
        if budget is not None and population > budget:
            raise ValueError(f"budget exceeded: {population} functions > {budget}")
        return _entropy_sensitivity_exhaustive(n, threads)
    samples = budget if budget is not None else DEFAULT_SAMPLES
    return _entropy_sensitivity_sampled(n, samples, seed, threads)


def _entropy_sensitivity_exhaustive(n: int, threads: int) -> VerificationReport:
    size = 1 << n
    total = 1 << size
    dirs = _direction_masks(n)
    h_table = np.array([binary_entropy(k / size) for k in range(size + 1)])
    edges = n * size // 2

    def scan(lo: int, hi: int):
        violations, extremal = [], None
        for table in range(lo, hi):
            k = table.bit_count()
            flips = 0
            for step, keep in dirs:
                flips += ((table ^ (table >> step)) & keep).bit_count()
            sens = flips / edges
            slack = sens - h_table[k] / n
            if slack < -1e-12:
                violations.append({"table": table, "density": k / size,
                                   "sensitivity": sens, "bound": h_table[k] / n,
                                   "slack": slack})
            extremal = _merge_extremal(extremal, {"table": table, "slack": slack})
        return violations, extremal

    chunk = max(1, total // 64)
    jobs = [(lambda lo=lo: scan(lo, min(lo + chunk, total)))
            for lo in range(0, total, chunk)]
    results = _run_batches(jobs, threads)
    violations, extremal = [], None
    for vs, ex in results:
        violations.extend(vs)
        extremal = _merge_extremal(extremal, ex)
    violations.sort(key=lambda v: v["table"])
    return VerificationReport(
        claim="entropy-sensitivity",
        population=_population("exhaustive", n, total, None),
        violations=tuple(violations),
        extremal=extremal,
    )


def _entropy_sensitivity_sampled(n: int, samples: int, seed: int, threads: int) -> VerificationReport:
    size = 1 << n
    batches = (samples + _BATCH - 1) // _BATCH
    rngs = _batch_seeds(seed, batches)
    neighbor = [np.arange(size) ^ (1 << i) for i in range(n)]

    def scan(batch: int):
        rng = rngs[batch]
        count = min(_BATCH, samples - batch * _BATCH)
        tables = rng.integers(0, 2, size=(count, size), dtype=np.uint8)
        flips = np.zeros(count, dtype=np.int64)
        for i in range(n):
            flips += (tables != tables[:, neighbor[i]]).sum(axis=1)
        sens = flips / (n * size)
        dens = tables.sum(axis=1) / size
        with np.errstate(divide="ignore", invalid="ignore"):
            log_d = np.where((dens > 0) & (dens < 1), np.log2(np.clip(dens, 1e-300, 1)), 0.0)
            log_c = np.where((dens > 0) & (dens < 1),
                             np.log2(np.clip(1.0 - dens, 1e-300, 1)), 0.0)
        h = -dens * log_d - (1.0 - dens) * log_c
        slack = sens - h / n
        bad = slack < -1e-12
        violations = [{"sample": int(batch * _BATCH + row), "density": float(dens[row]),
                       "sensitivity": float(sens[row]), "bound": float(h[row] / n),
                       "slack": float(slack[row])}
                      for row in np.flatnonzero(bad)]
        row = int(np.argmin(slack))
        extremal = {"sample": int(batch * _BATCH + row), "slack": float(slack[row])}
        return violations, extremal

    results = _run_batches([(lambda b=b: scan(b)) for b in range(batches)], threads)
    violations, extremal = [], None
    for vs, ex in results:
        violations.extend(vs)
        extremal = _merge_extremal(extremal, ex)
    violations.sort(key=lambda v: v["sample"])
    return VerificationReport(
        claim="entropy-sensitivity",
        population=_population("sampled", n, samples, seed),
        violations=tuple(violations),
        extremal=extremal,
    )


# -- degree vs sensitivity -------------------------------------------------------


def check_degree_sensitivity(gtilde: RealFunction, gtilde_deg: int,
                             g: RealFunction | None = None,
                             tol: float = 1e-9,
                             ratio_tol: float = 1e-9) -> VerificationReport:
    """Degree of a [0,1]-valued polynomial against its sensitivity/density ratio.

    With the Boolean table it approximates also supplied, additionally checks
    the transferred bound with constant 36 and the sensitivity transfer
    s(approx) >= s(g)/9.
    """
    values = gtilde.values
    if values.min() < -1e-7 or values.max() > 1.0 + 1e-7:
        raise ValueError("approximator values leave [0, 1] beyond 1e-7")
    p = density(gtilde)
    s_tilde = avg_sensitivity(gtilde)
    info: dict = {"density": p, "sensitivity": s_tilde, "degree": gtilde_deg}
    violations = []
    extremal = None
    if p < 1e-12:
        info["vacuous"] = True
    else:
        bound = gtilde.n * s_tilde / (4.0 * p)
        slack = gtilde_deg - bound
        info["bound_4p"] = bound
        if slack < -tol:
            violations.append({"check": "degree_vs_4p", "degree": gtilde_deg,
                               "bound": bound, "slack": slack})
        extremal = _merge_extremal(extremal, {"check": "degree_vs_4p", "slack": slack})
        if g is not None:
            s_g = avg_sensitivity(g)
            bound36 = gtilde.n * s_g / (36.0 * p)
            slack36 = gtilde_deg - bound36
            info["bound_36p"] = bound36
            info["g_sensitivity"] = s_g
            if slack36 < -tol:
                violations.append({"check": "degree_vs_36p", "degree": gtilde_deg,
                                   "bound": bound36, "slack": slack36})
            extremal = _merge_extremal(extremal, {"check": "degree_vs_36p", "slack": slack36})
    if g is not None:
        s_g = avg_sensitivity(g)
        slack_ratio = s_tilde - s_g / 9.0
        info["sensitivity_ratio_slack"] = slack_ratio
        if slack_ratio < -ratio_tol:
            violations.append({"check": "sensitivity_transfer", "s_tilde": s_tilde,
                               "bound": s_g / 9.0, "slack": slack_ratio})
        extremal = _merge_extremal(extremal, {"check": "sensitivity_transfer",
                                              "slack": slack_ratio})
    return VerificationReport(
        claim="degree-sensitivity",
        population=_population("single", gtilde.n, 1, None),
        violations=tuple(violations),
        extremal=extremal,
        info=info,
    )


# -- main chain -------------------------------------------------------------------


def check_main_chain(f: BoolFunction, tol: float = 1e-6,
                     witness_tol: float = FEAS_TOL) -> VerificationReport:
    """Joint-family degree against the summed sensitivity/entropy chain."""
    if not f.is_total:
        raise ValueError("the chain applies to total functions")
    d, family = family_degree(f)
    violation_sizes = family.max_violation(f)
    witness_violation = max(violation_sizes.values())
    ent = entropy(f)
    violations = []
    extremal = None

    if witness_violation > witness_tol:
        violations.append({"check": "witness", "violation": witness_violation,
                           "slack": witness_tol - witness_violation})

    per_output = []
    sum_fiber_sens = 0.0
    sum_fiber_entropy = 0.0
    for y, poly in zip(family.outputs, family.polys):
        approx = poly.values()
        p_tilde = density(approx)
        fiber = indicator(f, y)
        s_fiber = avg_sensitivity(fiber)
        p_fiber = density(fiber)
        sum_fiber_sens += s_fiber
        sum_fiber_entropy += binary_entropy(p_fiber)
        row = {"y": y, "density": p_tilde, "fiber_sensitivity": s_fiber,
               "fiber_p": p_fiber}
        if p_tilde >= 1e-12:
            bound = f.n * avg_sensitivity(approx) / (4.0 * p_tilde)
            slack = d - bound
            row["bound_4p"] = bound
            if slack < -tol:
                violations.append({"check": "per_output", "y": y, "degree": d,
                                   "bound": bound, "slack": slack})
            extremal = _merge_extremal(extremal, {"check": "per_output", "y": y,
                                                  "slack": slack})
        per_output.append(row)

    chain = (
        ("summed_sensitivity", d, f.n / 36.0 * sum_fiber_sens),
        ("sensitivity_vs_entropy", f.n / 36.0 * sum_fiber_sens, sum_fiber_entropy / 36.0),
        ("entropy_sum_vs_entropy", sum_fiber_entropy, ent),
        ("degree_vs_entropy", d, ent / 36.0),
    )
    for name, lhs, rhs in chain:
        slack = lhs - rhs
        if slack < -tol:
            violations.append({"check": name, "lhs": lhs, "rhs": rhs, "slack": slack})
        extremal = _merge_extremal(extremal, {"check": name, "slack": slack})

    info = {
        "degree": d,
        "entropy": ent,
        "witness_violation": witness_violation,
        "sum_fiber_sensitivity": sum_fiber_sens,
        "sum_fiber_entropy": sum_fiber_entropy,
        "per_output": per_output,
        "witness": family.to_json_dict(),
    }
    return VerificationReport(
        claim="main-chain",
        population=_population("single", f.n, 1, None),
        violations=tuple(violations),
        extremal=extremal,
        info=info,
    )


# -- amplitude polynomial degrees ----------------------------------------------------


def check_fact1(alg: QueryAlgorithm, zero_tol: float = 1e-8) -> VerificationReport:
    """Amplitude interpolants stay at degree <= t, probabilities at <= 2t."""
    violations = []
    extremal = None
    max_seen = []
    for t in range(alg.queries + 1):
        polys = extract_amplitude_polys(alg, t, zero_tol)
        table = amplitude_table(alg, t)
        worst_amp = 0
        worst_prob = 0
        for psi, (re_poly, im_poly) in enumerate(polys):
            for part, poly in (("re", re_poly), ("im", im_poly)):
                deg = poly.degree()
                worst_amp = max(worst_amp, deg)
                slack = t - deg
                if slack < 0:
                    violations.append({"check": "amplitude", "t": t, "basis": psi,
                                       "part": part, "degree": deg, "bound": t,
                                       "slack": slack})
                extremal = _merge_extremal(extremal, {"check": "amplitude", "t": t,
                                                      "basis": psi, "part": part,
                                                      "slack": slack})
            prob = RealFunction(alg.regs.n, np.abs(table[:, psi]) ** 2)
            prob_deg = interpolate(prob, zero_tol).degree()
            worst_prob = max(worst_prob, prob_deg)
            slack = 2 * t - prob_deg
            if slack < 0:
                violations.append({"check": "probability", "t": t, "basis": psi,
                                   "degree": prob_deg, "bound": 2 * t, "slack": slack})
            extremal = _merge_extremal(extremal, {"check": "probability", "t": t,
                                                  "basis": psi, "slack": slack})
        max_seen.append({"t": t, "max_amplitude_degree": worst_amp,
                         "max_probability_degree": worst_prob})
    return VerificationReport(
        claim="fact1",
        population=_population("exhaustive", alg.regs.n, (alg.queries + 1) << alg.regs.n, None),
        violations=tuple(violations),
        extremal=extremal,
        info={"per_query": max_seen},
    )
