"""Acceptance criteria, each checked at its stated tolerance.

Run under pytest (one test per criterion; a PASS/FAIL line per criterion is
printed in the terminal summary) or directly::

    python3 tests/test_acceptance.py
"""
from __future__ import annotations

import math
import sys
import time
import warnings

import numpy as np
import pytest

from prolate import (
    SlepianBasis,
    SymbolGrid,
    character_approx_mse,
    dpss_basis,
    eig_count,
    eig_hermitian,
    estimate_eigs_circulant,
    estimate_eigs_symbol_sampling,
    periodic_prolate_operator,
    prolate_operator,
    prolate_operator_2d,
    random_residual,
    random_residual_mc,
    szego_report,
    toeplitz_from_impulse,
    toeplitz_from_symbol,
    toeplitz_matvec,
    transition_bound_dpss,
    truncated_pinv_solve,
    uniform_sinusoid_K,
)
from prolate.approx import DEFAULT_SEED


def _cos_symbol():
    return SymbolGrid.from_coefficients({0: 2.0, 1: 0.5, -1: 0.5}, 1 << 14)


def ac01_trace_law():
    t0 = time.perf_counter()
    gaps = []
    for N, W in [(64, 0.1), (128, 0.25), (256, 0.4)]:
        lam = eig_hermitian(prolate_operator(N, W)).eigenvalues
        gaps.append(abs(lam.sum() - 2 * N * W) <= 1e-8 * N)
    N, M, K = 64, 32, 16
    lam = eig_hermitian(periodic_prolate_operator(N, M, K)).eigenvalues
    gaps.append(abs(lam.sum() - M * K / N) <= 1e-8 * M)
    lam = eig_hermitian(prolate_operator_2d(16, 16, 0.25, 0.25)).eigenvalues
    gap_2d = abs(lam.sum() - 4 * 16 * 16 * 0.25 * 0.25)
    gaps.append(gap_2d <= 1e-6)
    elapsed = time.perf_counter() - t0
    return all(gaps) and elapsed < 30, f"{sum(gaps)}/5 trace identities hold, 2-D gap {gap_2d:.1e}, {elapsed:.2f} s"


def ac02_clustering():
    t0 = time.perf_counter()
    N, W, eps = 1024, 0.25, 0.01
    dec = eig_hermitian(prolate_operator(N, W))
    bound = transition_bound_dpss(N, eps)
    transition = eig_count(dec, eps, 1 - eps)
    top = eig_count(dec, 1 - eps, 1.0, closed=True)
    # eigenvalues may exceed 1 by rounding; count those as belonging to [0.99, 1]
    top += int(np.count_nonzero(dec.eigenvalues > 1.0))
    elapsed = time.perf_counter() - t0
    ok = transition <= 141 and abs(top - 2 * N * W) <= 141 and elapsed < 120
    return ok, f"#(0.01,0.99)={transition} <= 141 (bound {bound:.2f}); #[0.99,1]={top} vs 512; {elapsed:.1f} s"


def ac03_deficit():
    W = 0.2
    deficit = {}
    for N in (256, 512, 1024):
        lam = eig_hermitian(prolate_operator(N, W)).eigenvalues
        deficit[N] = 2 * N * W - float(np.sum(lam**2))
    r1, r2 = deficit[512] / deficit[256], deficit[1024] / deficit[512]
    ok = all(d > 0 for d in deficit.values()) and r1 <= 1.5 and r2 <= 1.5
    return ok, f"deficits {deficit[256]:.4f}, {deficit[512]:.4f}, {deficit[1024]:.4f}; ratios {r1:.4f}, {r2:.4f} <= 1.5"


def ac04_half_point():
    parts = []
    ok = True
    for N, W in [(100, 0.2), (128, 0.25), (200, 0.11)]:
        lam = eig_hermitian(prolate_operator(N, W)).eigenvalues
        lo, hi = math.floor(round(2 * N * W, 9)) - 1, math.ceil(round(2 * N * W, 9))
        ok &= bool(lam[lo] >= 0.5 >= lam[hi])
        parts.append(f"({N},{W}): lam[{lo}]={lam[lo]:.4f}, lam[{hi}]={lam[hi]:.4f}")
    return ok, "; ".join(parts)


def ac05_szego():
    sym = _cos_symbol()
    trace_gaps, cdf = [], {}
    square_gap = None
    for n in (64, 128, 256, 512):
        rep = szego_report(eig_hermitian(toeplitz_from_symbol(sym, n)), sym, ["identity", "square"])
        trace_gaps.append(rep.szego_rows[0].abs_gap)
        cdf[n] = rep.cdf_distance
        if n == 64:
            square_gap = rep.szego_rows[1].abs_gap
    ok = max(trace_gaps) <= 1e-12 and abs(square_gap - 0.0078125) <= 1e-9 and cdf[512] < cdf[64]
    return ok, (
        f"max trace gap {max(trace_gaps):.1e}; x^2 gap at 64 = {square_gap!r}; "
        f"CDF distance {cdf[64]:.4f} (64) -> {cdf[512]:.4f} (512)"
    )


def ac06_character_identity():
    parts, ok = [], True
    for N, W, n in [(64, 0.25, 40), (128, 0.1, 30)]:
        op = prolate_operator(N, W)
        dec = eig_hermitian(op)
        lhs = character_approx_mse(SlepianBasis.from_decomposition(dec, n, op), op.band)
        rhs = 1 - float(np.sum(dec.eigenvalues[:n])) / (2 * N * W)
        ok &= abs(lhs - rhs) <= 1e-6
        parts.append(f"({N},{W},{n}): |{lhs:.6e} - {rhs:.6e}| = {abs(lhs - rhs):.1e}")
    return ok, "; ".join(parts)


def ac07_random_residual():
    op = prolate_operator(64, 0.2)
    # commuting-tridiagonal DPSS: resolves the residual at n=40 (about 1e-17)
    dec = dpss_basis(64, 0.2, method="tridiagonal")
    parts, ok = [], True
    for n in (10, 26, 40):
        rhs = random_residual(dec, n, 64, op.band.measure)
        for process in ("character", "wss"):
            mean, se, _ = random_residual_mc(dec, n, op.band, draws=100_000, seed=DEFAULT_SEED, process=process)
            z = abs(mean - rhs) / se
            ok &= z <= 3
            parts.append(f"n={n} {process}: {z:.2f} SE")
    return ok, f"seed {DEFAULT_SEED}; " + ", ".join(parts)


def ac08_sinusoid_count():
    W, eps = 0.1, 0.01
    parts, ok = [], True
    for N in (128, 256, 512):
        K = uniform_sinusoid_K(N, W, eps).K
        lower = math.ceil(round(2 * N * W, 9))
        upper = 2 * N * W + 3 * math.log(N) * math.log(1 / eps**2)
        ok &= lower <= K <= upper
        parts.append(f"N={N}: {lower} <= K={K} <= {upper:.1f}")
    return ok, "; ".join(parts)


def ac09_separable():
    op = prolate_operator_2d(16, 16, 0.25, 0.25)
    a = eig_hermitian(prolate_operator(16, 0.25)).eigenvalues
    products = np.sort(np.outer(a, a).ravel())[::-1]
    dense = np.sort(np.linalg.eigvalsh(op.to_dense()))[::-1]
    d1 = float(np.max(np.abs(dense - products)))
    d2 = float(np.max(np.abs(eig_hermitian(op).eigenvalues - products)))
    return max(d1, d2) < 1e-8, f"dense Kronecker vs products {d1:.1e}; library vs products {d2:.1e}"


def ac10_estimators():
    sym = _cos_symbol()
    err, diff = {}, {}
    for n in (64, 512):
        op = toeplitz_from_symbol(sym, n)
        lam = eig_hermitian(op).eigenvalues
        samp = estimate_eigs_symbol_sampling(sym, n)
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            circ = estimate_eigs_circulant(op)
        err[n] = float(np.max(np.abs(lam - samp)))
        diff[n] = float(np.max(np.abs(samp - circ)))
    ok = err[512] < err[64] and diff[64] == 0.0 and diff[512] == 0.0
    return ok, f"max error {err[64]:.3e} (64) -> {err[512]:.3e} (512); circulant - sampling = {max(diff.values())}"


def ac11_fast_apply():
    rng = np.random.default_rng(11)
    n = 512
    pos = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    pos[0] = pos[0].real
    h = np.concatenate([np.conj(pos[:0:-1]), pos])
    op = toeplitz_from_impulse(h, n)
    x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    direct = np.array([sum(h[m - k + n - 1] * x[k] for k in range(n)) for m in range(n)])
    mv = float(np.max(np.abs(toeplitz_matvec(op, x) - direct)))
    N, W = 128, 0.2
    P = prolate_operator(N, W)
    dec = eig_hermitian(P)
    K = math.ceil(2 * N * W)
    xs = dec.eigenvectors[:, :K] @ rng.standard_normal(K)
    rep = truncated_pinv_solve(dec, toeplitz_matvec(P, xs), K, op=P)
    rel = float(np.linalg.norm(rep.solution - xs) / np.linalg.norm(xs))
    return mv <= 1e-10 and rel < 1e-8, f"matvec vs double loop {mv:.1e}; pinv relative error {rel:.1e} (K={K})"


CRITERIA = {
    1: ("trace law", ac01_trace_law),
    2: ("eigenvalue clustering", ac02_clustering),
    3: ("sum-of-squares deficit", ac03_deficit),
    4: ("half-point index", ac04_half_point),
    5: ("Szego convergence", ac05_szego),
    6: ("band-averaged character residual identity", ac06_character_identity),
    7: ("random residual vs Monte-Carlo", ac07_random_residual),
    8: ("sinusoid representation scaling", ac08_sinusoid_count),
    9: ("2-D separability", ac09_separable),
    10: ("eigenvalue estimators", ac10_estimators),
    11: ("fast apply", ac11_fast_apply),
}
# asymptotic results are replaced by the finite-size checks in these criteria
SUBSTITUTES = (2, 3, 5, 8)

_results: dict[int, tuple[bool, str]] = {}


def evaluate(k):
    if k not in _results:
        if k == 12:
            subs = {j: evaluate(j)[0] for j in SUBSTITUTES}
            _results[12] = (
                all(subs.values()),
                "asymptotic constants not reproduced at desk scale; finite-size substitutes "
                + ", ".join(f"AC-{j:02d} {'ok' if v else 'FAILED'}" for j, v in subs.items()),
            )
        else:
            _results[k] = CRITERIA[k][1]()
    return _results[k]


def line(k):
    ok, detail = evaluate(k)
    title = CRITERIA[k][0] if k in CRITERIA else "asymptotic results via property checks"
    return f"AC-{k:02d} {'PASS' if ok else 'FAIL'} {title}: {detail}"


@pytest.mark.parametrize("k", list(range(1, 13)), ids=[f"AC{k:02d}" for k in range(1, 13)])
def test_acceptance(k, acceptance_lines):
    text = line(k)
    print(text)
    acceptance_lines.append(text)
    assert evaluate(k)[0], text


if __name__ == "__main__":
    failed = 0
    for k in range(1, 13):
        text = line(k)
        print(text, flush=True)
        failed += text.split()[1] == "FAIL"
    sys.exit(1 if failed else 0)
