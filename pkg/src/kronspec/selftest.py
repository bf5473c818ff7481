"""Property suites runnable from the CLI and the service.

Each suite is a scaled-down, seeded rendition of one of the package's
acceptance properties: spectral-simplicity density and openness, the
pair/tuple perturbation searches, the Kronecker inverse term bound, the
degenerate-input preprocessing pipeline, closed-form oracles, and CLI
determinism.  ``trials`` caps the per-suite sample counts (None keeps the
defaults, 0 makes every suite vacuous), so smoke runs stay cheap.

Summaries carry no wall-clock data: repeated runs with one seed emit
byte-identical JSON.  Setting KRONSPEC_SELFTEST_FORCE_FAIL in the
environment injects a failing suite, which lets wrappers verify that a red
selftest actually propagates.
"""

from __future__ import annotations

import os

import numpy as np

from .errors import InputError, KronspecError
from .kron import (
    BinomialInverseOptions,
    KroneckerBinomial,
    binomial_inverse,
    evaluate_binomial,
    kron_rank,
    preprocess_binomial,
    reconstruct,
)
from .matrices import (
    Field,
    RandomSource,
    as_matrix,
    condition_number,
    frobenius_norm,
    identity,
    inverse,
    retag,
    sample_gaussian,
    subtract,
)
from .perturb import PerturbSpec, SelfMap, perturb_pair_inverse, perturb_tuple
from .spectra import (
    certify_openness,
    char_poly_discriminant,
    quadratic_discriminant,
    simplicity_report,
)

_FORCE_FAIL_ENV = "KRONSPEC_SELFTEST_FORCE_FAIL"
_MAX_FAILURES_LISTED = 5

_DEFAULT_TRIALS = {
    "density": 1000,
    "openness": 100,
    "pair_search": 200,
    "tuple_search": 100,
    "kron_bound": 100,
    "degenerate_pipeline": 50,
    "oracle_equivalence": 1000,
    "determinism": 3,
}

# mixing constant for deriving per-case 64-bit seeds from the base seed
_SEED_STRIDE = 0x9E3779B97F4A7C15


def _case_seed(seed: int, counter: int) -> int:
    return (seed + _SEED_STRIDE * (counter + 1)) % 2**64


def _resolve(trials: int | None, name: str) -> int:
    base = _DEFAULT_TRIALS[name]
    if trials is None:
        return base
    return min(trials, base)


def _result(name: str, trials: int, failures: list[str]) -> dict:
    listed = failures[:_MAX_FAILURES_LISTED]
    if len(failures) > _MAX_FAILURES_LISTED:
        listed = listed + [f"...and {len(failures) - _MAX_FAILURES_LISTED} more"]
    return {"name": name, "trials": trials, "passed": not failures, "failures": listed}


def _suite_density(trials: int, nmax: int, seed: int) -> dict:
    failures: list[str] = []
    root = RandomSource(seed)
    for n in range(2, nmax + 1):
        ok = 0
        for t in range(trials):
            m = sample_gaussian(n, Field.COMPLEX, root.derive(10, n, t))
            rep = simplicity_report(m, 1e-10)
            if rep.is_simple and rep.is_invertible:
                ok += 1
        if trials and ok / trials < 0.999:
            failures.append(f"n={n}: only {ok}/{trials} samples simple and invertible")
    return _result("density", trials, failures)


def _suite_openness(trials: int, nmax: int, seed: int) -> dict:
    failures: list[str] = []
    root = RandomSource(seed)
    for n in range(2, nmax + 1):
        for i in range(trials):
            rng = root.derive(11, n, i)
            matrix = None
            for _ in range(32):
                cand = sample_gaussian(n, Field.COMPLEX, rng)
                rep = simplicity_report(cand)
                if rep.is_simple:
                    matrix, report = cand, rep
                    break
            if matrix is None:
                failures.append(f"n={n}, matrix {i}: no certified sample in 32 draws")
                continue
            if not certify_openness(matrix, report, trials, root.derive(11, n, i, 1)):
                failures.append(f"n={n}, matrix {i}: a probe inside the certified radius broke simplicity")
    return _result("openness", trials, failures)


def _shift_matrix(n: int, up: bool) -> Matrix:
    return as_matrix(np.eye(n, k=1 if up else -1), Field.COMPLEX)


def _check_outcome(outcome, inputs, eps, gap_tol, label, failures):
    for i, (before, after) in enumerate(zip(inputs, outcome.perturbed)):
        delta = frobenius_norm(subtract(after, before))
        if not (delta < eps):
            failures.append(f"{label}: delta[{i}] = {delta:.3e} not under eps = {eps:g}")
        fresh = simplicity_report(after, gap_tol)
        if not (fresh.is_simple and fresh.is_invertible):
            failures.append(f"{label}: matrix {i} failed re-certification")
    if not simplicity_report(outcome.product, gap_tol).is_simple:
        failures.append(f"{label}: product failed re-certification")


def _suite_pair_search(trials: int, nmax: int, seed: int) -> dict:
    failures: list[str] = []
    root = RandomSource(seed)
    counter = 0
    for n in range(2, nmax + 1):
        for eps in (1e-1, 1e-3, 1e-6):
            cases = []
            for t in range(trials):
                a = sample_gaussian(n, Field.COMPLEX, root.derive(12, n, t, 0))
                b = sample_gaussian(n, Field.COMPLEX, root.derive(12, n, t, 1))
                cases.append((f"gaussian t={t}", a, b))
            eye = retag(identity(n), Field.COMPLEX)
            zero = as_matrix(np.zeros((n, n)), Field.COMPLEX)
            gauss = sample_gaussian(n, Field.COMPLEX, root.derive(12, n, 999))
            if trials:
                cases.append(("identity pair", eye, eye))
                cases.append(("zero a", zero, gauss))
                cases.append(("zero b", gauss, zero))
                cases.append(("nilpotent pair", _shift_matrix(n, True), _shift_matrix(n, False)))
            for label, a, b in cases:
                counter += 1
                spec = PerturbSpec(eps=eps, seed=_case_seed(seed, counter))
                full = f"n={n}, eps={eps:g}, {label}"
                try:
                    outcome = perturb_pair_inverse(a, b, spec)
                except KronspecError as exc:
                    failures.append(f"{full}: {exc.kind} error: {exc}")
                    continue
                _check_outcome(outcome, [a, b], eps, spec.gap_tol, full, failures)
    return _result("pair_search", trials, failures)


def _suite_tuple_search(trials: int, nmax: int, seed: int) -> dict:
    failures: list[str] = []
    root = RandomSource(seed)
    maps = [SelfMap.transpose(), SelfMap.inverse(), SelfMap.identity()]
    counter = 0
    for n in (3, 5):
        if n > nmax:
            continue
        for t in range(trials):
            mats = [sample_gaussian(n, Field.COMPLEX, root.derive(13, n, t, j)) for j in range(3)]
            counter += 1
            spec = PerturbSpec(eps=1e-2, seed=_case_seed(seed, counter))
            label = f"n={n}, triple {t}"
            try:
                outcome = perturb_tuple(mats, maps, spec)
            except KronspecError as exc:
                failures.append(f"{label}: {exc.kind} error: {exc}")
                continue
            _check_outcome(outcome, mats, spec.eps, spec.gap_tol, label, failures)
    return _result("tuple_search", trials, failures)


def _suite_kron_bound(trials: int, nmax: int, seed: int) -> dict:
    failures: list[str] = []
    root = RandomSource(seed)
    opts = BinomialInverseOptions(rank_check="skip")
    for p in range(2, 7):
        for q in range(2, 7):
            for t in range(trials):
                binom = None
                for attempt in range(50):
                    mats = [
                        sample_gaussian(p, Field.COMPLEX, root.derive(14, p, q, t, attempt, j))
                        for j in range(2)
                    ] + [
                        sample_gaussian(q, Field.COMPLEX, root.derive(14, p, q, t, attempt, 2 + j))
                        for j in range(2)
                    ]
                    candidate = KroneckerBinomial(*mats)
                    try:
                        decomp = binomial_inverse(candidate, opts)
                    except KronspecError:
                        continue  # rejection-resample non-simple pencils
                    binom = candidate
                    break
                label = f"p={p}, q={q}, t={t}"
                if binom is None:
                    failures.append(f"{label}: no admissible binomial in 50 draws")
                    continue
                bound = min(p, q)
                if len(decomp.terms) > bound:
                    failures.append(f"{label}: {len(decomp.terms)} terms exceed min(p, q) = {bound}")
                x = evaluate_binomial(binom)
                rec = reconstruct(decomp)
                resid = float(np.linalg.norm(x.data @ rec.data - np.eye(p * q)))
                if not (resid <= 1e-8 * condition_number(x)):
                    failures.append(f"{label}: residual {resid:.3e} above 1e-8 * cond(X)")
                direct = inverse(x)
                if kron_rank(direct, p, q, 1e-8).numeric_rank > bound:
                    failures.append(f"{label}: direct inverse has Kronecker rank above {bound}")
    return _result("kron_bound", trials, failures)


def _suite_degenerate_pipeline(trials: int, nmax: int, seed: int) -> dict:
    failures: list[str] = []
    root = RandomSource(seed)
    p, q = 3, 4
    delta = 1e-4
    eye = retag(identity(p), Field.COMPLEX)
    opts = BinomialInverseOptions(rank_check="skip")
    for t in range(trials):
        c = sample_gaussian(q, Field.COMPLEX, root.derive(15, t, 0))
        d = sample_gaussian(q, Field.COMPLEX, root.derive(15, t, 1))
        binom = KroneckerBinomial(eye, eye, c, d)
        label = f"seed case {t}"
        try:
            fixed, _ = preprocess_binomial(binom, delta, PerturbSpec(eps=delta, seed=_case_seed(seed, t)))
            decomp = binomial_inverse(fixed, opts)
        except KronspecError as exc:
            failures.append(f"{label}: {exc.kind} error: {exc}")
            continue
        x0 = evaluate_binomial(binom)
        x1 = evaluate_binomial(fixed)
        drift = frobenius_norm(subtract(x0, x1))
        allowed = delta * (frobenius_norm(c) + frobenius_norm(d)) * np.sqrt(p)
        if not (drift <= allowed):
            failures.append(f"{label}: assembled drift {drift:.3e} above {allowed:.3e}")
        rec = reconstruct(decomp)
        resid = float(np.linalg.norm(x1.data @ rec.data - np.eye(p * q)))
        if not (resid <= 1e-8 * condition_number(x1)):
            failures.append(f"{label}: residual {resid:.3e} above 1e-8 * cond(X)")
    return _result("degenerate_pipeline", trials, failures)


def _suite_oracle_equivalence(trials: int, nmax: int, seed: int) -> dict:
    failures: list[str] = []
    root = RandomSource(seed)
    for t in range(trials):
        m = sample_gaussian(2, Field.COMPLEX, root.derive(16, t))
        lhs = char_poly_discriminant(m)
        rhs = quadratic_discriminant(m)
        if abs(lhs - rhs) > 1e-9 * max(1.0, abs(rhs)):
            failures.append(f"trial {t}: eigenvalue and closed-form discriminants disagree")
    if trials:
        binom = KroneckerBinomial(
            as_matrix(np.diag([1.0, 2.0])),
            identity(2),
            identity(2),
            as_matrix(np.diag([1.0, 3.0])),
        )
        decomp = binomial_inverse(binom, BinomialInverseOptions(rank_check="skip"))
        rec = reconstruct(decomp)
        expected = np.diag([0.5, 0.25, 1.0 / 3.0, 0.2])
        err = float(np.abs(rec.data - expected).max())
        if err > 1e-12:
            failures.append(f"diagonal worked example off by {err:.3e}")
    return _result("oracle_equivalence", trials, failures)


def _suite_determinism(trials: int, nmax: int, seed: int) -> dict:
    failures: list[str] = []
    if trials < 2:
        return _result("determinism", trials, failures)
    import tempfile

    from click.testing import CliRunner

    from .cli import main
    from .matio import write_matrix

    runner = CliRunner()
    with tempfile.TemporaryDirectory() as tmp:
        paths = {}
        fixtures = {
            "a": np.diag([1.0, 2.0]),
            "b": np.diag([3.0, 4.0]),
            "c": np.eye(2),
            "d": np.diag([1.0, 3.0]),
            "x": np.diag([2.0, 4.0, 3.0, 5.0]),
        }
        for name, arr in fixtures.items():
            paths[name] = os.path.join(tmp, f"{name}.mm")
            write_matrix(as_matrix(arr), paths[name], "mm")
        commands = {
            "spectrum": ["spectrum", paths["a"]],
            "perturb": ["perturb", paths["a"], paths["b"], "--seed", str(seed)],
            "perturb-tuple": [
                "perturb-tuple", paths["a"], paths["b"], "--maps", "identity,inverse", "--seed", str(seed),
            ],
            "kron-inverse": [
                "kron-inverse", paths["a"], paths["b"], paths["c"], paths["d"], "--p", "2", "--q", "2",
            ],
            "kron-rank": ["kron-rank", paths["x"], "--p", "2", "--q", "2"],
            "selftest": ["selftest", "--trials", "0", "--nmax", "2", "--seed", str(seed)],
        }
        for name, argv in commands.items():
            outputs = []
            for _ in range(trials):
                res = runner.invoke(main, argv, catch_exceptions=False)
                if res.exit_code != 0:
                    failures.append(f"{name}: exit code {res.exit_code}")
                    break
                outputs.append(res.output)
            if len(outputs) == trials and any(o != outputs[0] for o in outputs[1:]):
                failures.append(f"{name}: output varied across {trials} identical runs")
    return _result("determinism", trials, failures)


_SUITES = (
    ("density", _suite_density),
    ("openness", _suite_openness),
    ("pair_search", _suite_pair_search),
    ("tuple_search", _suite_tuple_search),
    ("kron_bound", _suite_kron_bound),
    ("degenerate_pipeline", _suite_degenerate_pipeline),
    ("oracle_equivalence", _suite_oracle_equivalence),
    ("determinism", _suite_determinism),
)


def run_all(trials: int | None = None, nmax: int = 8, seed: int = 0) -> dict:
    """Run every suite; returns a JSON-ready summary without timing data."""
    if trials is not None and trials < 0:
        raise InputError(f"trials must be >= 0, got {trials}")
    if not (2 <= nmax <= 16):
        raise InputError(f"nmax must lie in [2, 16], got {nmax}")
    if not (0 <= seed < 2**64):
        raise InputError(f"seed must be a 64-bit unsigned integer, got {seed}")
    suites = []
    for name, fn in _SUITES:
        suites.append(fn(_resolve(trials, name), nmax, seed))
    if os.environ.get(_FORCE_FAIL_ENV):
        suites.append(_result("forced_failure", 1, ["failure injected via " + _FORCE_FAIL_ENV]))
    return {
        "suites": suites,
        "all_passed": all(s["passed"] for s in suites),
        "trials": trials,
        "nmax": nmax,
        "seed": seed,
    }
