"""Command-line driver: load an algebra, solve for g, run the requested checks, emit a certificate."""
from __future__ import annotations

import argparse
import json
import logging
import random
import sys
import time
from dataclasses import dataclass, field

from gmpy2 import mpq

from .errors import EngineError, NotFactorizable
from .gauge import act_on_solution, ham_residual, exp_star, star_product
from .lie_core import cyb, is_invariant, load_algebra
from .lie_series import ad_star_diffeo
from .linearizer import DEFAULT_MAX_DEGREE, lemma1_residual, solve_g, twisted_r0
from .poisson_maps import equivariance_check, fm_identity_check, pushforward_check
from .rational import parse_rational
from .rmatrix import cdybe_constant, cdybe_residual, rho_am
from .series import TensorSeries, differential, homogeneous_monomials, space, substitute

log = logging.getLogger(__name__)

FORMAT_VERSION = 1
CHECKS = ("cyb", "cdybe", "solve", "pushforward", "gauge", "fm", "lemma1")
GAUGE_SAMPLES = 5

__all__ = ["RunConfig", "Certificate", "run", "main", "random_cubic", "CHECKS"]


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    algebra: str = "sl2"
    degree: int = 4
    nu_values: list = field(default_factory=lambda: [mpq(1, 2)])
    checks: tuple = CHECKS
    seed: int = 0
    output: str = "text"
    trace: bool = False
    timings: bool = False
    max_degree: int = DEFAULT_MAX_DEGREE

    def validate(self):
        if not 1 <= self.degree <= self.max_degree:
            raise UsageError(f"--degree must lie in [1, {self.max_degree}], got {self.degree}")
        unknown = [c for c in self.checks if c not in CHECKS]
        if unknown:
            raise UsageError(f"unknown check(s) {unknown}; choose from {', '.join(CHECKS)}")
        if "fm" in self.checks and not self.nu_values:
            raise UsageError("the fm check needs at least one --nu")
        if self.output not in ("text", "json"):
            raise UsageError(f"--output must be text or json, got {self.output!r}")

    def echo(self) -> dict:
        return {
            "algebra": self.algebra,
            "degree": self.degree,
            "nu": [str(v) for v in self.nu_values],
            "checks": sorted(self.checks),
            "seed": self.seed,
        }


@dataclass
class Certificate:
    config: dict
    results: list
    timings: dict = field(default_factory=dict)
    version: int = FORMAT_VERSION

    @property
    def passed(self) -> bool:
        return all(r["status"] == "pass" for r in self.results)

    def to_json(self) -> str:
        doc = {"version": self.version, "config": self.config,
               "results": sorted(self.results, key=lambda r: r["check"]),
               "timings": self.timings}
        return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False)

    def to_text(self) -> str:
        lines = [f"poisson-iso certificate v{self.version}: {self.config['algebra']} N={self.config['degree']}"]
        for r in sorted(self.results, key=lambda r: r["check"]):
            line = f"  {r['check']:<24} {r['status']:<12} degree {r['degree']}"
            if r.get("witness"):
                line += f"  witness {r['witness']}"
            if r.get("error"):
                line += f"  ({r['error']})"
            lines.append(line)
        for name, secs in sorted(self.timings.items()):
            lines.append(f"  time {name}: {secs:.3f}s")
        lines.append("PASS" if self.passed else "FAIL")
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def _witness(series: TensorSeries, through: int):
    low = series.truncate(min(through, series.prec))
    if low.is_zero():
        return None
    (idx, code), c = low.lowest_term()
    return {"index": list(idx), "exponents": list(series.space.decode(code)), "coefficient": str(c)}


def _record(check: str, degree: int, residuals, **extra) -> dict:
    witness = None
    for s in residuals:
        witness = _witness(s, degree)
        if witness:
            break
    rec = {"check": check, "degree": degree, "status": "fail" if witness else "pass",
           "residual_zero": witness is None, "witness": witness}
    rec.update(extra)
    return rec


def random_cubic(n: int, prec: int, rng: random.Random) -> TensorSeries:
    """A homogeneous cubic polynomial on g* with coefficients p/q, p in [−3, 3], q in {1, 2, 3}."""
    sp = space(n)
    terms = {}
    for e in homogeneous_monomials(n, 3):
        c = mpq(rng.randint(-3, 3), rng.choice((1, 2, 3)))
        if c:
            terms[((), sp.encode(e))] = c
    return TensorSeries(0, sp, prec, terms)


def _golden(g) -> dict:
    """Nonzero coefficients of log g, keyed by a readable monomial label."""
    A = g.A
    out = {}
    for (idx, code), c in sorted(A.terms.items(), key=lambda kv: (A.space.degree(kv[0][1]), kv[0])):
        slot = "⊗".join(f"e_{i}" for i in idx)
        out[f"{slot}*{A.render_monomial(code)}"] = str(c)
    return out


# ---------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------

def _check_cyb(qt, cfg, ctx):
    defect = cyb(qt.alg, qt.r)
    ok = not defect and is_invariant(qt.alg, qt.t)
    witness = None if ok else {"cyb": {str(k): str(v) for k, v in sorted(defect.items())}}
    return [{"check": "cyb", "degree": 0, "status": "pass" if ok else "fail",
             "residual_zero": ok, "witness": witness}]


def _check_cdybe(qt, cfg, ctx):
    N = cfg.degree
    c = cdybe_constant(qt)
    Z = {k: v * c for k, v in qt.t_bracket_23().items()}
    res = cdybe_residual(qt.alg, rho_am(qt, N), Z)
    return [_record("cdybe", N - 1, [res], constant=str(c))]


def _solution(qt, cfg, ctx):
    if "solution" not in ctx:
        start = time.perf_counter()
        ctx["solution"] = solve_g(qt, cfg.degree, cfg.max_degree, keep_states="lemma1" in cfg.checks)
        ctx["solve_time"] = time.perf_counter() - start
    return ctx["solution"]


def _check_solve(qt, cfg, ctx):
    sol = _solution(qt, cfg, ctx)
    rec = _record("solve", sol.degree, [sol.residual], log_g=_golden(sol.g))
    if cfg.trace:
        rec["trace"] = sol.trace
    return [rec]


def _check_pushforward(qt, cfg, ctx):
    # the certified statement is an isomorphism onto G*, which needs b to be invertible
    if not qt.factorizable:
        raise NotFactorizable(f"t is degenerate for {qt.name}; b^-1 ∘ a is not defined")
    g = _solution(qt, cfg, ctx).g
    through = cfg.degree - 1
    table = pushforward_check(qt, g, through)
    return [_record("pushforward", through, [table.entries[k] for k in sorted(table.entries)])]


def _gauge_elements(qt, cfg, prec):
    rng = random.Random(cfg.seed)
    return [exp_star(qt.alg, differential(random_cubic(qt.alg.dim, prec + 1, rng)))
            for _ in range(GAUGE_SAMPLES)]


def _check_gauge(qt, cfg, ctx):
    alg = qt.alg
    sol = _solution(qt, cfg, ctx)
    g = sol.g
    through = cfg.degree - 1
    target = rho_am(qt, cfg.degree).value
    elems = _gauge_elements(qt, cfg, g.prec)
    ham, stable, equiv, anti = [], [], [], []
    for k, alpha in enumerate(elems):
        ham.append(ham_residual(alg, alpha.g))
        stable.append(twisted_r0(qt, act_on_solution(alg, alpha, g)) - target)
        if qt.factorizable:
            equiv.append(equivariance_check(qt, alpha, g))
        beta = elems[(k + 1) % len(elems)].g
        lhs = ad_star_diffeo(alg, star_product(alg, alpha.g, beta))
        rhs = substitute(ad_star_diffeo(alg, beta), ad_star_diffeo(alg, alpha.g))
        anti.append(lhs - rhs)
    out = [
        _record("gauge.ham", through, ham),
        _record("gauge.stability", through, stable),
        _record("gauge.anti_homomorphism", through, anti),
    ]
    if qt.factorizable:
        out.append(_record("gauge.equivariance", through, equiv))
    else:
        out.append(_unsupported("gauge.equivariance", through, NotFactorizable("t is degenerate")))
    return out


def _check_fm(qt, cfg, ctx):
    g = _solution(qt, cfg, ctx).g
    through = cfg.degree - 1
    out = []
    for nu in cfg.nu_values:
        res, lhs, rhs = fm_identity_check(qt, g, nu, cfg.degree)
        out.append(_record(f"fm[nu={nu}]", through, [res],
                           lhs_zero=lhs.is_zero(through), rhs_zero=rhs.is_zero(through)))
    return out


def _check_lemma1(qt, cfg, ctx):
    sol = _solution(qt, cfg, ctx)
    if not sol.states:
        sol = ctx["solution"] = solve_g(qt, cfg.degree, cfg.max_degree, keep_states=True)
    rho_inv = rho_am(qt, cfg.degree).value
    residuals, degrees = [], []
    for st in sol.states:
        res, n = lemma1_residual(qt, st.rho, rho_inv)
        residuals.append(res.truncate(min(n, res.prec)))
        degrees.append(n)
    # each residual is already cut at the degree through which it must vanish
    return [_record("lemma1", cfg.degree - 1, residuals, state_degrees=degrees)]


_RUNNERS = {
    "cyb": _check_cyb,
    "cdybe": _check_cdybe,
    "solve": _check_solve,
    "pushforward": _check_pushforward,
    "gauge": _check_gauge,
    "fm": _check_fm,
    "lemma1": _check_lemma1,
}


def _unsupported(name, degree, exc) -> dict:
    status = "unsupported" if isinstance(exc, NotFactorizable) else "error"
    return {"check": name, "degree": degree, "status": status, "residual_zero": False,
            "witness": None, "error": f"{type(exc).__name__}: {exc}"}


def run(config: RunConfig) -> Certificate:
    config.validate()
    try:
        qt = load_algebra(config.algebra)
    except EngineError as exc:
        raise UsageError(str(exc)) from None
    ctx: dict = {}
    results, timings = [], {}
    for name in sorted(set(config.checks)):
        solved_before = "solve_time" in ctx
        start = time.perf_counter()
        try:
            results.extend(_RUNNERS[name](qt, config, ctx))
        except EngineError as exc:
            log.info("check %s raised %s", name, exc)
            results.append(_unsupported(name, config.degree, exc))
        elapsed = time.perf_counter() - start
        if not solved_before and "solve_time" in ctx:
            # the shared solve is reported on its own line
            elapsed -= ctx["solve_time"]
            timings["solve_g"] = ctx["solve_time"]
        timings[name] = elapsed
    return Certificate(config.echo(), results, timings if config.timings else {})


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="poisson-iso", description=__doc__)
    p.add_argument("--algebra", default="sl2", help="builtin (sl2, gl2, abelian1, abelian2) or JSON file")
    p.add_argument("--degree", type=int, default=4, help="truncation degree N")
    p.add_argument("--nu", action="append", default=None, help="rational parameter for the fm check")
    p.add_argument("--checks", default=",".join(CHECKS), help="comma-separated subset of " + ",".join(CHECKS))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", choices=("text", "json"), default="text")
    p.add_argument("--trace", action="store_true", help="include the per-degree solver trace")
    p.add_argument("--timings", action="store_true", help="record wall-clock time per check")
    p.add_argument("--max-degree", type=int, default=DEFAULT_MAX_DEGREE)
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def config_from_args(argv=None) -> RunConfig:
    args = _parser().parse_args(argv)
    try:
        nus = [parse_rational(v) for v in (args.nu or ["1/2"])]
    except ValueError as exc:
        raise UsageError(f"--nu: {exc}") from None
    checks = tuple(c.strip() for c in args.checks.split(",") if c.strip())
    if args.verbose:
        logging.basicConfig(level=logging.DEBUG)
    return RunConfig(args.algebra, args.degree, nus, checks, args.seed, args.output,
                     args.trace, args.timings, args.max_degree)


def main(argv=None) -> int:
    try:
        cfg = config_from_args(argv)
        cert = run(cfg)
    except SystemExit as exc:
        return 2 if exc.code else 0
    except UsageError as exc:
        print(f"poisson-iso: error: {exc}", file=sys.stderr)
        return 2
    print(cert.to_json() if cfg.output == "json" else cert.to_text())
    return 0 if cert.passed else 1


if __name__ == "__main__":
    sys.exit(main())
