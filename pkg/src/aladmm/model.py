"""Problem model: composite blocks built from prox/gradient oracles, constraint data,
Lagrangian and feasibility evaluation, saddle-point references.

The solvers only ever touch the nonsmooth parts through their proximal maps and
the smooth parts through their gradients, so both are stored as plain callables.
User-supplied oracles must be pure functions (no hidden mutable state); impure
oracles void every certificate this package computes.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .linalg import (
    as_matrix,
    as_vector,
    matrix_from_csv,
    matrix_to_csv,
    spectral_norm_sq,
    vector_from_csv,
    vector_to_csv,
)

__all__ = [
    "ModelError",
    "SmoothTerm",
    "ProxTerm",
    "CompositeBlock",
    "ProblemInstance",
    "SaddleReference",
    "SaddleReport",
    "zero_smooth",
    "least_squares_smooth",
    "zero_prox",
    "l1_prox",
    "squared_prox",
    "elastic_net_prox",
    "box_prox",
    "lagrangian",
    "feasibility",
    "check_saddle",
    "validate_smooth_term",
    "validate_prox_term",
    "instance_to_json",
    "instance_from_json",
]


class ModelError(ValueError):
    """Inconsistent problem data (dimension mismatch, bad parameters)."""


@dataclass(frozen=True)
class SmoothTerm:
    """Convex smooth term given by value/gradient oracles.

    ``lipschitz`` is the gradient Lipschitz constant the caller vouches for;
    it feeds the step-size conditions, and an understated constant voids the
    rate certificates.
    """

    value: callable
    gradient: callable
    lipschitz: float
    kind: str = "custom"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.lipschitz < 0:
            raise ModelError("lipschitz must be >= 0")


@dataclass(frozen=True)
class ProxTerm:
    """Closed convex (possibly nonsmooth) term given by value/prox oracles.

    ``prox(s, y)`` must return the minimizer of ``value(x) + ||x-y||^2/(2s)``.
    ``separable`` marks componentwise terms whose ``prox`` also accepts a
    per-coordinate array of steps (all catalog terms do); exact subproblem
    solvers use this for diagonal quadratic structures.
    """

    value: callable
    prox: callable
    strong_convexity: float = 0.0
    kind: str = "custom"
    params: dict = field(default_factory=dict)
    separable: bool = False

    def __post_init__(self):
        if self.strong_convexity < 0:
            raise ModelError("strong_convexity must be >= 0")


# --- catalog terms ---------------------------------------------------------


def zero_smooth():
    return SmoothTerm(
        value=lambda x: 0.0,
        gradient=lambda x: np.zeros_like(x),
        lipschitz=0.0,
        kind="zero",
    )


def least_squares_smooth(C, d):
    """0.5*||C x - d||^2 with gradient C^T(C x - d)."""
    C = as_matrix(C, "C")
    d = as_vector(d, "d")
    if C.shape[0] != d.size:
        raise ModelError(f"C has {C.shape[0]} rows but d has length {d.size}")
    L = spectral_norm_sq(C) if C.size else 0.0

    def value(x):
        r = C @ x - d
        return 0.5 * float(r @ r)

    return SmoothTerm(
        value=value,
        gradient=lambda x: C.T @ (C @ x - d),
        lipschitz=L,
        kind="least_squares",
        params={"C": C, "d": d},
    )


def zero_prox():
    return ProxTerm(
        value=lambda x: 0.0,
        prox=lambda s, y: np.asarray(y, dtype=float).copy(),
        strong_convexity=0.0,
        kind="zero",
        separable=True,
    )


def _soft_threshold(y, thr):
    return np.sign(y) * np.maximum(np.abs(y) - thr, 0.0)


def l1_prox(tau):
    """tau*||x||_1 with the soft-threshold prox."""
    if tau < 0:
        raise ModelError("tau must be >= 0")
    return ProxTerm(
        value=lambda x: tau * float(np.sum(np.abs(x))),
        prox=lambda s, y: _soft_threshold(np.asarray(y, dtype=float), s * tau),
        strong_convexity=0.0,
        kind="l1",
        params={"tau": float(tau)},
        separable=True,
    )


def squared_prox(mu):
    """(mu/2)*||x||^2; prox scales by 1/(1+s*mu)."""
    if mu < 0:
        raise ModelError("mu must be >= 0")
    return ProxTerm(
        value=lambda x: 0.5 * mu * float(x @ x),
        prox=lambda s, y: np.asarray(y, dtype=float) / (1.0 + s * mu),
        strong_convexity=float(mu),
        kind="squared",
        params={"mu": float(mu)},
        separable=True,
    )


def elastic_net_prox(tau, mu):
    """tau*||x||_1 + (mu/2)*||x||^2; prox soft-thresholds then scales."""
    if tau < 0 or mu < 0:
        raise ModelError("tau and mu must be >= 0")
    return ProxTerm(
        value=lambda x: tau * float(np.sum(np.abs(x))) + 0.5 * mu * float(x @ x),
        prox=lambda s, y: _soft_threshold(np.asarray(y, dtype=float), s * tau) / (1.0 + s * mu),
        strong_convexity=float(mu),
        kind="elastic_net",
        params={"tau": float(tau), "mu": float(mu)},
        separable=True,
    )


def box_prox(lo, hi):
    """Indicator of the box [lo, hi]^n; prox is the clip."""
    lo, hi = float(lo), float(hi)
    if lo > hi:
        raise ModelError("box requires lo <= hi")

    def value(x):
        return 0.0 if np.all((x >= lo - 1e-12) & (x <= hi + 1e-12)) else np.inf

    return ProxTerm(
        value=value,
        prox=lambda s, y: np.clip(np.asarray(y, dtype=float), lo, hi),
        strong_convexity=0.0,
        kind="box",
        params={"lo": lo, "hi": hi},
        separable=True,
    )


# --- composite blocks and instances ---------------------------------------


@dataclass(frozen=True)
class CompositeBlock:
    """One block of the objective: prox-friendly part + smooth part."""

    prox_term: ProxTerm
    smooth_term: SmoothTerm

    def value(self, x):
        return float(self.prox_term.value(x)) + float(self.smooth_term.value(x))


def composite_block(prox_term=None, smooth_term=None):
    return CompositeBlock(
        prox_term=prox_term if prox_term is not None else zero_prox(),
        smooth_term=smooth_term if smooth_term is not None else zero_smooth(),
    )


@dataclass(frozen=True)
class ProblemInstance:
    """min f(x) + g(y)  s.t.  A x + B y = b, with composite f and g.

    The y block's prox part carries the strong-convexity modulus the
    rate-certified solvers rely on; instances without it still run, but the
    engine flags the certificates as non-binding.
    """

    x_block: CompositeBlock
    y_block: CompositeBlock
    A: np.ndarray
    B: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "A", as_matrix(self.A, "A"))
        object.__setattr__(self, "B", as_matrix(self.B, "B"))
        object.__setattr__(self, "b", as_vector(self.b, "b"))
        if self.A.shape[0] != self.b.size or self.B.shape[0] != self.b.size:
            raise ModelError(
                f"A has {self.A.shape[0]} rows, B has {self.B.shape[0]}, "
                f"but b has length {self.b.size}"
            )

    @property
    def m(self):
        return self.A.shape[1]

    @property
    def n(self):
        return self.B.shape[1]

    @property
    def p(self):
        return self.b.size

    @property
    def mu_g(self):
        return self.y_block.prox_term.strong_convexity

    def f(self, x):
        return self.x_block.value(x)

    def g(self, y):
        return self.y_block.value(y)

    def objective(self, x, y):
        return self.f(x) + self.g(y)

    def residual(self, x, y):
        return self.A @ x + self.B @ y - self.b

    def check_dims(self, x, y, lam=None):
        if x.shape != (self.m,) or y.shape != (self.n,):
            raise ModelError(
                f"point dims {x.shape}/{y.shape} do not match blocks ({self.m},)/({self.n},)"
            )
        if lam is not None and lam.shape != (self.p,):
            raise ModelError(f"multiplier dim {lam.shape} does not match ({self.p},)")


@dataclass(frozen=True)
class SaddleReference:
    """Saddle point (x*, y*, lambda*) used for gaps and certificate constants."""

    x_star: np.ndarray
    y_star: np.ndarray
    lambda_star: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x_star", as_vector(self.x_star, "x_star"))
        object.__setattr__(self, "y_star", as_vector(self.y_star, "y_star"))
        object.__setattr__(self, "lambda_star", as_vector(self.lambda_star, "lambda_star"))


def lagrangian(inst, x, y, lam):
    """f(x) + g(y) + <lam, A x + B y - b>."""
    x, y, lam = as_vector(x, "x"), as_vector(y, "y"), as_vector(lam, "lam")
    inst.check_dims(x, y, lam)
    return inst.objective(x, y) + float(lam @ inst.residual(x, y))


def feasibility(inst, x, y):
    """Euclidean norm of the constraint residual ||A x + B y - b||."""
    x, y = as_vector(x, "x"), as_vector(y, "y")
    inst.check_dims(x, y)
    return float(np.linalg.norm(inst.residual(x, y)))


@dataclass
class SaddleReport:
    samples: int
    tol: float
    feasibility_residual: float
    violations: list

    @property
    def ok(self):
        return not self.violations and self.feasibility_residual <= self.tol


def check_saddle(inst, ref, samples=100, seed=0, tol=1e-8, scale=1.0):
    """Probe both saddle inequalities at random points around the reference.

    Draws ``samples`` Gaussian perturbations of (x*, y*, lambda*) and records
    every violation of
    ``L(x*, y*, lam) <= L(x*, y*, lam*) <= L(x, y, lam*)`` beyond ``tol``,
    along with the reference's own feasibility residual.
    """
    inst.check_dims(ref.x_star, ref.y_star, ref.lambda_star)
    rng = np.random.default_rng(seed)
    mid = lagrangian(inst, ref.x_star, ref.y_star, ref.lambda_star)
    violations = []
    for i in range(samples):
        lam = ref.lambda_star + scale * rng.standard_normal(inst.p)
        lower = lagrangian(inst, ref.x_star, ref.y_star, lam)
        if lower > mid + tol:
            violations.append({"index": i, "side": "lower", "amount": lower - mid})
        x = ref.x_star + scale * rng.standard_normal(inst.m)
        y = ref.y_star + scale * rng.standard_normal(inst.n)
        upper = lagrangian(inst, x, y, ref.lambda_star)
        if upper < mid - tol:
            violations.append({"index": i, "side": "upper", "amount": mid - upper})
    return SaddleReport(
        samples=samples,
        tol=tol,
        feasibility_residual=feasibility(inst, ref.x_star, ref.y_star),
        violations=violations,
    )


# --- sampled-inequality validators (shared by tests and the verify suite) --


def validate_smooth_term(term, dim, samples=1000, seed=0, scale=2.0, tol=1e-9):
    """Check descent and convexity inequalities of a smooth term at random pairs.

    Returns a list of violation descriptions (empty when the term is
    consistent with its declared Lipschitz constant at every sampled pair).
    """
    rng = np.random.default_rng(seed)
    bad = []
    for i in range(samples):
        x1 = scale * rng.standard_normal(dim)
        x2 = scale * rng.standard_normal(dim)
        v1, v2 = term.value(x1), term.value(x2)
        g1 = term.gradient(x1)
        lin = v1 + float(g1 @ (x2 - x1))
        quad = lin + 0.5 * term.lipschitz * float(np.sum((x2 - x1) ** 2))
        if v2 > quad + tol * (1.0 + abs(quad)):
            bad.append({"index": i, "kind": "descent", "excess": v2 - quad})
        if v2 < lin - tol * (1.0 + abs(lin)):
            bad.append({"index": i, "kind": "convexity", "deficit": lin - v2})
    return bad


def validate_prox_term(term, dim, samples=200, seed=0, scale=2.0, tol=1e-9):
    """Check prox optimality, firm nonexpansiveness, and strong convexity.

    The prox optimality residual (y - prox(s, y))/s must be a subgradient of
    the term at prox(s, y); that and the strong-convexity lower bound are
    verified through the value oracle only, so the check works for any term.
    """
    rng = np.random.default_rng(seed)
    mu = term.strong_convexity
    bad = []
    for i in range(samples):
        s = float(10.0 ** rng.uniform(-2, 1))
        a = scale * rng.standard_normal(dim)
        c = scale * rng.standard_normal(dim)
        pa, pc = term.prox(s, a), term.prox(s, c)
        if np.linalg.norm(pa - pc) > np.linalg.norm(a - c) + tol:
            bad.append({"index": i, "kind": "nonexpansive"})
        w = (a - pa) / s  # subgradient of the term at pa, by prox optimality
        z = pa + scale * rng.standard_normal(dim)
        gap = term.value(z) - term.value(pa) - float(w @ (z - pa)) - 0.5 * mu * float(
            np.sum((z - pa) ** 2)
        )
        if np.isfinite(term.value(z)) and gap < -tol * (1.0 + abs(term.value(z))):
            bad.append({"index": i, "kind": "subgradient", "deficit": -gap})
    return bad


# --- serialization ----------------------------------------------------------


def _smooth_to_doc(term):
    if term.kind == "zero":
        return {"kind": "zero"}
    if term.kind == "least_squares":
        return {
            "kind": "least_squares",
            "C": matrix_to_csv(term.params["C"]),
            "d": vector_to_csv(term.params["d"]),
        }
    raise ModelError(f"smooth term kind {term.kind!r} is code-only, not serializable")


def _smooth_from_doc(doc):
    if doc["kind"] == "zero":
        return zero_smooth()
    if doc["kind"] == "least_squares":
        return least_squares_smooth(matrix_from_csv(doc["C"]), vector_from_csv(doc["d"]))
    raise ModelError(f"unknown smooth term kind {doc['kind']!r}")


def _prox_to_doc(term):
    if term.kind == "zero":
        return {"kind": "zero"}
    if term.kind in ("l1", "squared", "elastic_net", "box"):
        return {"kind": term.kind, **term.params}
    raise ModelError(f"prox term kind {term.kind!r} is code-only, not serializable")


def _prox_from_doc(doc):
    kind = doc["kind"]
    if kind == "zero":
        return zero_prox()
    if kind == "l1":
        return l1_prox(doc["tau"])
    if kind == "squared":
        return squared_prox(doc["mu"])
    if kind == "elastic_net":
        return elastic_net_prox(doc["tau"], doc["mu"])
    if kind == "box":
        return box_prox(doc["lo"], doc["hi"])
    raise ModelError(f"unknown prox term kind {kind!r}")


def instance_to_json(inst, reference=None):
    """Serialize an instance (catalog terms only) to a JSON text document."""
    doc = {
        "m": inst.m,
        "n": inst.n,
        "p": inst.p,
        "A": matrix_to_csv(inst.A) if inst.A.size else "",
        "B": matrix_to_csv(inst.B) if inst.B.size else "",
        "b": vector_to_csv(inst.b) if inst.b.size else "",
        "x_block": {
            "prox": _prox_to_doc(inst.x_block.prox_term),
            "smooth": _smooth_to_doc(inst.x_block.smooth_term),
        },
        "y_block": {
            "prox": _prox_to_doc(inst.y_block.prox_term),
            "smooth": _smooth_to_doc(inst.y_block.smooth_term),
        },
    }
    if reference is not None:
        doc["reference"] = {
            "x_star": vector_to_csv(reference.x_star) if reference.x_star.size else "",
            "y_star": vector_to_csv(reference.y_star) if reference.y_star.size else "",
            "lambda_star": vector_to_csv(reference.lambda_star),
        }
    return json.dumps(doc, indent=2)


def _matrix_from_doc(text, rows, cols):
    if rows == 0 or cols == 0:
        return np.zeros((rows, cols))
    M = matrix_from_csv(text)
    if M.shape != (rows, cols):
        raise ModelError(f"matrix shape {M.shape} does not match declared ({rows}, {cols})")
    return M


def instance_from_json(text):
    """Parse :func:`instance_to_json` output; returns (instance, reference or None)."""
    doc = json.loads(text)
    m, n, p = int(doc["m"]), int(doc["n"]), int(doc["p"])
    inst = ProblemInstance(
        x_block=CompositeBlock(
            prox_term=_prox_from_doc(doc["x_block"]["prox"]),
            smooth_term=_smooth_from_doc(doc["x_block"]["smooth"]),
        ),
        y_block=CompositeBlock(
            prox_term=_prox_from_doc(doc["y_block"]["prox"]),
            smooth_term=_smooth_from_doc(doc["y_block"]["smooth"]),
        ),
        A=_matrix_from_doc(doc["A"], p, m),
        B=_matrix_from_doc(doc["B"], p, n),
        b=vector_from_csv(doc["b"]) if p else np.zeros(0),
    )
    ref = None
    if "reference" in doc:
        r = doc["reference"]
        ref = SaddleReference(
            x_star=vector_from_csv(r["x_star"]) if m else np.zeros(0),
            y_star=vector_from_csv(r["y_star"]) if n else np.zeros(0),
            lambda_star=vector_from_csv(r["lambda_star"]),
        )
    return inst, ref
