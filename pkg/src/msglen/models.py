"""Statistical models as first-class, transformable values.

Models come in two stages.  An unparameterised model (a *family*) holds
the problem-defining parameters, which are given rather than estimated:
the bounds of a discrete space, the component families of a product.  It
can be called with statistical parameters to make a parameterised model,
and it can hand out an estimator that fits those parameters to data.  A
parameterised model answers ``pr``/``nl_pr`` for data from its space and
can draw random data.

Both stages can be transformed by an invertible function of the matching
kind, and the transform preserves the capability of what it wraps: a
transformed continuous family is still a continuous family with a pdf.
The density rules are

* scalar:  pdf_mf(x) = pdf_m(f(x)) * |f'(x)|
* vector:  pdf_mf(v) = pdf_m(f(v)) * |det J_f(v)|
* discrete: pr_mf(d) = pr_m(f(d))

and a transformed model draws random data by drawing from the base model
and applying f's inverse.  All density arithmetic is carried out on
negative logs (nits); plain probabilities are exponentiated views.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError, ParameterError, TransformError
from .functions import Cts2Cts, CtsD2CtsD, DiscreteBijection, Interval
from .values import CtsDatum, DiscreteDatum, VecDatum

__all__ = [
    "DEFAULT_SAMPLE_AOM",
    "UPModel",
    "Model",
    "DiscreteFamily",
    "ContinuousFamily",
    "VectorFamily",
    "DiscreteModel",
    "ContinuousModel",
    "VectorModel",
    "NormalModel",
    "BoundedUniformModel",
    "MultiStateModel",
    "IndependentProductModel",
    "normal",
    "bounded_uniform",
    "multistate",
    "independent_rd",
]

HALF_LN_TWO_PI = 0.5 * math.log(2.0 * math.pi)

# AoM attached to random continuous draws; samples are synthetic, so their
# measurement accuracy is an annotation rather than a propagated quantity.
DEFAULT_SAMPLE_AOM = 1e-6


def _checked_inverse(f):
    try:
        return f.inverse()
    except Exception as e:
        raise TransformError(f"transform needs an invertible function: {e}") from e


# ---------------------------------------------------------------------------
# Unparameterised models (families)
# ---------------------------------------------------------------------------


class UPModel:
    """A model family: problem-defining parameters fixed, statistical free."""

    name = "?"

    def parameterise(self, sp) -> "Model":
        raise NotImplementedError

    def __call__(self, sp) -> "Model":
        return self.parameterise(sp)

    def estimator(self, ps=None):
        raise NotImplementedError

    def transform(self, f) -> "UPModel":
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.name}>"


class DiscreteFamily(UPModel):
    """Families over the bounded integer space [lo, hi]."""

    def __init__(self, lo: int, hi: int):
        if lo > hi:
            raise ParameterError(f"empty data space [{lo}, {hi}]")
        self.lo = int(lo)
        self.hi = int(hi)

    @property
    def size(self) -> int:
        return self.hi - self.lo + 1

    def transform(self, f) -> "UPModel":
        if not isinstance(f, DiscreteBijection):
            raise TransformError(
                f"a discrete family needs a DiscreteBijection, got {type(f).__name__}"
            )
        if (f.lo, f.hi) != (self.lo, self.hi):
            raise TransformError(
                f"bijection on [{f.lo}, {f.hi}] does not match data space "
                f"[{self.lo}, {self.hi}]"
            )
        _checked_inverse(f)
        return TransformedDiscreteFamily(self, f)


class ContinuousFamily(UPModel):
    """Families of scalar continuous data, answering a pdf once parameterised."""

    def transform(self, f) -> "UPModel":
        if not isinstance(f, Cts2Cts):
            raise TransformError(
                f"a continuous family needs a Cts2Cts, got {type(f).__name__}"
            )
        _checked_inverse(f)
        return TransformedContinuousFamily(self, f)


class VectorFamily(UPModel):
    """Families of R^D data."""

    dim = 0

    def transform(self, f) -> "UPModel":
        if not isinstance(f, CtsD2CtsD):
            raise TransformError(
                f"a vector family needs a CtsD2CtsD, got {type(f).__name__}"
            )
        if f.dim != self.dim:
            raise TransformError(f"{f.name} maps R^{f.dim}, family is R^{self.dim}")
        _checked_inverse(f)
        return TransformedVectorFamily(self, f)


class NormalFamily(ContinuousFamily):
    """The Gaussian family; its problem-defining parameters are trivial."""

    name = "normal"

    def parameterise(self, sp) -> "NormalModel":
        try:
            mu, sigma = sp
        except (TypeError, ValueError):
            raise ParameterError(f"normal takes (mean, sd), got {sp!r}") from None
        return NormalModel(float(mu), float(sigma))

    def estimator(self, ps=None):
        from .estimation import NormalEstimator

        return NormalEstimator(self, ps)


class BoundedUniformFamily(DiscreteFamily):
    """Uniform over [lo, hi]; its statistical parameters are trivial."""

    def __init__(self, lo: int, hi: int):
        super().__init__(lo, hi)
        self.name = f"uniform:{self.lo}:{self.hi}"

    def parameterise(self, sp=()) -> "BoundedUniformModel":
        if sp not in ((), None):
            raise ParameterError("the bounded uniform has no statistical parameters")
        return BoundedUniformModel(self.lo, self.hi)

    def estimator(self, ps=None):
        from .estimation import BoundedUniformEstimator

        return BoundedUniformEstimator(self, ps)


class MultiStateFamily(DiscreteFamily):
    """One probability per state of [lo, hi]."""

    def __init__(self, lo: int, hi: int):
        super().__init__(lo, hi)
        self.name = f"multistate:{self.lo}:{self.hi}"

    def parameterise(self, sp) -> "MultiStateModel":
        return MultiStateModel(self.lo, self.hi, sp)

    def estimator(self, ps=None):
        from .estimation import MultiStateEstimator

        return MultiStateEstimator(self, ps)


class IndependentProductFamily(VectorFamily):
    """Independent continuous components; the pdf is the product of the parts."""

    def __init__(self, components):
        components = tuple(components)
        if not components:
            raise ParameterError("a product family needs at least one component")
        for c in components:
            if not isinstance(c, ContinuousFamily):
                raise ParameterError(
                    f"product components must be continuous families, got {c!r}"
                )
        self.components = components
        self.dim = len(components)
        names = {c.name for c in components}
        if names == {"normal"}:
            self.name = f"rd:normal^{self.dim}"
        else:
            self.name = f"rd:({','.join(c.name for c in components)})"

    def parameterise(self, sp) -> "IndependentProductModel":
        sp = tuple(sp)
        if len(sp) != self.dim:
            raise ParameterError(
                f"{self.name} takes {self.dim} parameter groups, got {len(sp)}"
            )
        parts = tuple(c.parameterise(s) for c, s in zip(self.components, sp))
        return IndependentProductModel(parts, name=self.name)

    def estimator(self, ps=None):
        from .estimation import IndependentProductEstimator

        return IndependentProductEstimator(self, ps)


# ---------------------------------------------------------------------------
# Parameterised models
# ---------------------------------------------------------------------------


class Model:
    """A distribution: answers pr/nl_pr and draws random data.

    ``msg1`` is the cost, in nits, of stating the model's statistical
    parameters; it is zero when they were given rather than estimated.
    """

    name = "?"

    def __init__(self, msg1: float = 0.0):
        self.msg1 = float(msg1)

    def nl_pr(self, d) -> float:
        """Negative log probability of a datum, in nits."""
        raise NotImplementedError

    def pr(self, d) -> float:
        return math.exp(-self.nl_pr(d))

    def random(self, rng, aom: float = DEFAULT_SAMPLE_AOM):
        raise NotImplementedError

    def transform(self, f) -> "Model":
        raise NotImplementedError

    def params(self) -> dict:
        """Statistical parameters, flattened for reporting."""
        return {}

    def __repr__(self) -> str:
        ps = ", ".join(f"{k}={v:g}" for k, v in self.params().items())
        return f"<{type(self).__name__} {self.name}({ps})>"


class DiscreteModel(Model):
    def __init__(self, lo: int, hi: int, msg1: float = 0.0):
        super().__init__(msg1)
        self.lo = int(lo)
        self.hi = int(hi)

    @property
    def size(self) -> int:
        return self.hi - self.lo + 1

    def space(self) -> range:
        return range(self.lo, self.hi + 1)

    def nl_pr_value(self, k: int) -> float:
        raise NotImplementedError

    def pr_value(self, k: int) -> float:
        nl = self.nl_pr_value(k)
        return 0.0 if nl == math.inf else math.exp(-nl)

    def nl_pr(self, d: DiscreteDatum) -> float:
        if not self.lo <= d.value <= self.hi:
            raise DomainError(f"{d.value} is outside the data space [{self.lo}, {self.hi}]")
        return self.nl_pr_value(d.value)

    def transform(self, f) -> "Model":
        if not isinstance(f, DiscreteBijection):
            raise TransformError(
                f"a discrete model needs a DiscreteBijection, got {type(f).__name__}"
            )
        if (f.lo, f.hi) != (self.lo, self.hi):
            raise TransformError("bijection bounds do not match the data space")
        _checked_inverse(f)
        return TransformedDiscreteModel(self, f)


class ContinuousModel(Model):
    """A scalar continuous model, defined by its negative log pdf."""

    support: Interval = Interval()

    def nl_pdf(self, x: float) -> float:
        raise NotImplementedError

    def pdf(self, x: float) -> float:
        if not self.support.contains(x):
            raise DomainError(f"{x!r} is outside the support of {self.name}")
        return math.exp(-self.nl_pdf(x))

    def nl_pr(self, d: CtsDatum) -> float:
        # pr(x +- aom/2) ~= aom * pdf(x) for small AoM, so the cost is
        # nl_pdf(x) - ln(aom).
        if not self.support.contains(d.x):
            raise DomainError(f"{d.x!r} is outside the support of {self.name}")
        return self.nl_pdf(d.x) - math.log(d.aom)

    def random_x(self, rng) -> float:
        raise NotImplementedError

    def random(self, rng, aom: float = DEFAULT_SAMPLE_AOM) -> CtsDatum:
        return CtsDatum(self.random_x(rng), aom)

    def transform(self, f) -> "Model":
        if not isinstance(f, Cts2Cts):
            raise TransformError(
                f"a continuous model needs a Cts2Cts, got {type(f).__name__}"
            )
        _checked_inverse(f)
        return TransformedContinuousModel(self, f)


class VectorModel(Model):
    dim = 0

    def nl_pdf(self, v) -> float:
        raise NotImplementedError

    def contains(self, v) -> bool:
        return True

    def pdf(self, v) -> float:
        v = np.asarray(v, dtype=float)
        if not self.contains(v):
            raise DomainError(f"{tuple(v)} is outside the support of {self.name}")
        return math.exp(-self.nl_pdf(v))

    def nl_pr(self, d: VecDatum) -> float:
        if d.dim != self.dim:
            raise DomainError(f"{self.name} models R^{self.dim}, got a {d.dim}-vector")
        v = np.asarray(d.components, dtype=float)
        if not self.contains(v):
            raise DomainError(f"{d.components} is outside the support of {self.name}")
        return self.nl_pdf(v) - math.fsum(math.log(a) for a in d.aoms)

    def random_v(self, rng) -> np.ndarray:
        raise NotImplementedError

    def random(self, rng, aom: float = DEFAULT_SAMPLE_AOM) -> VecDatum:
        v = self.random_v(rng)
        return VecDatum(tuple(float(x) for x in v), (float(aom),) * self.dim)

    def transform(self, f) -> "Model":
        if not isinstance(f, CtsD2CtsD):
            raise TransformError(
                f"a vector model needs a CtsD2CtsD, got {type(f).__name__}"
            )
        if f.dim != self.dim:
            raise TransformError(f"{f.name} maps R^{f.dim}, model is R^{self.dim}")
        _checked_inverse(f)
        return TransformedVectorModel(self, f)


class NormalModel(ContinuousModel):
    name = "normal"

    def __init__(self, mean: float, sd: float, msg1: float = 0.0):
        super().__init__(msg1)
        if not (math.isfinite(mean) and math.isfinite(sd)) or sd <= 0.0:
            raise ParameterError(f"normal needs finite mean and sd > 0, got ({mean}, {sd})")
        self.mean = mean
        self.sd = sd

    def nl_pdf(self, x: float) -> float:
        z = (x - self.mean) / self.sd
        return HALF_LN_TWO_PI + math.log(self.sd) + 0.5 * z * z

    def random_x(self, rng) -> float:
        return float(rng.normal(self.mean, self.sd))

    def params(self) -> dict:
        return {"mean": self.mean, "sd": self.sd}


class BoundedUniformModel(DiscreteModel):
    def __init__(self, lo: int, hi: int, msg1: float = 0.0):
        super().__init__(lo, hi, msg1)
        self.name = f"uniform:{self.lo}:{self.hi}"
        self._nl = math.log(self.size)

    def nl_pr_value(self, k: int) -> float:
        return self._nl

    def random(self, rng, aom: float = DEFAULT_SAMPLE_AOM) -> DiscreteDatum:
        return DiscreteDatum(int(rng.integers(self.lo, self.hi + 1)))


class MultiStateModel(DiscreteModel):
    def __init__(self, lo: int, hi: int, probs, msg1: float = 0.0):
        super().__init__(lo, hi, msg1)
        self.name = f"multistate:{self.lo}:{self.hi}"
        try:
            probs = tuple(float(p) for p in probs)
        except TypeError:
            raise ParameterError(f"multistate takes a probability per state, got {probs!r}")
        if len(probs) != self.size:
            raise ParameterError(
                f"need {self.size} probabilities for [{self.lo}, {self.hi}], got {len(probs)}"
            )
        if any(p < 0.0 or not math.isfinite(p) for p in probs):
            raise ParameterError("probabilities must be finite and non-negative")
        total = math.fsum(probs)
        if abs(total - 1.0) > 1e-9:
            raise ParameterError(f"probabilities sum to {total!r}, not 1")
        self.probs = probs
        self._cum = np.cumsum(probs)

    def nl_pr_value(self, k: int) -> float:
        p = self.probs[k - self.lo]
        return math.inf if p == 0.0 else -math.log(p)

    def random(self, rng, aom: float = DEFAULT_SAMPLE_AOM) -> DiscreteDatum:
        u = float(rng.random())
        return DiscreteDatum(self.lo + int(np.searchsorted(self._cum, u)))

    def params(self) -> dict:
        return {f"p{k}": p for k, p in zip(self.space(), self.probs)}


class IndependentProductModel(VectorModel):
    def __init__(self, components, msg1: float = 0.0, name: str | None = None):
        super().__init__(msg1)
        self.components = tuple(components)
        self.dim = len(self.components)
        self.name = name or f"rd:({','.join(c.name for c in self.components)})"

    def contains(self, v) -> bool:
        return all(c.support.contains(float(x)) for c, x in zip(self.components, v))

    def nl_pdf(self, v) -> float:
        return math.fsum(c.nl_pdf(float(x)) for c, x in zip(self.components, v))

    def random_v(self, rng) -> np.ndarray:
        return np.array([c.random_x(rng) for c in self.components])

    def params(self) -> dict:
        out = {}
        for i, c in enumerate(self.components):
            for k, val in c.params().items():
                out[f"{i}.{k}"] = val
        return out


# ---------------------------------------------------------------------------
# Transform wrappers (capability preserving)
# ---------------------------------------------------------------------------


class _MappedSupport:
    """Support of a transformed continuous model: the preimage of the base
    support under f, inside f's domain."""

    __slots__ = ("f", "base_support")

    def __init__(self, f: Cts2Cts, base_support):
        self.f = f
        self.base_support = base_support

    def contains(self, x: float) -> bool:
        if not self.f.domain.contains(x):
            return False
        try:
            return self.base_support.contains(self.f.apply_x(x))
        except (OverflowError, ValueError):
            return False


class TransformedContinuousFamily(ContinuousFamily):
    def __init__(self, base: ContinuousFamily, f: Cts2Cts):
        self.base = base
        self.f = f
        self.name = f"{base.name}.transform({f.name})"

    def parameterise(self, sp) -> "Model":
        return self.base.parameterise(sp).transform(self.f)

    def estimator(self, ps=None):
        from .estimation import TransformedEstimator

        return TransformedEstimator(self, self.base.estimator(ps), self.f)


class TransformedVectorFamily(VectorFamily):
    def __init__(self, base: VectorFamily, f: CtsD2CtsD):
        self.base = base
        self.f = f
        self.dim = base.dim
        self.name = f"{base.name}.transform({f.name})"

    def parameterise(self, sp) -> "Model":
        return self.base.parameterise(sp).transform(self.f)

    def estimator(self, ps=None):
        from .estimation import TransformedEstimator

        return TransformedEstimator(self, self.base.estimator(ps), self.f)


class TransformedDiscreteFamily(DiscreteFamily):
    def __init__(self, base: DiscreteFamily, f: DiscreteBijection):
        super().__init__(base.lo, base.hi)
        self.base = base
        self.f = f
        self.name = f"{base.name}.transform({f.name})"

    def parameterise(self, sp) -> "Model":
        return self.base.parameterise(sp).transform(self.f)

    def estimator(self, ps=None):
        from .estimation import TransformedEstimator

        return TransformedEstimator(self, self.base.estimator(ps), self.f)


class TransformedContinuousModel(ContinuousModel):
    """pdf(x) = base.pdf(f(x)) * |f'(x)|; random draws map back through f's inverse."""

    def __init__(self, base: ContinuousModel, f: Cts2Cts):
        super().__init__(msg1=base.msg1)
        self.base = base
        self.f = f
        self._f_inv = _checked_inverse(f)
        self.name = f"{base.name}.transform({f.name})"
        self.support = _MappedSupport(f, base.support)

    def nl_pdf(self, x: float) -> float:
        if not self.f.domain.contains(x):
            raise DomainError(f"{x!r} is outside the domain of {self.f.name}")
        slope = self.f.d_dx(x)
        if slope == 0.0:
            raise DomainError(f"{self.f.name} has zero derivative at {x!r}")
        return self.base.nl_pdf(self.f.apply_x(x)) - math.log(abs(slope))

    def random_x(self, rng) -> float:
        return self._f_inv.apply_x(self.base.random_x(rng))

    def params(self) -> dict:
        return self.base.params()


class TransformedVectorModel(VectorModel):
    """pdf(v) = base.pdf(f(v)) * |det J_f(v)|."""

    def __init__(self, base: VectorModel, f: CtsD2CtsD):
        super().__init__(msg1=base.msg1)
        self.base = base
        self.f = f
        self._f_inv = _checked_inverse(f)
        self.dim = base.dim
        self.name = f"{base.name}.transform({f.name})"

    def contains(self, v) -> bool:
        if not self.f.contains(v):
            return False
        return self.base.contains(self.f.apply_v(v))

    def nl_pdf(self, v) -> float:
        if not self.f.contains(v):
            raise DomainError(f"{tuple(v)} is outside the domain of {self.f.name}")
        return self.base.nl_pdf(self.f.apply_v(v)) + self.f.nl_jacobian_det(v)

    def random_v(self, rng) -> np.ndarray:
        return self._f_inv.apply_v(self.base.random_v(rng))

    def params(self) -> dict:
        return self.base.params()


class TransformedDiscreteModel(DiscreteModel):
    """pr(d) = base.pr(f(d)), exactly."""

    def __init__(self, base: DiscreteModel, f: DiscreteBijection):
        super().__init__(base.lo, base.hi, msg1=base.msg1)
        self.base = base
        self.f = f
        self._f_inv = _checked_inverse(f)
        self.name = f"{base.name}.transform({f.name})"

    def nl_pr_value(self, k: int) -> float:
        return self.base.nl_pr_value(self.f.apply_i(k))

    def random(self, rng, aom: float = DEFAULT_SAMPLE_AOM) -> DiscreteDatum:
        return self._f_inv.apply(self.base.random(rng))

    def params(self) -> dict:
        return self.base.params()


# ---------------------------------------------------------------------------
# Library families
# ---------------------------------------------------------------------------

normal = NormalFamily()


def bounded_uniform(lo: int, hi: int) -> BoundedUniformFamily:
    return BoundedUniformFamily(lo, hi)


def multistate(lo: int, hi: int) -> MultiStateFamily:
    return MultiStateFamily(lo, hi)


def independent_rd(components) -> IndependentProductFamily:
    return IndependentProductFamily(components)
