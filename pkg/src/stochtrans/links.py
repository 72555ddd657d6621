"""Link functions ``F`` for parametric comparison models.

Both links are CDFs of symmetric densities, so ``F(-t) = 1 - F(t)``.
Log-CDF and hazard evaluations stay finite far into the tails.
"""
import numpy as np
from scipy import special


class Link:
    name = None

    def cdf(self, t):
        raise NotImplementedError

    def logcdf(self, t):
        raise NotImplementedError

    def pdf(self, t):
        raise NotImplementedError

    def hazard(self, t):
        """Return ``F'(t) / F(t)``, the derivative of ``log F``."""
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}()"


class GaussianLink(Link):
    name = "gaussian"

    def cdf(self, t):
        return special.ndtr(t)

    def logcdf(self, t):
        return special.log_ndtr(t)

    def pdf(self, t):
        return np.exp(-0.5 * np.square(t)) / np.sqrt(2 * np.pi)

    def hazard(self, t):
        t = np.asarray(t, dtype=float)
        return np.exp(-0.5 * t * t - 0.5 * np.log(2 * np.pi) - special.log_ndtr(t))


class LogisticLink(Link):
    name = "logistic"

    def cdf(self, t):
        return special.expit(t)

    def logcdf(self, t):
        return -np.logaddexp(0.0, -np.asarray(t, dtype=float))

    def pdf(self, t):
        s = special.expit(t)
        return s * (1 - s)

    def hazard(self, t):
        return special.expit(-np.asarray(t, dtype=float))


_LINKS = {
    "gaussian": GaussianLink(),
    "thurstone": GaussianLink(),
    "probit": GaussianLink(),
    "logistic": LogisticLink(),
    "btl": LogisticLink(),
    "logit": LogisticLink(),
}


def get_link(cdf):
    if isinstance(cdf, Link):
        return cdf
    try:
        return _LINKS[str(cdf).lower()]
    except KeyError:
        raise ValueError(f"unknown cdf {cdf!r}; expected 'gaussian' or 'logistic'") from None
