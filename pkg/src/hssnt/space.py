"""Bundle of model, root datum and Kahler data for one Hermitian symmetric space."""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .algebra import AlgVec, SpaceSpec, build_model
from .kahler import kahler_data
from .roots import restricted_roots


@dataclass(eq=False)
class Space:
    model: object
    datum: object
    kahler: object

    @property
    def spec(self):
        return self.model.spec

    @property
    def rank(self):
        return self.datum.rank

    @property
    def C(self):
        return self.datum.C

    @property
    def H_tilde(self):
        return self.datum.H_tilde

    @property
    def J0(self):
        return self.kahler.J0

    def J(self, X):
        """J0 on a p-element given in full coordinates."""
        m = self.model
        x = m.coords(X)
        out = np.zeros(m.dim_g)
        out[m.p_slice] = self.kahler.J0 @ x[m.p_slice]
        return AlgVec(out, m.p_tag, m.key)

    def from_a(self, x):
        return self.datum.from_a(x)

    def a_coords(self, H):
        return self.datum.a_coords(H)

    def p(self, coeffs):
        return self.model.vec(coeffs, self.model.p_tag)


@lru_cache(maxsize=32)
def _build(key):
    m = build_model(SpaceSpec.parse(key))
    d = restricted_roots(m)
    k = kahler_data(m, d)
    return Space(m, d, k)


def build_space(spec):
    if isinstance(spec, SpaceSpec):
        return _build(spec.key)
    return _build(SpaceSpec.parse(spec).key)
