"""Closed-form boundary densities.

2D densities are functions of the curve parameter t; 3D densities are
functions of the sphere angles (theta, phi). Each density also records its
Fourier (2D) or spherical-harmonic (3D) modes, which is what the modal
reference solutions need on circles and spheres.
"""

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError
from .special_functions import sph_harm_table, sph_index


@dataclass(frozen=True)
class Density:
    name: str
    params: tuple
    func: Callable = field(repr=False, compare=False)
    dimension: int = 2
    real: bool = True
    # {n: c} meaning sum c * e^{int} (2D) or {(l, m): c} meaning sum c * Y_l^m (3D);
    # None when the density is not a finite mode sum in the curve parameter
    modes: object = field(default=None, compare=False)

    def __call__(self, *args):
        return self.func(*args)

    def describe(self):
        if not self.params:
            return self.name
        return f"{self.name}({', '.join(repr(p) for p in self.params)})"


def _int_param(value, what):
    if int(value) != value:
        raise DomainError(f"{what} must be an integer, got {value}")
    return int(value)


def constant(c=1.0, dimension=2):
    c = float(c)
    if dimension == 3:
        return Density("constant", (c,), lambda th, ph: np.full(np.shape(th), c), 3, True,
                       {(0, 0): c * math.sqrt(4.0 * math.pi)})
    return Density("constant", (c,), lambda t: np.full(np.shape(t), c), 2, True, {0: c})


def zero(dimension=2):
    d = constant(0.0, dimension)
    return Density("zero", (), d.func, dimension, True, {})


def exp_mode(n):
    n = _int_param(n, "mode")
    return Density("exp", (n,), lambda t: np.exp(1j * n * np.asarray(t)), 2, False, {n: 1.0})


def cos_mode(n):
    n = _int_param(n, "mode")
    modes = {0: 1.0} if n == 0 else {n: 0.5, -n: 0.5}
    return Density("cos", (n,), lambda t: np.cos(n * np.asarray(t)), 2, True, modes)


def sin_mode(n):
    n = _int_param(n, "mode")
    modes = {} if n == 0 else {n: -0.5j, -n: 0.5j}
    return Density("sin", (n,), lambda t: np.sin(n * np.asarray(t)), 2, True, modes)


def zpow(n, curve):
    """Boundary values w(t)**n of the monomial z**n."""
    n = _int_param(n, "power")
    modes = None
    if curve.name == "circle":
        modes = {n: curve.params[0] ** n}
    return Density("zpow", (n,), lambda t: curve.w(t) ** n, 2, False, modes)


def ylm(l, m):
    l = _int_param(l, "degree")
    m = _int_param(m, "order")
    if l < 0 or abs(m) > l:
        raise DomainError(f"need |m| <= l, got l={l}, m={m}")
    k = sph_index(l, m)

    def func(theta, phi):
        shape = np.shape(theta)
        return sph_harm_table(l, theta, phi)[0][:, k].reshape(shape)

    return Density("ylm", (l, m), func, 3, m == 0, {(l, m): 1.0})


def make_density(name, params=(), dimension=2, curve=None):
    params = tuple(params)
    if name == "constant":
        return constant(*(params or (1.0,)), dimension=dimension)
    if name == "zero":
        return zero(dimension)
    if dimension == 3:
        if name == "ylm":
            return ylm(*params)
        raise DomainError(f"unknown 3D density {name!r}; expected constant, zero or ylm")
    if name == "exp":
        return exp_mode(*params)
    if name == "cos":
        return cos_mode(*params)
    if name == "sin":
        return sin_mode(*params)
    if name == "zpow":
        if curve is None:
            raise DomainError("zpow density needs the curve")
        return zpow(params[0], curve)
    raise DomainError(f"unknown 2D density {name!r}; expected constant, zero, exp, cos, sin or zpow")
