"""Long-time asymptotics of the derivative NLS equation through inverse scattering.

Modules, in pipeline order: specfun (gamma and parabolic cylinder functions),
scattering (reflection coefficient), cauchy (scalar Cauchy transforms),
model_rhp (parabolic cylinder model problem), asymptotics (leading terms),
pde (pseudo-spectral reference solver) and harness (comparison runs).
"""

__version__ = "0.1.0"
