"""Numerical laboratory for conformally coupled wavefunction dynamics.

Fixed diagonal-metric spacetime grids carry polar-decomposed scalar fields,
their phase-covariant wave operators, a vacuum-multiplier constraint with a
static 1D solver, the mass term that constraint induces, and the matching
spinor equations.  Everything is verified property-first: analytic
derivative packs give round-off references, stencil routes must converge at
their declared order, and experiment runs emit byte-reproducible reports.

Submodules
----------
grid          spacetime grids, stencil derivatives, quadrature
manufactured  seeded Fourier test fields with analytic derivative packs
fields        polar decomposition, quantum potential, conformal state
kgops         phase-covariant operators, wave-form residuals, the action
vacuum        multiplier constraint, 1D solver, induced mass, massless limit
dirac         gamma algebra, spinor residual variants, dispersion
config        run configuration parsing
experiments   experiment orchestration
reports       deterministic report/CSV emission
cli           the `vdlab` command
"""

__version__ = "0.1.0"
