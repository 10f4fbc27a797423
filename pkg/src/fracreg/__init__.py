"""Fractional-in-time parabolic equations on Muckenhoupt-weighted spaces.

Submodules:

* :mod:`fracreg.frac_calc` -- discrete Riemann-Liouville / Caputo calculus
* :mod:`fracreg.weights` -- A_p weights and their characteristics
* :mod:`fracreg.spaces` -- periodic grids, multipliers and weighted norms
* :mod:`fracreg.solver` -- Volterra-form time stepping and a dense oracle
* :mod:`fracreg.verify` -- inequality checks, suites and reports
* :mod:`fracreg.cli` -- command-line front end
"""

__version__ = "0.1.0"
