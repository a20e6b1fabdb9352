"""dopolab: quantum noise of a two-transverse-mode degenerate OPO.

Closed-form linearized theory, positive-P Langevin ensembles and the harness that compares them.
"""

__version__ = "0.3.0"
