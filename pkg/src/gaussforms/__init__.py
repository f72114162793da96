"""Exact Gauss sums of 2-linear functions on finite abelian groups and the
closed-form phase formulas for lattices, tensor products and reductions mod p^r.
"""

from .enhance import BilinearForm, TwoLinearForm, build, uf
from .errors import FormsError
from .exactnum import CycSum, QmodZ
from .fingroup import FinAbGroup, SubgroupSpan
from .gauss import NOT_TAME, beta, gauss_sum, magnitude_check
from .lattice import signature, tensor
from .modp import kirby_melvin, reduce_mod_pr, sigma_p

__all__ = [
    "BilinearForm", "CycSum", "FinAbGroup", "FormsError", "NOT_TAME", "QmodZ", "SubgroupSpan",
    "TwoLinearForm", "beta", "build", "gauss_sum", "kirby_melvin", "magnitude_check",
    "reduce_mod_pr", "sigma_p", "signature", "tensor", "uf",
]
__version__ = "0.1.0"
