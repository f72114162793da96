"""Exception hierarchy.

Every failure the library reports on purpose derives from :class:`FormsError`,
so callers (the CLI in particular) can separate bad input from real bugs.
"""


class FormsError(Exception):
    """Base class for all library errors."""


class CapExceeded(FormsError):
    """A group or product group is larger than the enumeration cap."""


class AmbiguousSign(FormsError):
    """An exactly real cyclotomic number is too close to zero to sign numerically."""


class NotWellDefined(FormsError):
    """Generator data does not define a function on the group."""


class NotTwoLinear(FormsError):
    """A value table violates the 2-linearity identity."""


class NotTame(FormsError):
    pass


class NotHomomorphism(FormsError):
    pass


class NotQuadratic(FormsError):
    pass


class PsiNonzeroOnK(FormsError):
    """The enhancement does not vanish on the subgroup used for a subquotient."""


class TheoremViolated(FormsError):
    """A proven identity failed; this always indicates an implementation bug."""


class NoPhaseFound(FormsError):
    pass


class SingularMatrix(FormsError):
    pass


class NotEven(FormsError):
    pass


class NotCharacteristic(FormsError):
    pass


class OddModulus(FormsError):
    pass


class EvenAlexander(FormsError):
    """det(S + S^T) is even, so the mod 2 form is singular."""


class DetDivisibleByP(FormsError):
    pass


class NotCoprime(FormsError):
    pass


class MalformedDecomposition(FormsError):
    pass


class ParseError(FormsError):
    pass
