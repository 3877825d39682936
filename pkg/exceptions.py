"""
Custom domain exceptions for NodeHilb.
Services raise these; the suite runner turns them into check records and
the CLI layer converts them to exit codes.
"""


class NodeHilbError(Exception):
    """Base exception for all NodeHilb domain errors."""

    def __init__(self, message: str, exit_code: int = 2):
        self.message = message
        self.exit_code = exit_code
        super().__init__(self.message)


# ── Ring core ─────────────────────────────────────────────
class UnknownVariable(NodeHilbError):
    def __init__(self, name: str):
        super().__init__(message=f"variable '{name}' is not registered")


class NegativeExponentNotLocalized(NodeHilbError):
    def __init__(self, name: str, exponent: int):
        super().__init__(
            message=f"exponent {exponent} on '{name}' but '{name}' is not localized"
        )


class ContextMismatch(NodeHilbError):
    def __init__(self, detail: str = "operands live in different quotient contexts"):
        super().__init__(message=detail)


class NotDivisible(NodeHilbError):
    """Raised by exact division; carries the nonzero remainder witness."""

    def __init__(self, dividend: str, divisor: str, remainder: str):
        self.remainder = remainder
        super().__init__(
            message=f"({dividend}) is not divisible by ({divisor}); remainder {remainder}"
        )


class RelationViolated(NodeHilbError):
    def __init__(self, index: int, product: str, image_t: str):
        super().__init__(
            message=f"substitution breaks x{index}*y{index} = t: product {product} vs t -> {image_t}"
        )


class NonSquare(NodeHilbError):
    def __init__(self, rows: int, cols: int):
        super().__init__(message=f"determinant of a {rows}x{cols} matrix")


class ZeroPolynomial(NodeHilbError):
    def __init__(self, what: str = "order of the zero polynomial"):
        super().__init__(message=f"{what} is undefined")


class IndexOutOfRange(NodeHilbError):
    def __init__(self, name: str, value: int, low: int, high: int):
        super().__init__(message=f"{name}={value} outside [{low}, {high}]")


class PreconditionError(NodeHilbError):
    def __init__(self, detail: str):
        super().__init__(message=detail)


# ── Symmetric functions ───────────────────────────────────
class ForeignVariables(NodeHilbError):
    def __init__(self, names: list[str]):
        super().__init__(
            message=f"symmetrization only acts on point variables; found {', '.join(names)}"
        )


class NotInvariant(NodeHilbError):
    def __init__(self, swap: tuple[int, int]):
        super().__init__(
            message=f"polynomial changes under the transposition {swap[0]}<->{swap[1]}"
        )


class RecursionDepthExceeded(NodeHilbError):
    def __init__(self, depth: int):
        super().__init__(message=f"sigma expression recursion exceeded depth {depth}")


# ── Van der Monde generators ──────────────────────────────
class ExactDivisionFailed(NodeHilbError):
    def __init__(self, m: int, j: int, remainder: str):
        super().__init__(
            message=f"G_{j} at m={m}: sigma form division left remainder {remainder}"
        )


class NoExponentWorks(NodeHilbError):
    def __init__(self, m: int, i: int, j: int):
        super().__init__(message=f"no t-exponent makes eta_({i},{j}) = G_{i}G_{j} at m={m}")


# ── Charts and strata ─────────────────────────────────────
class ReductionDiverged(NodeHilbError):
    def __init__(self, steps: int):
        super().__init__(message=f"chart reduction did not terminate within {steps} steps")


class CobasisNotClosed(NodeHilbError):
    def __init__(self, monomial: str):
        super().__init__(message=f"normal form leaves non-basis monomial {monomial}")


class InvalidStratum(NodeHilbError):
    def __init__(self, m: int, a: int, b: int):
        super().__init__(message=f"no stratum (a, b) = ({a}, {b}) for m={m}")


class ZeroRatio(NodeHilbError):
    def __init__(self):
        super().__init__(message="principal punctual ideal needs u/v != 0")


# ── Scroll calculus ───────────────────────────────────────
class MultiplicityOverflow(NodeHilbError):
    def __init__(self, total: int, m: int):
        super().__init__(message=f"node multiplicities sum to {total} > m={m}")


class IdenticallyZero(NodeHilbError):
    def __init__(self, m: int, n: int, j: int):
        super().__init__(
            message=f"restriction of G_{j} vanishes identically at (m, n) = ({m}, {n})"
        )


# ── Driver ────────────────────────────────────────────────
class CheckTimeout(NodeHilbError):
    def __init__(self, check_id: str, seconds: float):
        super().__init__(message=f"check {check_id} exceeded {seconds:g}s")


class IoFailure(NodeHilbError):
    def __init__(self, path: str, reason: str):
        super().__init__(message=f"cannot write {path}: {reason}")


class UsageError(NodeHilbError):
    def __init__(self, message: str):
        super().__init__(message=message, exit_code=3)
