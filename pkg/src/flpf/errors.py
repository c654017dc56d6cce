"""Exception types shared across the package."""


class FlpfError(Exception):
    """Base class for all package errors."""


class AsymmetricInterference(FlpfError):
    def __init__(self, link, other):
        self.link = link
        self.other = other
        super().__init__(
            f"interference is not symmetric: {other} in I({link}) "
            f"but {link} not in I({other})"
        )


class SelfInterference(FlpfError):
    def __init__(self, link):
        self.link = link
        super().__init__(f"link {link} lists itself as an interferer")


class LimitExceeded(FlpfError):
    """Raised when an enumeration would exceed the configured link cap."""

    def __init__(self, requested, cap):
        self.requested = requested
        self.cap = cap
        super().__init__(
            f"{requested} links exceeds the enumeration cap of {cap} "
            f"(override with FLPF_MAX_LINKS)"
        )


class EmptyActiveSet(FlpfError):
    pass


class ProbabilityOutOfRange(FlpfError):
    pass


class ProbabilitiesDontSumToOne(FlpfError):
    def __init__(self, total):
        self.total = total
        super().__init__(f"state probabilities sum to {total}, expected 1")


class DuplicateState(FlpfError):
    def __init__(self, state):
        self.state = state
        super().__init__(f"duplicate channel state {state}")


class UnsupportedMode(FlpfError):
    """Operation defined only for ON/OFF fading was given a multi-state input."""


class NumericOverflow(FlpfError):
    def __init__(self, bits, cap):
        self.bits = bits
        self.cap = cap
        super().__init__(
            f"rational magnitude reached {bits} bits, above the {cap}-bit guard"
        )


class NotInPhi(FlpfError):
    """A claimed long-run service vector has no per-state convex decomposition."""

    def __init__(self, which):
        self.which = which
        super().__init__(f"vector {which} is not attainable: no decomposition exists")


class UndefinedRatio(FlpfError):
    def __init__(self, link):
        self.link = link
        super().__init__(
            f"ratio undefined at link {link}: numerator positive, denominator zero"
        )


class InvalidTriple(FlpfError):
    def __init__(self, state, reason):
        self.state = state
        self.reason = reason
        super().__init__(f"invalid bound triple for state {state}: {reason}")


class DecompositionNotInPhi(FlpfError):
    pass


class DeltaTooLargeForTargetRate(FlpfError):
    pass


class NonIntegerChannelValue(FlpfError):
    """Simulation needs integer per-slot capacities."""


class TraceTooShort(FlpfError):
    def __init__(self, slots, minimum):
        super().__init__(f"trace covers {slots} slots, need at least {minimum}")


class NetworkFileError(FlpfError):
    """Raised on malformed network files; carries field context."""

    def __init__(self, message, field=None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)
