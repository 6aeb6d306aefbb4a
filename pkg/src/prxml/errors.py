"""Exception hierarchy shared by every module of the package."""


class PrxmlError(Exception):
    """Base class for all errors raised by prxml."""


class InvalidDocument(PrxmlError):
    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations)
        super().__init__(f"invalid document: {lines}")


class UnsupportedClass(PrxmlError):
    """The document uses node kinds the requested algorithm cannot handle."""


class PreconditionViolated(PrxmlError):
    pass


class IncompleteConfiguration(PrxmlError):
    pass


class TooManyConfigurations(PrxmlError):
    def __init__(self, count, cap):
        self.count = count
        self.cap = cap
        super().__init__(f"{count} configurations exceed the cap of {cap}")


class TooManyMatches(PrxmlError):
    def __init__(self, cap):
        self.cap = cap
        super().__init__(f"more than {cap} candidate matches")


class InvalidDistribution(PrxmlError):
    pass
