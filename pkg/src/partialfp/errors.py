"""Exception types raised by the detection pipeline."""


class PartialFPError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(PartialFPError, ValueError):
    pass


class NoForegroundError(PartialFPError):
    """No block of the image qualifies as fingerprint foreground."""


class UnsupportedOrderError(PartialFPError, ValueError):
    pass


class DegenerateCoreError(PartialFPError):
    """All four axis counts are zero, so no ratio can be formed."""


class IngestionError(PartialFPError):
    """Label or image ingestion failed; ``problems`` lists every offender."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class EmptyDatasetError(PartialFPError):
    pass
