class MetrealError(Exception):
    pass


class DomainError(MetrealError, ValueError):
    """
    A value lies outside the documented domain of an operation
    (membership outside (0,1], negative scale, k >= N, ...).
    """
    pass


class StructuralError(MetrealError, ValueError):
    """
    Input has the wrong shape: non-total maps, partitions that do not
    cover, dimension mismatches, non-square matrices.
    """
    pass


class EnumerationLimitError(MetrealError):

    def __init__(self, message, report):
        super().__init__(message)
        self.report = report


class FormatError(MetrealError):
    """
    A file does not parse as any of the documented schemas. ``position``
    is a human readable location (line/column or JSON path).
    """

    def __init__(self, message, position=''):
        if position:
            message = message + ' (at ' + str(position) + ')'
        super().__init__(message)
        self.position = position
