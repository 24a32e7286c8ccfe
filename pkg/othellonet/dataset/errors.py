class DatasetError(Exception):
    """Base class for dataset construction and storage errors."""


class CenterCell(DatasetError, ValueError):
    pass


class EmptyDataset(DatasetError, ValueError):
    pass


class BadMagic(DatasetError, ValueError):
    pass


class VersionMismatch(DatasetError, ValueError):
    pass


class ChecksumMismatch(DatasetError, ValueError):
    pass


class IllegalTarget(DatasetError, ValueError):
    """A stored target is not a legal move for its board."""
