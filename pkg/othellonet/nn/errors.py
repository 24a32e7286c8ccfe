class ModelError(Exception):
    """Base class for network, training and checkpoint errors."""


class ShapeMismatch(ModelError, ValueError):
    pass


class BadMagic(ModelError, ValueError):
    pass


class VersionMismatch(ModelError, ValueError):
    pass


class ChecksumMismatch(ModelError, ValueError):
    pass


class TruncatedCheckpoint(ModelError, ValueError):
    pass
