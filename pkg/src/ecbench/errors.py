"""Exception hierarchy shared across ecbench modules."""


class EcbenchError(Exception):
    """Base class for all ecbench errors."""


class SpaceError(EcbenchError):
    """Invalid factor or configuration-space input."""


class PlanError(EcbenchError):
    """Invalid sampling-design parameters or plan contents."""


class ExecutionError(EcbenchError):
    """A measurement run failed (launch error, bad exit, timeout, bad duration)."""


class PairingError(EcbenchError):
    """Two result sets do not cover identical (ec_index, ordinal) keys."""


class FingerprintError(EcbenchError):
    """A persisted artifact does not match its recorded fingerprint."""
