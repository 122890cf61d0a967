"""Exception types shared across the simulation lab."""


class UdsimError(Exception):
    """Base class for all library errors."""


class LengthMismatch(UdsimError):
    """Input bitstring length does not match the expected length."""


class UnsupportedFamily(UdsimError):
    """Requested function family cannot be sampled directly."""


class DimensionMismatch(UdsimError):
    """Vector length does not match the ambient dimension."""


class DimensionTooLarge(UdsimError):
    """Ambient dimension exceeds the simulator cap."""


class NotNormalized(UdsimError):
    """Statevector norm is not 1 within tolerance."""


class BackendMismatch(UdsimError):
    """Operation not supported by this copy-protection backend."""


class DeadHandle(UdsimError):
    """A protected-program handle was used after being retired."""


class OutOfDomain(UdsimError):
    """A half-program was evaluated outside its half of the domain."""


class CapacityExhausted(UdsimError):
    """Signature keypair has signed its maximum number of distinct messages."""


class DecryptorUnavailable(UdsimError):
    """Scheme has no quantum decryptor procedures (key-only scheme)."""


class EmptyMessage(UdsimError):
    """Zero-length plaintexts are not encodable."""


class AdversaryProtocolViolation(UdsimError):
    """Adversary broke a game rule (wrong state count, dead handle, ...)."""


class ChallengeLengthMismatch(UdsimError):
    """Challenge plaintext pair has mismatched lengths."""


class ResampleExhausted(UdsimError):
    """Oracle failed to resample a differing-value input within its bound."""


class ListExhausted(UdsimError):
    """Pre-sampled evaluation list consumed beyond its budget."""


class QueryBudgetExceeded(UdsimError):
    """Wrapped adversary made more oracle queries than its declared budget."""


class KatMismatch(UdsimError):
    """A known-answer vector failed to reproduce."""


class UnknownName(UdsimError):
    """A registry lookup (game, scheme, backend, adversary) failed."""


class InvalidParams(UdsimError):
    """Run configuration is inconsistent or out of range."""
