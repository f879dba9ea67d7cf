"""Writer-dependent online signature verification toolkit."""

try:
    from . import _sigver as _impl  # installed package layout
except ImportError:  # pragma: no cover - build-tree layout used by ctest
    import _sigver as _impl

ReferenceInterval = _impl.ReferenceInterval
UserModel = _impl.UserModel
VerificationResult = _impl.VerificationResult
enroll = _impl.enroll
generate = _impl.generate
protocol_eer = _impl.protocol_eer
select_features = _impl.select_features
standardize = _impl.standardize

__all__ = [
    "ReferenceInterval",
    "UserModel",
    "VerificationResult",
    "enroll",
    "generate",
    "protocol_eer",
    "select_features",
    "standardize",
]
