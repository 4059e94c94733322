"""Message-passing execution of the protocols with exact bit accounting."""

from swapsim.runner.parties import BitAudit, IsolationViolation, RandomnessBroker
from swapsim.runner.session import AuditError, SessionResult, TcpConfig, run_session
from swapsim.runner.transport import ProtocolError, SessionError
from swapsim.runner.wire import FrameError, PartyRole, WireMessage, parse_frame, serialize_frame

__all__ = [
    "AuditError",
    "BitAudit",
    "FrameError",
    "IsolationViolation",
    "PartyRole",
    "ProtocolError",
    "RandomnessBroker",
    "SessionError",
    "SessionResult",
    "TcpConfig",
    "WireMessage",
    "parse_frame",
    "run_session",
    "serialize_frame",
]
