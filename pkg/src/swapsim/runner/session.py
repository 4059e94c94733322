"""Run the three parties as concurrent processes and collect their outputs."""

from __future__ import annotations

import socket
import threading
from dataclasses import dataclass

import numpy as np

from swapsim.geometry import MeasurementDirection
from swapsim.runner.parties import (
    EXPECTED_BITS,
    OUTCOME,
    Alice,
    BitAudit,
    Bob,
    OutcomeSink,
    RandomnessBroker,
    Referee,
    SocketSink,
    runs_for,
)
from swapsim.runner.transport import InProcessChannel, SessionError, TcpChannel, recv_exact
from swapsim.runner.wire import PartyRole

OBSERVER_HELLO = 0xFF


class AuditError(AssertionError):
    pass


@dataclass(frozen=True)
class TcpConfig:
    host: str = "127.0.0.1"
    alice_port: int = 0
    referee_port: int = 0
    bob_port: int = 0


@dataclass
class SessionResult:
    a: np.ndarray
    b: np.ndarray
    audit: BitAudit
    wire_bytes: int
    expected_bits: int

    @property
    def n_rounds(self) -> int:
        return int(self.a.size)


def _split_settings(settings, n_rounds):
    if isinstance(settings, tuple) and len(settings) == 2 and isinstance(settings[0], MeasurementDirection):
        settings = [settings]
    settings = list(settings)
    if len(settings) not in (1, n_rounds):
        raise ValueError("need one setting pair or one per round")
    # each side only ever sees its own half
    return [s[0] for s in settings], [s[1] for s in settings]


class _Runner:
    def __init__(self):
        self.errors: list[BaseException] = []
        self.threads: list[threading.Thread] = []

    def spawn(self, fn, *args):
        def target():
            try:
                fn(*args)
            except BaseException as exc:  # surfaced by join()
                self.errors.append(exc)

        t = threading.Thread(target=target, daemon=True)
        t.start()
        self.threads.append(t)

    def join(self, timeout):
        for t in self.threads:
            t.join(timeout)
            if t.is_alive():
                self.errors.append(SessionError("party did not finish"))
        if self.errors:
            # a root cause beats the timeouts it triggers downstream
            primary = [e for e in self.errors if not isinstance(e, SessionError)]
            raise (primary or self.errors)[0]


def _outputs(records, n_rounds, who):
    out = np.zeros(n_rounds, dtype=np.int64)
    seen = np.zeros(n_rounds, dtype=bool)
    for r, v in records:
        out[r] = v
        seen[r] = True
    if not seen.all():
        raise SessionError(f"{who} reported {int(seen.sum())} of {n_rounds} outcomes")
    return out


def _finish(a_rec, b_rec, n_rounds, audit, wire_bytes, runs, check=True):
    expected = EXPECTED_BITS[runs]
    bad = audit.bad_rounds(n_rounds, expected)
    if check and bad:
        raise AuditError(f"rounds {bad[:5]} deviate from {expected} payload bits")
    return SessionResult(
        _outputs(a_rec, n_rounds, "Alice"), _outputs(b_rec, n_rounds, "Bob"), audit, wire_bytes, expected
    )


def run_session(mode: str, settings, n_rounds: int, seed: int, transport: str = "inprocess",
                tcp: TcpConfig | None = None, timeout: float = 10.0,
                check: bool = True) -> SessionResult:
    """Play ``n_rounds`` rounds; every round's payload-bit total is checked.

    ``settings`` is one (x, y) pair or a list with one pair per round.
    With ``check`` a round whose total differs raises ``AuditError``.
    """
    runs = runs_for(mode)
    if n_rounds < 1:
        raise ValueError("n_rounds must be at least 1")
    xs, ys = _split_settings(settings, n_rounds)
    if transport == "inprocess":
        return _run_inprocess(mode, xs, ys, n_rounds, seed, timeout, runs, check)
    if transport == "tcp":
        return _run_tcp(mode, xs, ys, n_rounds, seed, tcp or TcpConfig(), timeout, runs, check)
    raise ValueError(f"unknown transport {transport!r}")


def _run_inprocess(mode, xs, ys, n_rounds, seed, timeout, runs, check):
    broker = RandomnessBroker(seed)
    audit = BitAudit()
    a_to_b, r_to_b = InProcessChannel(), InProcessChannel()
    a_sink, b_sink = OutcomeSink(), OutcomeSink()
    alice = Alice(xs, broker, a_to_b, a_sink, mode)
    referee = Referee(broker, r_to_b, mode)
    bob = Bob(ys, broker, a_to_b, r_to_b, b_sink, mode, audit, timeout)
    broker.check_isolation()
    runner = _Runner()
    runner.spawn(bob.run, n_rounds)
    runner.spawn(referee.run, n_rounds)
    runner.spawn(alice.run, n_rounds)
    runner.join(timeout + 60.0)
    wire = a_to_b.wire_bytes + r_to_b.wire_bytes
    return _finish(a_sink.records, b_sink.records, n_rounds, audit, wire, runs, check)


def _listener(host, port):
    s = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    s.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    s.bind((host, port))
    s.listen(4)
    return s


def _accept_roles(listener, roles, timeout):
    """Accept one connection per expected hello byte."""
    listener.settimeout(timeout)
    conns = {}
    while len(conns) < len(roles):
        try:
            conn, _ = listener.accept()
        except socket.timeout:
            raise SessionError("peer did not connect in time") from None
        conn.settimeout(timeout)
        hello = recv_exact(conn, 1)[0]
        if hello not in roles or hello in conns:
            conn.close()
            raise SessionError(f"unexpected hello byte {hello}")
        conns[hello] = conn
    return conns


def _connect(host, port, hello, timeout):
    sock = socket.create_connection((host, port), timeout=timeout)
    sock.sendall(bytes([hello]))
    return sock


def _run_tcp(mode, xs, ys, n_rounds, seed, cfg, timeout, runs, check):
    broker = RandomnessBroker(seed)
    audit = BitAudit()
    listeners = {
        PartyRole.ALICE: _listener(cfg.host, cfg.alice_port),
        PartyRole.REFEREE: _listener(cfg.host, cfg.referee_port),
        PartyRole.BOB: _listener(cfg.host, cfg.bob_port),
    }
    ports = {role: s.getsockname()[1] for role, s in listeners.items()}
    channels = {}

    def alice_main():
        obs = _accept_roles(listeners[PartyRole.ALICE], {OBSERVER_HELLO}, timeout)[OBSERVER_HELLO]
        ch = TcpChannel(_connect(cfg.host, ports[PartyRole.BOB], PartyRole.ALICE, timeout))
        alice = Alice(xs, broker, ch, SocketSink(obs), mode)
        try:
            alice.run(n_rounds)
        finally:
            channels["alice_tx"] = ch.wire_bytes
            ch.close()

    def referee_main():
        obs = _accept_roles(listeners[PartyRole.REFEREE], {OBSERVER_HELLO}, timeout)[OBSERVER_HELLO]
        ch = TcpChannel(_connect(cfg.host, ports[PartyRole.BOB], PartyRole.REFEREE, timeout))
        try:
            Referee(broker, ch, mode).run(n_rounds)
        finally:
            channels["referee_tx"] = ch.wire_bytes
            ch.close()
            obs.close()

    def bob_main():
        conns = _accept_roles(
            listeners[PartyRole.BOB], {PartyRole.ALICE, PartyRole.REFEREE, OBSERVER_HELLO}, timeout
        )
        from_a = TcpChannel(conns[PartyRole.ALICE])
        from_r = TcpChannel(conns[PartyRole.REFEREE])
        bob = Bob(ys, broker, from_a, from_r, SocketSink(conns[OBSERVER_HELLO]), mode, audit, timeout)
        try:
            bob.run(n_rounds)
        finally:
            channels["bob_rx"] = from_a.wire_bytes + from_r.wire_bytes
            from_a.close()
            from_r.close()

    results: dict[str, list] = {"a": [], "b": []}

    def observe(sock, key):
        # the coordinator: a fourth party that only listens to reported outcomes
        sock.settimeout(timeout + 60.0)
        buf = bytearray()
        while True:
            chunk = sock.recv(65536)
            if not chunk:
                break
            buf.extend(chunk)
        sock.close()
        if len(buf) % OUTCOME.size:
            raise SessionError(f"truncated outcome stream from {key}")
        if key in results:
            results[key] = [OUTCOME.unpack_from(buf, i) for i in range(0, len(buf), OUTCOME.size)]

    runner = _Runner()
    try:
        runner.spawn(bob_main)
        runner.spawn(referee_main)
        runner.spawn(alice_main)
        obs_socks = {
            "a": _connect(cfg.host, ports[PartyRole.ALICE], OBSERVER_HELLO, timeout),
            "r": _connect(cfg.host, ports[PartyRole.REFEREE], OBSERVER_HELLO, timeout),
            "b": _connect(cfg.host, ports[PartyRole.BOB], OBSERVER_HELLO, timeout),
        }
        for key, sock in obs_socks.items():
            runner.spawn(observe, sock, key)
        runner.join(timeout + 60.0)
    finally:
        for s in listeners.values():
            s.close()
    broker.check_isolation()
    return _finish(results["a"], results["b"], n_rounds, audit, channels.get("bob_rx", 0), runs, check)
