"""Alice, the Referee and Bob as sequential message-passing processes.

Each party owns only its own inputs and the random streams the scenario
grants it: Alice shares lambda_AR with the Referee, the Referee shares
lambda_RB with Bob, Alice alone holds the flip coin and Bob alone his
acceptance coin.  Alice and Bob share nothing.
"""

from __future__ import annotations

import struct
from collections import defaultdict
from dataclasses import dataclass, field

from swapsim.protocol_full import flip_bit
from swapsim.protocol_one import alice_step, bob_step, referee_step
from swapsim.runner.transport import Channel, ProtocolError
from swapsim.runner.wire import FrameError, PartyRole, WireMessage
from swapsim.streams import BOB_U, FLIP, LAMBDA_AR, LAMBDA_RB, StreamCursor, scale_lambda

MODES = {"protocol1": 1, "p1": 1, "full": 2}
EXPECTED_BITS = {1: 4, 2: 9}

ACCESS = {
    PartyRole.ALICE: frozenset({LAMBDA_AR, FLIP}),
    PartyRole.REFEREE: frozenset({LAMBDA_AR, LAMBDA_RB}),
    PartyRole.BOB: frozenset({LAMBDA_RB, BOB_U}),
}


class IsolationViolation(PermissionError):
    """A party asked for randomness it does not hold."""


def runs_for(mode: str) -> int:
    try:
        return MODES[mode]
    except KeyError:
        raise ValueError(f"unknown mode {mode!r}; expected one of {sorted(MODES)}") from None


class RandomnessBroker:
    """Hands out private stream cursors per role and refuses anything else."""

    def __init__(self, seed: int):
        self.seed = seed
        self.issued: list[tuple[PartyRole, str, int, StreamCursor]] = []

    def request(self, role: PartyRole, name: str, run: int = 0) -> StreamCursor:
        if name not in ACCESS[role]:
            raise IsolationViolation(f"{role.label} may not read stream {name!r}")
        cursor = StreamCursor(self.seed, name, run)
        self.issued.append((role, name, run, cursor))
        return cursor

    def check_isolation(self) -> None:
        """Raise if any cursor object is held by two roles or Alice and Bob share a stream."""
        owners: dict[int, PartyRole] = {}
        names = defaultdict(set)
        for role, name, _, cursor in self.issued:
            if owners.setdefault(id(cursor), role) != role:
                raise IsolationViolation(f"cursor for {name!r} aliased across roles")
            names[role].add(name)
        shared = names[PartyRole.ALICE] & names[PartyRole.BOB]
        if shared:
            raise IsolationViolation(f"Alice and Bob share streams {sorted(shared)}")


OUTCOME = struct.Struct(">Ib")


class OutcomeSink:
    """Where a party reports its output; not part of the protocol's communication."""

    def __init__(self):
        self.records: list[tuple[int, int]] = []

    def report(self, round_id: int, value: int) -> None:
        self.records.append((round_id, value))

    def close(self) -> None:
        pass


class SocketSink(OutcomeSink):
    def __init__(self, sock):
        super().__init__()
        self.sock = sock

    def report(self, round_id: int, value: int) -> None:
        self.sock.sendall(OUTCOME.pack(round_id, value))

    def close(self) -> None:
        self.sock.close()


@dataclass
class BitAudit:
    """Payload bits counted at the receiver, per round and per edge."""

    rounds: dict[int, dict[tuple[str, str], int]] = field(default_factory=lambda: defaultdict(dict))

    def record(self, msg: WireMessage, receiver: PartyRole) -> None:
        edge = (msg.sender.label, receiver.label)
        per_round = self.rounds[msg.round_id]
        per_round[edge] = per_round.get(edge, 0) + msg.payload_bit_length

    def round_total(self, round_id: int) -> int:
        return sum(self.rounds.get(round_id, {}).values())

    @property
    def session_total(self) -> int:
        return sum(sum(edges.values()) for edges in self.rounds.values())

    def edge_totals(self) -> dict[tuple[str, str], int]:
        out: dict[tuple[str, str], int] = defaultdict(int)
        for edges in self.rounds.values():
            for edge, bits in edges.items():
                out[edge] += bits
        return dict(out)

    def bad_rounds(self, n_rounds: int, expected: int) -> list[int]:
        return [r for r in range(n_rounds) if self.round_total(r) != expected]


def _setting(settings, r):
    return settings[r] if len(settings) > 1 else settings[0]


class Alice:
    role = PartyRole.ALICE

    def __init__(self, settings, broker: RandomnessBroker, to_bob: Channel, sink: OutcomeSink, mode: str):
        self.settings = settings
        self.runs = runs_for(mode)
        self.to_bob = to_bob
        self.sink = sink
        self.lambda_ar = [broker.request(self.role, LAMBDA_AR, k) for k in range(self.runs)]
        self.flip = broker.request(self.role, FLIP) if self.runs == 2 else None

    def play_round(self, r: int) -> int:
        x = _setting(self.settings, r)
        dec = alice_step(x.phi, scale_lambda(self.lambda_ar[0].next()))
        self.to_bob.send(WireMessage.from_fields(self.role, r, [(dec.jA, 2), (dec.cA, 1)]))
        if self.runs == 1:
            return dec.a
        dec2 = alice_step(dec.a * x.theta, scale_lambda(self.lambda_ar[1].next()))
        self.to_bob.send(WireMessage.from_fields(self.role, r, [(dec2.jA, 2), (dec2.cA, 1)]))
        flip = int(flip_bit(self.flip.next()))
        self.to_bob.send(WireMessage.from_fields(self.role, r, [(flip, 1)]))
        return -dec2.a if flip else dec2.a

    def run(self, n_rounds: int) -> None:
        try:
            for r in range(n_rounds):
                self.sink.report(r, self.play_round(r))
        finally:
            self.sink.close()


class Referee:
    role = PartyRole.REFEREE

    def __init__(self, broker: RandomnessBroker, to_bob: Channel, mode: str):
        self.runs = runs_for(mode)
        self.to_bob = to_bob
        self.lambda_ar = [broker.request(self.role, LAMBDA_AR, k) for k in range(self.runs)]
        self.lambda_rb = [broker.request(self.role, LAMBDA_RB, k) for k in range(self.runs)]

    def run(self, n_rounds: int) -> None:
        for r in range(n_rounds):
            for k in range(self.runs):
                cr = referee_step(
                    scale_lambda(self.lambda_ar[k].next()), scale_lambda(self.lambda_rb[k].next())
                )
                self.to_bob.send(WireMessage.from_fields(self.role, r, [(cr, 1)]))


class Bob:
    role = PartyRole.BOB

    def __init__(self, settings, broker: RandomnessBroker, from_alice: Channel,
                 from_referee: Channel, sink: OutcomeSink, mode: str, audit: BitAudit,
                 timeout: float = 10.0):
        self.settings = settings
        self.runs = runs_for(mode)
        self.from_alice = from_alice
        self.from_referee = from_referee
        self.sink = sink
        self.audit = audit
        self.timeout = timeout
        self.lambda_rb = [broker.request(self.role, LAMBDA_RB, k) for k in range(self.runs)]
        self.coin = [broker.request(self.role, BOB_U, k) for k in range(self.runs)]

    def _expect(self, channel: Channel, sender: PartyRole, r: int, widths) -> list[int]:
        msg = channel.recv(self.timeout)
        if msg.sender != sender:
            raise ProtocolError(f"round {r}: frame claims sender {msg.sender.label}, expected {sender.label}")
        if msg.round_id != r:
            raise ProtocolError(f"expected round {r}, got {msg.round_id} from {sender.label}")
        try:
            values = msg.unpack(widths)
        except FrameError as exc:
            raise ProtocolError(f"round {r}: {exc}") from exc
        self.audit.record(msg, self.role)
        return values

    def _p1(self, r: int, k: int, phi: float) -> int:
        ja, ca = self._expect(self.from_alice, PartyRole.ALICE, r, (2, 1))
        (cr,) = self._expect(self.from_referee, PartyRole.REFEREE, r, (1,))
        lrb = scale_lambda(self.lambda_rb[k].next())
        return bob_step(phi, lrb, ja, ca, cr, self.coin[k].next()).b

    def play_round(self, r: int) -> int:
        y = _setting(self.settings, r)
        b0 = self._p1(r, 0, y.phi)
        if self.runs == 1:
            return b0
        b = self._p1(r, 1, -b0 * y.theta)
        (flip,) = self._expect(self.from_alice, PartyRole.ALICE, r, (1,))
        return -b if flip else b

    def run(self, n_rounds: int) -> None:
        try:
            for r in range(n_rounds):
                self.sink.report(r, self.play_round(r))
        finally:
            self.sink.close()
