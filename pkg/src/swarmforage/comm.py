"""Wire format and the probabilistic per-tick communicate step.

A message is exactly 6 bytes: [x, y, state, reserved, entity_id,
pheromone]. Pheromone is carried as a linear fixed-point byte over
[0, tau_max]. Broadcasts reach every robot within Euclidean radius r_k
of the sender; sending and inbox integration are each gated by a single
per-robot per-tick probability draw.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .belief import select_cell_random, select_cell_utility

PACKET_SIZE = 6


class EncodeError(ValueError):
    """Raised when a packet's fields cannot be put on the wire."""


class DecodeError(ValueError):
    """Raised for malformed wire bytes."""


@dataclass(frozen=True)
class Packet:
    """One 6-byte cell claim. ``reserved`` is transmitted as 0."""

    x: int
    y: int
    state_code: int
    entity_id: int
    pheromone_q: int
    reserved: int = 0


def encode(packet):
    """Serialize to the 6-byte wire layout (reserved byte always 0)."""
    if packet.state_code > 2 or packet.state_code < 0:
        raise EncodeError(f"invalid state code {packet.state_code}")
    try:
        return bytes([packet.x, packet.y, packet.state_code, 0,
                      packet.entity_id, packet.pheromone_q])
    except ValueError as exc:
        raise EncodeError(str(exc)) from exc


def decode(data):
    """Parse 6 wire bytes; the reserved byte is accepted as-is."""
    if len(data) != PACKET_SIZE:
        raise DecodeError(f"expected {PACKET_SIZE} bytes, got {len(data)}")
    x, y, state_code, reserved, entity_id, pheromone_q = data
    if state_code > 2:
        raise DecodeError(f"invalid state code {state_code}")
    return Packet(x=x, y=y, state_code=state_code, entity_id=entity_id,
                  pheromone_q=pheromone_q, reserved=reserved)


def quantize_pheromone(tau, tau_max):
    """Linear fixed-point quantization of tau onto one byte (round half up)."""
    clamped = min(max(tau, 0.0), tau_max)
    return int(math.floor(clamped / tau_max * 255.0 + 0.5))


def dequantize_pheromone(q, tau_max):
    return q / 255.0 * tau_max


@dataclass(frozen=True)
class CommConfig:
    r_k: float = 2.0
    beta_send: float = 0.9
    beta_receive: float = 0.9
    selection: str = "utility"  # "utility" | "random"

    def validate(self):
        from .world import ConfigError
        if not (0.0 <= self.beta_send <= 1.0 and 0.0 <= self.beta_receive <= 1.0):
            raise ConfigError("beta_send/beta_receive must be in [0, 1]")
        if self.r_k < 0:
            raise ConfigError("r_k must be >= 0")
        if self.selection not in ("utility", "random"):
            raise ConfigError(f"unknown selection: {self.selection!r}")


def recipients(sender_id, sender_pos, positions, r_k):
    """Ids of robots within Euclidean distance r_k of the sender.

    ``positions`` maps robot id -> (x, y) (a sequence indexed by id).
    The sender never receives its own broadcast; boundary distance is
    inclusive. Result is in ascending id order.
    """
    sx, sy = sender_pos
    r2 = r_k * r_k
    out = []
    for rid, (x, y) in enumerate(positions):
        if rid == sender_id:
            continue
        if (x - sx) ** 2 + (y - sy) ** 2 <= r2:
            out.append(rid)
    return out


def communicate_step(robot, inbox, rng, cfg, nest_dist):
    """One robot's per-tick communication: maybe receive, maybe send.

    A single receive draw governs the whole inbox: on success every
    queued packet is internalized in sender-id order, otherwise the
    inbox is discarded. A single send draw gates the emission of at
    most one packet, describing the cell chosen by the configured
    selection rule from the robot's own belief.

    Returns the outgoing Packet, or None.
    """
    bmap = robot.belief
    p_receive = rng.random()
    p_send = rng.random()

    if p_receive < cfg.beta_receive:
        for pkt in sorted(inbox, key=lambda p: p.entity_id):
            tau = dequantize_pheromone(pkt.pheromone_q, bmap.tau_max)
            bmap.integrate_message((pkt.x, pkt.y), pkt.state_code, tau)

    if p_send >= cfg.beta_send:
        return None
    if cfg.selection == "utility":
        cell = select_cell_utility(bmap, nest_dist)
    else:
        cell = select_cell_random(bmap, rng)
    if cell is None:
        return None
    x, y = cell
    return Packet(x=x, y=y,
                  state_code=int(bmap.state[y, x]),
                  entity_id=robot.id % 256,
                  pheromone_q=quantize_pheromone(bmap.pheromone[y, x], bmap.tau_max))
