"""Deterministic comparison assignment derived from a shared state hash.

Every judge derives a private seed ``SHA256(state_hash || node_id)`` and
expands it into a replayable byte stream (block ``k`` is
``SHA256(seed || k_be64)``).  Pairs are drawn uniformly with replacement
from the unordered pairs that avoid the judge's own responses, so anyone
holding the state hash can re-derive and audit the assignment.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from math import comb, exp
from typing import Iterable, Sequence

import numpy as np

STATE_HASH_LEN = 32
_U64_LIMIT = 1 << 64


class EmptyAssignmentError(ValueError):
    """No valid pair remains once the judge's own responses are excluded."""


@dataclass(frozen=True)
class ComparisonSeed:
    state_hash: bytes
    node_id: bytes
    derived_seed: bytes


@dataclass(frozen=True)
class Assignment:
    judge: bytes
    pairs: tuple[tuple[int, int], ...]

    @property
    def count(self) -> int:
        return len(self.pairs)


def derive_seed(state_hash: bytes, node_id: bytes | str) -> ComparisonSeed:
    """Derive a judge's comparison seed from the shared state hash."""
    if isinstance(node_id, str):
        node_id = node_id.encode("utf-8")
    if len(state_hash) != STATE_HASH_LEN:
        raise ValueError(f"state_hash must be {STATE_HASH_LEN} bytes, got {len(state_hash)}")
    if not node_id:
        raise ValueError("node_id must be non-empty")
    digest = hashlib.sha256(state_hash + node_id).digest()
    return ComparisonSeed(state_hash=state_hash, node_id=node_id, derived_seed=digest)


def _stream_bytes(seed: bytes, start_block: int, n_blocks: int) -> bytes:
    chunks = []
    for k in range(start_block, start_block + n_blocks):
        chunks.append(hashlib.sha256(seed + k.to_bytes(8, "big")).digest())
    return b"".join(chunks)


def _stream_words(seed: bytes, start_block: int, n_blocks: int) -> list[int]:
    """Big-endian u64 words of counter-mode blocks ``SHA256(seed || k_be64)``."""
    buf = _stream_bytes(seed, start_block, n_blocks)
    return np.frombuffer(buf, dtype=">u8").tolist()


class Sha256Stream:
    """Counter-mode SHA-256 byte stream consumed as 64-bit integers."""

    _REFILL_BLOCKS = 16  # 16 blocks -> 64 u64 words per refill

    def __init__(self, seed: bytes):
        self._seed = seed
        self._counter = 0
        self._words: list[int] = []
        self._pos = 0

    def next_u64(self) -> int:
        if self._pos >= len(self._words):
            self._words = _stream_words(self._seed, self._counter, self._REFILL_BLOCKS)
            self._counter += self._REFILL_BLOCKS
            self._pos = 0
        word = self._words[self._pos]
        self._pos += 1
        return word

    def randbelow(self, bound: int) -> int:
        """Uniform integer in ``[0, bound)`` via rejection (no modulo bias)."""
        limit = _U64_LIMIT - (_U64_LIMIT % bound)
        while True:
            word = self.next_u64()
            if word < limit:
                return word % bound


def sample_assignment(
    seed: ComparisonSeed,
    n_responses: int,
    own_indices: Iterable[int] = (),
    comparisons_per_judge: int | None = None,
    presentation_shuffle: bool = False,
) -> Assignment:
    """Draw the judge's comparison pairs from its seed.

    Pairs are uniform with replacement over unordered pairs not touching
    ``own_indices``; a pair touching an own index is redrawn.  Pairs are
    reported canonically as ``(min, max)``; with ``presentation_shuffle``
    an extra coin from the same stream decides the displayed order (a
    position-bias knob, off by default).  Defaults to ``3 * n_responses``
    draws.
    """
    if n_responses < 2:
        raise ValueError("n_responses must be >= 2")
    own = frozenset(own_indices)
    if not own <= frozenset(range(n_responses)):
        raise ValueError("own_indices out of range")
    if n_responses - len(own) < 2:
        raise EmptyAssignmentError(
            f"judge {seed.node_id!r} has no valid pair after excluding {sorted(own)}"
        )
    count = 3 * n_responses if comparisons_per_judge is None else comparisons_per_judge
    if count < 0:
        raise ValueError("comparisons_per_judge must be nonnegative")
    if presentation_shuffle:
        pairs = _sample_pairs_scalar(seed.derived_seed, n_responses, own, count, True)
    else:
        pairs = _sample_pairs_vectorized(seed.derived_seed, n_responses, own, count)
    return Assignment(judge=seed.node_id, pairs=tuple(pairs))


def _sample_pairs_scalar(
    stream_seed: bytes,
    n_responses: int,
    own: frozenset[int],
    count: int,
    presentation_shuffle: bool,
) -> list[tuple[int, int]]:
    """Reference draw loop: one ``randbelow`` call at a time from the stream."""
    stream = Sha256Stream(stream_seed)
    pairs: list[tuple[int, int]] = []
    while len(pairs) < count:
        a = stream.randbelow(n_responses)
        b = stream.randbelow(n_responses - 1)
        if b >= a:
            b += 1
        if a in own or b in own:
            continue
        lo, hi = (a, b) if a < b else (b, a)
        if presentation_shuffle and stream.randbelow(2):
            lo, hi = hi, lo
        pairs.append((lo, hi))
    return pairs


def _sample_pairs_vectorized(
    stream_seed: bytes,
    n_responses: int,
    own: frozenset[int],
    count: int,
) -> list[tuple[int, int]]:
    """Bulk equivalent of :func:`_sample_pairs_scalar` without the coin.

    Each candidate pair consumes exactly two stream words unless a word
    hits the modulo-rejection limit of ``randbelow``; that has probability
    below 2**-59 per word, and the rare case falls back to the scalar
    loop so the outputs stay bit-identical to the reference semantics.
    """
    limit_a = _U64_LIMIT - (_U64_LIMIT % n_responses)
    limit_b = _U64_LIMIT - (_U64_LIMIT % (n_responses - 1))
    own_list = sorted(own)
    out: list[tuple[int, int]] = []
    consumed = 0  # words consumed so far, to resume exactly where the reference would
    remaining = count
    while remaining > 0:
        reject = 2.0 * len(own) / n_responses
        n_draws = int(remaining * (1.0 + reject)) + 4
        first_block, offset = divmod(consumed, 4)
        blocks = (offset + 2 * n_draws + 3) // 4
        words = np.frombuffer(
            _stream_bytes(stream_seed, first_block, blocks), dtype=">u8")
        words = words[offset:offset + 2 * n_draws]
        consumed += 2 * n_draws
        a_words = words[0::2]
        b_words = words[1::2]
        if np.any(a_words >= limit_a) or np.any(b_words >= limit_b):
            return _sample_pairs_scalar(stream_seed, n_responses, own, count, False)
        a = (a_words % n_responses).astype(np.int64)
        b = (b_words % (n_responses - 1)).astype(np.int64)
        b += b >= a
        if own_list:
            ok = np.ones(len(a), dtype=bool)
            for o in own_list:
                ok &= (a != o) & (b != o)
            a, b = a[ok], b[ok]
        lo = np.minimum(a, b)
        hi = np.maximum(a, b)
        take = min(remaining, len(lo))
        out.extend(zip(lo[:take].tolist(), hi[:take].tolist()))
        remaining -= take
    return out


def pair_miss_probability(
    n_responses: int,
    n_judges: int,
    comparisons_per_judge: int | None = None,
) -> tuple[float, float]:
    """Probability a specific pair is never drawn: ``(exact, approximation)``.

    Exact: ``(1 - 1/C(N,2)) ** (per_judge * n_judges)``.  The companion
    approximation ``exp(-6M / (N-1))`` assumes ``3N`` draws per judge and
    is returned for reference even when it overestimates.
    """
    if n_responses < 2:
        raise ValueError("n_responses must be >= 2")
    if n_judges < 0:
        raise ValueError("n_judges must be nonnegative")
    per_judge = 3 * n_responses if comparisons_per_judge is None else comparisons_per_judge
    total_draws = per_judge * n_judges
    exact = (1.0 - 1.0 / comb(n_responses, 2)) ** total_draws
    approx = exp(-6.0 * n_judges / (n_responses - 1))
    return exact, approx


def verify_assignment(
    assignment: Assignment,
    seed: ComparisonSeed,
    n_responses: int,
    own_indices: Iterable[int] = (),
    presentation_shuffle: bool = False,
) -> tuple[bool, str | None]:
    """Check a submitted assignment against its seed.

    Returns ``(True, None)`` when re-derivation reproduces the submitted
    pairs exactly, otherwise ``(False, reason)``.  A pair touching one of
    the judge's own responses is reported as ``"self-comparison"``
    regardless of any other mismatch.
    """
    own = frozenset(own_indices)
    for i, j in assignment.pairs:
        if i in own or j in own:
            return False, "self-comparison"
        if i == j:
            return False, "self-comparison"
    try:
        expected = sample_assignment(
            seed,
            n_responses,
            own,
            comparisons_per_judge=len(assignment.pairs),
            presentation_shuffle=presentation_shuffle,
        )
    except (ValueError, EmptyAssignmentError):
        return False, "underivable"
    if expected.pairs != assignment.pairs:
        return False, "mismatch"
    return True, None


def assignment_to_line(assignment: Assignment) -> str:
    """Serialize as ``judge_id<TAB>i,j<TAB>i,j ...`` (one judge per line)."""
    cells = [assignment.judge.decode("utf-8")]
    cells.extend(f"{i},{j}" for i, j in assignment.pairs)
    return "\t".join(cells)


def assignment_from_line(line: str) -> Assignment:
    cells = line.rstrip("\n").split("\t")
    if not cells or not cells[0]:
        raise ValueError("assignment line is missing the judge id")
    pairs = []
    for cell in cells[1:]:
        left, sep, right = cell.partition(",")
        if not sep:
            raise ValueError(f"malformed pair cell {cell!r}")
        pairs.append((int(left), int(right)))
    return Assignment(judge=cells[0].encode("utf-8"), pairs=tuple(pairs))
