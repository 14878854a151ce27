"""Query-counted MQ/SAMP handles, simulator plumbing and the random tape.

Every handle counts its own calls.  Simulators additionally record how many
calls to the root (base) oracles happened while they were running, so nested
simulators report their full downstream cost.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .boolfn import BooleanFn, as_table, check_dim
from .errors import EmptySupport

MQ = "mq"
SAMP = "samp"


def _encode(*parts) -> bytes:
    out = bytearray()
    for p in parts:
        if isinstance(p, (bytes, bytearray)):
            raw = bytes(p)
            tag = b"b"
        elif isinstance(p, str):
            raw = p.encode()
            tag = b"s"
        elif isinstance(p, (int, np.integer)):
            v = int(p)
            raw = v.to_bytes((v.bit_length() + 8) // 8, "little", signed=True)
            tag = b"i"
        else:
            raise TypeError(f"cannot encode {type(p).__name__}")
        out += tag + len(raw).to_bytes(4, "little") + raw
    return bytes(out)


def derive_seed(master: int, *labels) -> int:
    """64-bit child seed from a master seed and a structural path label."""
    digest = hashlib.sha256(_encode(int(master), *labels)).digest()
    return int.from_bytes(digest[:8], "little")


def child_rng(master: int, *labels) -> np.random.Generator:
    return np.random.default_rng(derive_seed(master, *labels))


def spawn_seed(rng: np.random.Generator) -> int:
    return int(rng.bit_generator.random_raw())


@dataclass(frozen=True)
class RandomTape:
    """Deterministic per-point randomness: a keyed PRF standing in for a long string."""

    master: bytes
    namespace: str = ""

    @classmethod
    def from_seed(cls, seed: int, namespace: str = "") -> "RandomTape":
        return cls(seed.to_bytes(16, "little", signed=False), namespace)

    def _stream(self, key: tuple, nbytes: int) -> bytes:
        h = hashlib.shake_128(_encode(self.master, self.namespace, *key))
        return h.digest(nbytes)

    def bits(self, point: int, count: int, slot: int = 0) -> int:
        """``count`` deterministic bits for (point, slot) as an int."""
        if count <= 0:
            return 0
        raw = self._stream((point, slot), (count + 7) // 8)
        return int.from_bytes(raw, "little") & ((1 << count) - 1)

    def words(self, key: tuple, count: int) -> np.ndarray:
        """``count`` deterministic 64-bit words for ``key``, as uint64."""
        raw = self._stream(key, 8 * count)
        return np.frombuffer(raw, dtype="<u8")


def tape_bits(tape: RandomTape, point: int, count: int, slot: int = 0) -> int:
    return tape.bits(point, count, slot)


class Oracle:
    """Shared counter and stats plumbing."""

    role: str = MQ

    def __init__(self, oracle_id: str):
        self.oracle_id = oracle_id
        self.calls = 0

    @property
    def roots(self) -> tuple["Oracle", ...]:
        return (self,)

    @property
    def underlying_calls(self) -> int:
        return self.calls

    def stats(self) -> dict:
        return {
            "oracle_id": self.oracle_id,
            "role": self.role,
            "calls": self.calls,
            "forwarded_calls": self.underlying_calls if self.roots != (self,) else 0,
        }


class TableMQ(Oracle):
    """MQ(f) backed by a truth table."""

    role = MQ

    def __init__(self, table: np.ndarray, oracle_id: str = "f"):
        super().__init__(oracle_id)
        self.table = np.asarray(table, dtype=bool)
        self.n = len(self.table).bit_length() - 1
        self._bytes = self.table.tobytes()

    def __call__(self, x: int) -> int:
        self.calls += 1
        return self._bytes[x]

    def many(self, xs: np.ndarray) -> np.ndarray:
        self.calls += len(xs)
        return self.table[xs]


class SupportSAMP(Oracle):
    """SAMP(f): uniform draws from the precomputed support."""

    role = SAMP

    def __init__(self, table: np.ndarray, rng: np.random.Generator, oracle_id: str = "f"):
        super().__init__(oracle_id)
        table = np.asarray(table, dtype=bool)
        self.n = len(table).bit_length() - 1
        self.support = np.flatnonzero(table).astype(np.int64)
        if len(self.support) == 0:
            raise EmptySupport(f"SAMP({oracle_id}) needs a nonempty support")
        self._list = self.support.tolist()
        self.rng = rng

    def __call__(self) -> int:
        self.calls += 1
        return self._list[int(self.rng.integers(len(self._list)))]

    def many(self, m: int) -> np.ndarray:
        self.calls += m
        return self.support[self.rng.integers(len(self._list), size=m)]


def make_mq(f: BooleanFn, n: int, oracle_id: str = "f") -> TableMQ:
    check_dim(n)
    return TableMQ(as_table(f, n), oracle_id)


def make_samp(f: BooleanFn, n: int, rng: np.random.Generator | int, oracle_id: str = "f") -> SupportSAMP:
    check_dim(n)
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    return SupportSAMP(as_table(f, n), rng, oracle_id)


class Simulator(Oracle):
    """An oracle answered by code that itself queries other oracles.

    Subclasses implement ``_one`` (and optionally ``_many``).  Calls through
    ``__call__``/``many`` are counted; root-oracle calls made meanwhile are
    added to ``forwarded_calls``.
    """

    def __init__(self, oracle_id: str, bases: Iterable[Oracle], role: str = MQ):
        super().__init__(oracle_id)
        self.role = role
        roots: list[Oracle] = []
        for b in bases:
            for r in b.roots:
                if all(r is not q for q in roots):
                    roots.append(r)
        self._roots = tuple(roots)
        self.forwarded_calls = 0
        self.hook: Callable | None = None

    @property
    def roots(self) -> tuple[Oracle, ...]:
        return self._roots

    @property
    def underlying_calls(self) -> int:
        return self.forwarded_calls

    def _root_total(self) -> int:
        return sum(r.calls for r in self._roots)

    def __call__(self, *args):
        self.calls += 1
        before = self._root_total()
        out = self._one(*args)
        self.forwarded_calls += self._root_total() - before
        if self.hook is not None:
            self.hook(args, out)
        return out

    def many(self, arg):
        self.calls += len(arg) if self.role == MQ else int(arg)
        before = self._root_total()
        out = self._many(arg)
        self.forwarded_calls += self._root_total() - before
        if self.hook is not None:
            self.hook(arg, out)
        return out

    def _one(self, *args):
        raise NotImplementedError

    def _many(self, arg):
        if self.role == MQ:
            return np.fromiter((self._one(int(x)) for x in arg), dtype=bool, count=len(arg))
        return np.fromiter((self._one() for _ in range(int(arg))), dtype=np.int64, count=int(arg))


class FnMQ(Simulator):
    """MQ simulator from plain callables (used for restrictions and shifts)."""

    def __init__(self, oracle_id: str, bases, one: Callable[[int], int], many=None):
        super().__init__(oracle_id, bases, MQ)
        self._fn_one = one
        self._fn_many = many

    def _one(self, x):
        return self._fn_one(x)

    def _many(self, xs):
        if self._fn_many is not None:
            return self._fn_many(xs)
        return super()._many(xs)


class FnSAMP(Simulator):
    def __init__(self, oracle_id: str, bases, one: Callable[[], int], many=None):
        super().__init__(oracle_id, bases, SAMP)
        self._fn_one = one
        self._fn_many = many

    def _one(self):
        return self._fn_one()

    def _many(self, m):
        if self._fn_many is not None:
            return self._fn_many(m)
        return super()._many(m)


@dataclass
class SimulatorPair:
    mq: Oracle
    samp: Oracle
    accuracy: float = 0.0
    label: str = ""


def query_stats(handle: Oracle) -> dict:
    return {"calls": handle.calls, "underlying_f_calls": handle.underlying_calls}


def stats_json(handles: Iterable[Oracle]) -> str:
    return json.dumps([h.stats() for h in handles], sort_keys=True)


def query_many(mq: Oracle, xs: np.ndarray) -> np.ndarray:
    """Batch MQ through ``many`` when the handle supports it."""
    many = getattr(mq, "many", None)
    if many is not None:
        return many(xs)
    return np.fromiter((mq(int(x)) for x in xs), dtype=bool, count=len(xs))


def draw_many(samp: Oracle, m: int) -> np.ndarray:
    many = getattr(samp, "many", None)
    if many is not None:
        return many(m)
    return np.fromiter((samp() for _ in range(m)), dtype=np.int64, count=m)
