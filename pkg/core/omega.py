import logging
import re
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from core.errors import DomainError, RandomCFError

logger = logging.getLogger(__name__)

# Custom Exceptions for this module
class OmegaExhaustedError(RandomCFError):
    """Raised when an explicit omega word is read past its end."""
    pass


_BLOCK_SIZE = 1024
_WORD_PATTERN = re.compile(r'^([01]*)(?:\(([01]+)\))?(\.\.\.)?$')


def _as_bits(bits: Sequence[int]) -> Tuple[int, ...]:
    checked = tuple(int(b) for b in bits)
    if any(b not in (0, 1) for b in checked):
        raise DomainError(f"Omega bits must be 0 or 1, got {list(bits)}")
    return checked


@dataclass
class OmegaWord:
    """A left-to-right source of sign bits omega_1 omega_2 ...

    Three kinds are supported: ``explicit`` words are finite and raise
    :class:`OmegaExhaustedError` when over-read, ``periodic`` words repeat a
    block forever (after an optional prefix) and ``bernoulli`` words draw
    bit 0 with probability ``p0`` from a PCG64 stream seeded by ``seed``.
    A word must not be shared between concurrent tasks.
    """

    kind: str
    bits: Tuple[int, ...] = ()
    prefix: Tuple[int, ...] = ()
    p0: float = 0.5
    seed: int = 0
    cursor: int = 0
    _buffer: List[int] = field(default_factory=list, repr=False)
    _rng: Optional[np.random.Generator] = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in ('explicit', 'periodic', 'bernoulli'):
            raise DomainError(f"Unknown omega word kind: {self.kind}")
        self.bits = _as_bits(self.bits)
        self.prefix = _as_bits(self.prefix)
        if self.kind == 'periodic' and not self.bits:
            raise DomainError("A periodic word needs a non-empty block")
        if self.kind == 'bernoulli':
            if not 0.0 <= self.p0 <= 1.0:
                raise DomainError(f"Bernoulli p0 must lie in [0,1], got {self.p0}")
            if not 0 <= self.seed < 2 ** 64:
                raise DomainError(f"Seed must be a 64-bit unsigned integer, got {self.seed}")
            self._rng = np.random.Generator(np.random.PCG64(self.seed))

    @classmethod
    def explicit(cls, bits: Sequence[int]) -> 'OmegaWord':
        return cls(kind='explicit', bits=tuple(bits))

    @classmethod
    def periodic(cls, block: Sequence[int], prefix: Sequence[int] = ()) -> 'OmegaWord':
        return cls(kind='periodic', bits=tuple(block), prefix=tuple(prefix))

    @classmethod
    def bernoulli(cls, p0: float, seed: int = 0) -> 'OmegaWord':
        return cls(kind='bernoulli', p0=float(p0), seed=int(seed))

    @classmethod
    def parse(cls, text: str) -> 'OmegaWord':
        """Parse the flat CLI syntax.

        ``0110`` is explicit, ``0110...`` repeats the whole block,
        ``10(01)...`` is the prefix ``10`` followed by ``01`` repeated, and
        ``bernoulli:p:seed`` is a random word.
        """
        text = text.strip()
        if text.startswith('bernoulli:'):
            parts = text.split(':')
            if len(parts) != 3:
                raise DomainError(f"Expected bernoulli:p:seed, got '{text}'")
            try:
                return cls.bernoulli(float(parts[1]), int(parts[2]))
            except ValueError as e:
                raise DomainError(f"Invalid bernoulli word '{text}': {e}") from e

        match = _WORD_PATTERN.match(text)
        if not match or not text:
            raise DomainError(f"Invalid omega word '{text}'")
        head, block, dots = match.groups()
        head_bits = [int(c) for c in head]
        if block is not None:
            if not dots:
                raise DomainError(f"A parenthesised block must be followed by '...': '{text}'")
            return cls.periodic([int(c) for c in block], prefix=head_bits)
        if dots:
            if not head_bits:
                raise DomainError(f"Nothing to repeat in '{text}'")
            return cls.periodic(head_bits)
        return cls.explicit(head_bits)

    def next(self) -> int:
        """Return the next bit and advance the cursor."""
        if self.kind == 'explicit':
            if self.cursor >= len(self.bits):
                raise OmegaExhaustedError(
                    f"Explicit omega word of length {len(self.bits)} exhausted"
                )
            bit = self.bits[self.cursor]
        elif self.kind == 'periodic':
            if self.cursor < len(self.prefix):
                bit = self.prefix[self.cursor]
            else:
                bit = self.bits[(self.cursor - len(self.prefix)) % len(self.bits)]
        else:
            if not self._buffer:
                draws = self._rng.random(_BLOCK_SIZE)
                self._buffer = (draws >= self.p0).astype(int).tolist()[::-1]
            bit = self._buffer.pop()
        self.cursor += 1
        return bit

    def take(self, n: int) -> List[int]:
        return [self.next() for _ in range(n)]

    def fresh(self) -> 'OmegaWord':
        """A new word of the same kind, rewound to the first bit."""
        return OmegaWord(kind=self.kind, bits=self.bits, prefix=self.prefix,
                         p0=self.p0, seed=self.seed)

    def __str__(self) -> str:
        if self.kind == 'bernoulli':
            return f"bernoulli:{self.p0}:{self.seed}"
        block = ''.join(map(str, self.bits))
        if self.kind == 'explicit':
            return block
        head = ''.join(map(str, self.prefix))
        return f"{head}({block})..." if head else f"{block}..."


def omega_next(word: OmegaWord) -> int:
    """Read one bit from ``word``."""
    return word.next()
