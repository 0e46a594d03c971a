"""Counter-based randomness shared by the samplers and the solvers.

Every random quantity in the package is a pure function of
``(master_seed, stream_index, key, position)`` through the Philox4x64
bit generator.  A *stream* is one Monte-Carlo trial; inside a stream,
independent randomness is partitioned by a 32-bit subkey:

* subkeys ``0 .. 2**31 - 1`` address graph rows (row i of a sample),
* subkeys ``2**31 ..`` are reserved for auxiliary draws (solver start
  vectors and the like), built with :func:`aux_generator`.

Philox key layout: ``key[0] = master_seed`` (mod 2**64) and
``key[1] = (stream_index << 32) | subkey``.  Within one keyed stream,
"position" means the index into the sequence of 53-bit uniform doubles.
numpy's ``Philox.advance(k)`` skips a whole 4-word counter block, i.e.
four doubles, so arbitrary positions are reached by advancing
``lo // 4`` blocks and discarding ``lo % 4`` draws.
"""

from __future__ import annotations

import numpy as np
from numpy.random import Generator, Philox

_AUX_BASE = np.uint32(0x80000000)


def _philox(master_seed: int, stream_index: int, subkey: int) -> Philox:
    key = np.empty(2, dtype=np.uint64)
    key[0] = np.uint64(master_seed & 0xFFFFFFFFFFFFFFFF)
    key[1] = np.uint64(((stream_index & 0xFFFFFFFF) << 32) | (subkey & 0xFFFFFFFF))
    return Philox(key=key)


def row_uniforms(master_seed: int, stream_index: int, row: int, lo: int, hi: int) -> np.ndarray:
    """Uniform doubles at positions ``lo .. hi-1`` of the row's stream.

    Position j is reserved for the (row, j) vertex pair, so the same
    pair sees the same uniform no matter which sub-range is requested.
    """
    if hi <= lo:
        return np.empty(0)
    bit = _philox(master_seed, stream_index, row)
    blocks, rem = divmod(lo, 4)
    if blocks:
        bit.advance(blocks)
    u = Generator(bit).random(hi - lo + rem)
    return u[rem:] if rem else u


def aux_generator(master_seed: int, stream_index: int, purpose: int) -> Generator:
    """Generator for non-row randomness; ``purpose`` is a small namespace id."""
    return Generator(_philox(master_seed, stream_index, int(_AUX_BASE) | purpose))
