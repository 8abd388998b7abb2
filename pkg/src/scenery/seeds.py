"""Deterministic seed derivation.

Every random draw in the package is produced by a numpy PCG64 generator whose
seed is derived from (master_seed, *components) with the splitmix64 mixing
function. Components may be integers or short strings (stream tags such as
"path" or "scenery"); strings are folded in with FNV-1a. The derivation is a
pure function, so any (n, replica, stream) cell can be regenerated in isolation
regardless of worker scheduling.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return (z ^ (z >> 31)) & _MASK


def _fnv1a(text: str) -> int:
    h = 0xCBF29CE484222325
    for byte in text.encode("utf-8"):
        h = ((h ^ byte) * 0x100000001B3) & _MASK
    return h


def derive_seed(master_seed: int, *components: int | str) -> int:
    """Mix a master seed with stream components into a 64-bit child seed."""
    state = splitmix64(int(master_seed) & _MASK)
    for comp in components:
        if isinstance(comp, str):
            word = _fnv1a(comp)
        else:
            word = int(comp) & _MASK
        state = splitmix64(state ^ word)
    return state


def generator(master_seed: int, *components: int | str) -> np.random.Generator:
    """PCG64 generator for one derived stream."""
    return np.random.Generator(np.random.PCG64(derive_seed(master_seed, *components)))
