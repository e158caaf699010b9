"""Counter-based uniform draws: ``(seed, round, stream) -> [0, 1)``.

Every draw is a pure function of its counters, so a trial replays
identically whether it runs alone or inside a vectorized batch, and
batches can be split across workers in any order.
"""

import numpy as np

_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_S30, _S27, _S31, _S11 = (np.uint64(k) for k in (30, 27, 31, 11))


def _mix(z: np.ndarray) -> np.ndarray:
    # splitmix64 finalizer
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


def uniform(seed, round_, stream: int = 0) -> np.ndarray:
    """Uniform doubles in [0, 1); ``seed`` and ``round_`` broadcast as arrays."""
    with np.errstate(over="ignore"):
        s = np.asarray(seed).astype(np.int64).astype(np.uint64)
        r = np.asarray(round_).astype(np.int64).astype(np.uint64)
        h = _mix(s * _GOLDEN + np.uint64(0x632BE59BD9B4E019))
        h = _mix(h ^ (r * _GOLDEN + np.uint64(stream + 1)))
        h = _mix(h + np.uint64(stream) * _M2)
    return (h >> _S11).astype(np.float64) * (1.0 / 9007199254740992.0)
