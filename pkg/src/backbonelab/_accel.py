"""Kernel acceleration layer.

Hot inner loops (lattice exploration, bridge decomposition, exhaustive
enumeration) are written once in numba-compatible numpy style and compiled
with ``@njit`` when numba is available.  Setting the environment variable
``BACKBONELAB_DISABLE_NUMBA=1`` selects the pure-Python/numpy fallback path;
results are bit-identical between the two paths.

The only primitives with genuinely dual implementations are the uint64
RNG/hash helpers below: numpy 2.x warns on scalar uint64 overflow, so the
fallback uses masked Python integers while the compiled path uses machine
arithmetic.  ``benchmarks/compare_backends.py`` times both paths.
"""

import os

import numpy as np

_MASK = (1 << 64) - 1

DISABLE_NUMBA = os.environ.get("BACKBONELAB_DISABLE_NUMBA", "").lower() in (
    "1",
    "true",
    "yes",
)

if not DISABLE_NUMBA:
    try:
        import numba

        HAVE_NUMBA = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        HAVE_NUMBA = False
else:
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not DISABLE_NUMBA


def maybe_njit(*args, **kwargs):
    """``numba.njit`` when enabled, identity decorator otherwise."""
    if not USE_NUMBA:
        if args and callable(args[0]):
            return args[0]
        return lambda f: f
    if args and callable(args[0]):
        return numba.njit(cache=True)(args[0])
    kwargs.setdefault("cache", True)
    return numba.njit(*args, **kwargs)


# ---------------------------------------------------------------------------
# splitmix64 / xoshiro256++ primitives.
#
# State is a length-4 uint64 array owned by one worker.  Substream seeding is
# splitmix64 of (master_seed, stream_index), so (seed, trial) reproduces the
# trial's draws exactly regardless of execution order.
# ---------------------------------------------------------------------------


def _py_splitmix64(x):
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return x, z ^ (z >> 31)


def _py_seed_state(state, master, stream):
    x = (int(master) * 0x9E3779B97F4A7C15 + int(stream) + 1) & _MASK
    for i in range(4):
        x, z = _py_splitmix64(x)
        state[i] = z
    if state[0] == 0 and state[1] == 0 and state[2] == 0 and state[3] == 0:
        state[0] = 0x853C49E6748FEA9B


def _py_next_u64(state):
    s0, s1, s2, s3 = (int(state[i]) for i in range(4))
    tmp = (s0 + s3) & _MASK
    result = (((tmp << 23) | (tmp >> 41)) + s0) & _MASK
    t = (s1 << 17) & _MASK
    s2 ^= s0
    s3 ^= s1
    s1 ^= s2
    s0 ^= s3
    s2 ^= t
    s3 = ((s3 << 45) | (s3 >> 19)) & _MASK
    state[0] = s0
    state[1] = s1
    state[2] = s2
    state[3] = s3
    return result


def _py_hash_u64(x):
    z = (int(x) + 0x9E3779B97F4A7C15) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def _py_uniform(state):
    return float(_py_next_u64(state) >> 11) * (2.0 ** -53)


def _py_randint(state, n):
    if n <= 0:
        return 0
    limit = ((1 << 64) // n) * n
    while True:
        r = _py_next_u64(state)
        if r < limit:
            return r % n


if USE_NUMBA:

    @numba.njit(numba.uint64(numba.uint64), cache=True)
    def _nb_splitmix_mix(z):
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        return z ^ (z >> np.uint64(31))

    @numba.njit(cache=True)
    def seed_state(state, master, stream):
        x = np.uint64(master) * np.uint64(0x9E3779B97F4A7C15) + np.uint64(
            stream
        ) + np.uint64(1)
        for i in range(4):
            x = x + np.uint64(0x9E3779B97F4A7C15)
            state[i] = _nb_splitmix_mix(x)
        if state[0] == 0 and state[1] == 0 and state[2] == 0 and state[3] == 0:
            state[0] = np.uint64(0x853C49E6748FEA9B)

    @numba.njit(numba.uint64(numba.uint64[:]), cache=True)
    def next_u64(state):
        s0 = state[0]
        s1 = state[1]
        s2 = state[2]
        s3 = state[3]
        tmp = s0 + s3
        result = ((tmp << np.uint64(23)) | (tmp >> np.uint64(41))) + s0
        t = s1 << np.uint64(17)
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = (s3 << np.uint64(45)) | (s3 >> np.uint64(19))
        state[0] = s0
        state[1] = s1
        state[2] = s2
        state[3] = s3
        return result

    @numba.njit(numba.uint64(numba.uint64), cache=True)
    def hash_u64(x):
        z = x + np.uint64(0x9E3779B97F4A7C15)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        return z ^ (z >> np.uint64(31))

    @numba.njit(numba.float64(numba.uint64[:]), cache=True)
    def uniform(state):
        return float(next_u64(state) >> np.uint64(11)) * (2.0 ** -53)

    @numba.njit(numba.int64(numba.uint64[:], numba.int64), cache=True)
    def randint(state, n):
        if n <= 0:
            return 0
        span = np.uint64(n)
        rem = np.uint64(0xFFFFFFFFFFFFFFFF) % span
        if rem == span - np.uint64(1):
            # n divides 2^64: every draw is accepted.
            return np.int64(next_u64(state) % span)
        limit = np.uint64(0xFFFFFFFFFFFFFFFF) - rem
        while True:
            r = next_u64(state)
            if r < limit:
                return np.int64(r % span)

else:

    def seed_state(state, master, stream):
        _py_seed_state(state, master, stream)

    def next_u64(state):
        return _py_next_u64(state)

    def hash_u64(x):
        return _py_hash_u64(x)

    def uniform(state):
        return _py_uniform(state)

    def randint(state, n):
        return _py_randint(state, n)


@maybe_njit
def binomial(state, n, p):
    """Binomial(n, p) by CDF inversion; the callers keep n*p small (<~30)."""
    if n <= 0 or p <= 0.0:
        return 0
    if p >= 1.0:
        return n
    u = uniform(state)
    # Work with the smaller of p, 1-p for numerical range.
    flip = p > 0.5
    q = 1.0 - p if flip else p
    logratio = np.log(q) - np.log1p(-q)
    prob = np.exp(n * np.log1p(-q))
    cdf = prob
    k = 0
    while u > cdf and k < n:
        prob *= (n - k) / (k + 1.0) * np.exp(logratio)
        cdf += prob
        k += 1
    if flip:
        return n - k
    return k


@maybe_njit
def poisson(state, lam):
    """Poisson(lam) by CDF inversion; callers keep lam small (<~30)."""
    if lam <= 0.0:
        return 0
    u = uniform(state)
    prob = np.exp(-lam)
    cdf = prob
    k = 0
    while u > cdf and k < 10000:
        prob *= lam / (k + 1.0)
        cdf += prob
        k += 1
    return k


def make_state(master, stream):
    """Fresh RNG state for substream ``stream`` of ``master``."""
    state = np.zeros(4, dtype=np.uint64)
    seed_state(state, master, stream)
    return state
