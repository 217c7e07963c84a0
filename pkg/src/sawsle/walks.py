"""Half-plane self-avoiding walks and the pivot Markov chain.

Walks live on the integer lattice, start at the origin and keep y >= 1
after the first site.  The pivot move picks a random site and applies one
of the four nonidentity lattice symmetries (rotations by +-90 and 180
degrees, reflection across the vertical axis through the pivot) to the
tail; proposals that collide or leave the half plane are rejected.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from numba import njit

CHECKPOINT_MAGIC = "sawsle-walk-checkpoint v1"

# step direction codes used when encoding short walks
_STEP_CODE = {(1, 0): 0, (-1, 0): 1, (0, 1): 2, (0, -1): 3}


@dataclass
class Walk:
    """An n-step half-plane SAW: site arrays x[0..n], y[0..n]."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        self.x = np.ascontiguousarray(self.x, dtype=np.int64)
        self.y = np.ascontiguousarray(self.y, dtype=np.int64)

    @property
    def n(self) -> int:
        return len(self.x) - 1

    def sites(self) -> list[tuple[int, int]]:
        return list(zip(self.x.tolist(), self.y.tolist()))

    def copy(self) -> "Walk":
        return Walk(self.x.copy(), self.y.copy())

    def check(self) -> None:
        """Raise ValueError if any Walk invariant is violated."""
        if self.n < 1:
            raise ValueError("walk must have at least one step")
        if self.x[0] != 0 or self.y[0] != 0:
            raise ValueError("walk must start at the origin")
        dx = np.diff(self.x)
        dy = np.diff(self.y)
        if not np.all(np.abs(dx) + np.abs(dy) == 1):
            raise ValueError("consecutive sites must differ by one unit step")
        if not np.all(self.y[1:] >= 1):
            raise ValueError("sites after the origin must have y >= 1")
        if len(set(zip(self.x.tolist(), self.y.tolist()))) != self.n + 1:
            raise ValueError("walk is not self-avoiding")

    def is_valid(self) -> bool:
        try:
            self.check()
        except ValueError:
            return False
        return True

    def step_code(self) -> int:
        """Encode the step sequence as sum(dir_i * 4**i); only for n <= 31."""
        code = 0
        for i in range(self.n):
            d = _STEP_CODE[(self.x[i + 1] - self.x[i], self.y[i + 1] - self.y[i])]
            code += d << (2 * i)
        return code


def init_walk(n: int) -> Walk:
    """The straight vertical walk (0,0),(0,1),...,(0,n)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return Walk(np.zeros(n + 1, dtype=np.int64), np.arange(n + 1, dtype=np.int64))


@njit(cache=True, inline="always")
def _transform(dx, dy, sym):
    # 0: rot +90, 1: rot -90, 2: rot 180, 3: reflect across vertical axis
    if sym == 0:
        return -dy, dx
    elif sym == 1:
        return dy, -dx
    elif sym == 2:
        return -dx, -dy
    else:
        return -dx, dy


@njit(cache=True, inline="always")
def _pack(x, y):
    # unique for |x|, |y| < 2**31, comfortably beyond desk-scale walks
    return (x << np.int64(32)) | (y & np.int64(0xFFFFFFFF))


@njit(cache=True, inline="always")
def _hash(key, mask):
    h = key * np.int64(0x9E3779B97F4A7C15)
    return (h ^ (h >> np.int64(29))) & mask


@njit(cache=True)
def _pivot_chain(x, y, ks, syms, tkey, tstamp, hkey, hstamp, stamp0,
                 newx, newy):
    """Run one pivot attempt per entry of ks/syms; returns (accepted, stamp).

    tkey/tstamp and hkey/hstamp are scratch open-addressing tables for
    the transformed tail and the head, keyed by packed site coordinates;
    stamped entries avoid clearing.  Intersection checks run outward from
    the pivot so that rejected proposals are detected early
    (Madras-Sokal ordering).
    """
    n = len(x) - 1
    mask = np.int64(len(tkey) - 1)
    stamp = stamp0
    accepted = 0
    for it in range(len(ks)):
        k = ks[it]
        sym = syms[it]
        px = x[k]
        py = y[k]
        stamp += 1
        # head table gets the pivot site first
        key = _pack(px, py)
        j = _hash(key, mask)
        while hstamp[j] == stamp:
            j = (j + 1) & mask
        hkey[j] = key
        hstamp[j] = stamp
        ok = True
        tmax = k if k > n - k else n - k
        for t in range(1, tmax + 1):
            if t <= n - k:
                dx, dy = _transform(x[k + t] - px, y[k + t] - py, sym)
                wx = px + dx
                wy = py + dy
                if wy < 1:
                    ok = False
                    break
                # collision with head sites seen so far?
                key = _pack(wx, wy)
                j = _hash(key, mask)
                while hstamp[j] == stamp:
                    if hkey[j] == key:
                        ok = False
                        break
                    j = (j + 1) & mask
                if not ok:
                    break
                j = _hash(key, mask)
                while tstamp[j] == stamp:
                    j = (j + 1) & mask
                tkey[j] = key
                tstamp[j] = stamp
                newx[t] = wx
                newy[t] = wy
            if t <= k:
                # collision of a head site with transformed tail seen so far?
                key = _pack(x[k - t], y[k - t])
                j = _hash(key, mask)
                while tstamp[j] == stamp:
                    if tkey[j] == key:
                        ok = False
                        break
                    j = (j + 1) & mask
                if not ok:
                    break
                j = _hash(key, mask)
                while hstamp[j] == stamp:
                    j = (j + 1) & mask
                hkey[j] = key
                hstamp[j] = stamp
        if ok:
            for t in range(1, n - k + 1):
                x[k + t] = newx[t]
                y[k + t] = newy[t]
            accepted += 1
    return accepted, stamp


@njit(cache=True)
def _encode_walk(x, y):
    code = np.int64(0)
    for i in range(len(x) - 1):
        dx = x[i + 1] - x[i]
        dy = y[i + 1] - y[i]
        if dx == 1:
            d = np.int64(0)
        elif dx == -1:
            d = np.int64(1)
        elif dy == 1:
            d = np.int64(2)
        else:
            d = np.int64(3)
        code |= d << np.int64(2 * i)
    return code


@njit(cache=True)
def _pivot_chain_codes(x, y, ks, syms, observe_every, tkey, tstamp,
                       hkey, hstamp, stamp0, newx, newy, codes):
    """Pivot chain that records the step-code of the walk every
    observe_every iterations (walks of <= 31 steps only)."""
    stamp = stamp0
    accepted = 0
    nobs = 0
    m = len(ks)
    for start in range(0, m - observe_every + 1, observe_every):
        a, stamp = _pivot_chain(x, y, ks[start:start + observe_every],
                                syms[start:start + observe_every],
                                tkey, tstamp, hkey, hstamp, stamp,
                                newx, newy)
        accepted += a
        codes[nobs] = _encode_walk(x, y)
        nobs += 1
    return accepted, stamp, nobs


class PivotChain:
    """Sequential pivot Markov chain on n-step half-plane SAWs.

    Driven by a numpy Generator (PCG64 by default: period 2**128,
    splittable via SeedSequence).  State is (walk, rng); both are captured
    by checkpoints, so a resumed chain is bit-identical to an
    uninterrupted one.
    """

    def __init__(self, walk: Walk, rng: np.random.Generator):
        walk.check()
        self.walk = walk.copy()
        self.rng = rng
        n = self.walk.n
        size = 1
        while size < 2 * (n + 1):
            size *= 2
        self._tkey = np.zeros(size, dtype=np.int64)
        self._tstamp = np.zeros(size, dtype=np.int64)
        self._hkey = np.zeros(size, dtype=np.int64)
        self._hstamp = np.zeros(size, dtype=np.int64)
        self._stamp = np.int64(0)
        self._newx = np.zeros(n + 1, dtype=np.int64)
        self._newy = np.zeros(n + 1, dtype=np.int64)
        self.accepted = 0
        self.iterations = 0

    def step(self, iterations: int) -> int:
        """Attempt `iterations` pivots; returns the number accepted."""
        if iterations <= 0:
            return 0
        n = self.walk.n
        ks = self.rng.integers(1, n, size=iterations).astype(np.int64)
        syms = self.rng.integers(0, 4, size=iterations).astype(np.int64)
        acc, self._stamp = _pivot_chain(
            self.walk.x, self.walk.y, ks, syms,
            self._tkey, self._tstamp, self._hkey, self._hstamp,
            self._stamp, self._newx, self._newy)
        self.accepted += acc
        self.iterations += iterations
        return acc

    def equilibrate(self, accepted_target: int | None = None,
                    chunk: int = 10000) -> None:
        """Discard accepted_target accepted pivots (default 20*n)."""
        if accepted_target is None:
            accepted_target = 20 * self.walk.n
        done = 0
        while done < accepted_target:
            done += self.step(chunk)

    def run(self, iterations: int, observe_every: int, observer) -> int:
        """Run the chain, invoking observer(walk) every observe_every
        iterations; emits floor(iterations/observe_every) observations."""
        if observe_every < 1:
            raise ValueError("observe_every must be >= 1")
        nobs = iterations // observe_every
        for _ in range(nobs):
            self.step(observe_every)
            observer(self.walk)
        # leftover iterations advance the chain without an observation
        self.step(iterations - nobs * observe_every)
        return nobs

    def run_codes(self, iterations: int, observe_every: int,
                  batch: int = 1_000_000) -> np.ndarray:
        """Fast path for short walks: returns the array of walk step codes
        observed every observe_every iterations."""
        if self.walk.n > 31:
            raise ValueError("step codes only defined for walks of <= 31 steps")
        nobs = iterations // observe_every
        out = np.empty(nobs, dtype=np.int64)
        pos = 0
        n = self.walk.n
        while pos < nobs:
            take = min(nobs - pos, max(1, batch // observe_every))
            m = take * observe_every
            ks = self.rng.integers(1, n, size=m).astype(np.int64)
            syms = self.rng.integers(0, 4, size=m).astype(np.int64)
            codes = np.empty(take, dtype=np.int64)
            acc, self._stamp, got = _pivot_chain_codes(
                self.walk.x, self.walk.y, ks, syms, observe_every,
                self._tkey, self._tstamp, self._hkey, self._hstamp,
                self._stamp, self._newx, self._newy, codes)
            self.accepted += acc
            self.iterations += m
            out[pos:pos + got] = codes[:got]
            pos += got
        return out

    # -- checkpointing -------------------------------------------------

    def save_checkpoint(self, path) -> None:
        state = json.dumps(self.rng.bit_generator.state)
        lines = [CHECKPOINT_MAGIC,
                 f"n {self.walk.n}",
                 f"iterations {self.iterations}",
                 f"accepted {self.accepted}",
                 f"rng {state}",
                 "sites"]
        lines += [f"{xi} {yi}" for xi, yi in zip(self.walk.x, self.walk.y)]
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")

    @classmethod
    def load_checkpoint(cls, path) -> "PivotChain":
        with open(path) as fh:
            lines = fh.read().splitlines()
        if not lines or lines[0] != CHECKPOINT_MAGIC:
            raise ValueError(f"not a {CHECKPOINT_MAGIC!r} file: {path}")
        n = int(lines[1].split()[1])
        iterations = int(lines[2].split()[1])
        accepted = int(lines[3].split()[1])
        state = json.loads(lines[4].split(" ", 1)[1])
        assert lines[5] == "sites"
        xs, ys = [], []
        for row in lines[6:6 + n + 1]:
            a, b = row.split()
            xs.append(int(a))
            ys.append(int(b))
        rng = np.random.Generator(np.random.PCG64())
        rng.bit_generator.state = state
        chain = cls(Walk(np.array(xs), np.array(ys)), rng)
        chain.iterations = iterations
        chain.accepted = accepted
        return chain


def pivot_step(walk: Walk, rng: np.random.Generator) -> tuple[Walk, bool]:
    """Single pivot attempt; returns (new walk, accepted flag).

    Convenience wrapper over the chain kernel; for long runs use
    PivotChain directly.
    """
    chain = PivotChain(walk, rng)
    acc = chain.step(1)
    return chain.walk, bool(acc)


def run_chain(walk: Walk, iterations: int, observe_every: int, observer,
              rng: np.random.Generator) -> int:
    """Run `iterations` pivot attempts from `walk`, observing every
    observe_every iterations.  Returns the number of observations."""
    chain = PivotChain(walk, rng)
    return chain.run(iterations, observe_every, observer)


def scaled_path(walk: Walk, n_prime: int, nu: float):
    """First n_prime steps rescaled by n_prime**(-nu), natural time in [0,1].

    Curve params are i/n_prime, points n_prime**(-nu) * W(i).
    """
    from .curves import ParamCurve

    if n_prime > walk.n:
        raise ValueError("n_prime exceeds walk length")
    if not (0 < nu < 1):
        raise ValueError("nu must be in (0,1)")
    scale = float(n_prime) ** (-nu)
    params = np.arange(n_prime + 1) / n_prime
    points = scale * (walk.x[:n_prime + 1] + 1j * walk.y[:n_prime + 1])
    return ParamCurve(params, points)


def enumerate_half_plane_saws(n: int) -> list[int]:
    """Step codes of all n-step half-plane SAWs, by depth-first search.

    Exhaustive-enumeration oracle for the chain's stationary distribution;
    practical for n up to ~10.
    """
    steps = [(1, 0), (-1, 0), (0, 1), (0, -1)]
    codes: list[int] = []
    occupied = {(0, 0)}
    path = [(0, 0)]

    def rec(code: int, depth: int):
        cx, cy = path[-1]
        for d, (dx, dy) in enumerate(steps):
            nxt = (cx + dx, cy + dy)
            if nxt[1] < 1 or nxt in occupied:
                continue
            if depth + 1 == n:
                codes.append(code | (d << (2 * depth)))
                continue
            occupied.add(nxt)
            path.append(nxt)
            rec(code | (d << (2 * depth)), depth + 1)
            path.pop()
            occupied.remove(nxt)

    rec(0, 0)
    return sorted(codes)
