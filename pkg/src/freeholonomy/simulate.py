"""Monte-Carlo U(N) holonomy fields driven by a matrix Levy process.

Increments follow the unitarily invariant process whose generator has
drift i*alpha*I, diffusion b times the canonical Laplacian (Gaussian in
the skew-Hermitian algebra, orthonormal under <X,Y> = N Tr(X*Y)), and
jumps at Poisson rate N*sum(w): each jump conjugates diag(zeta,1,..,1)
by an independent Haar unitary, which is the rank-one map
U -> U + (zeta-1) v v* U with v uniform on the sphere.  The continuous
compensator drift is alpha_eff = alpha - sum w sin(phi).

The diffusion uses exponential Euler steps U <- U exp(i alpha_eff dt I +
sqrt(b dt) Xi); the Gaussian exponential supplies the -b dt/2 Ito decay
through E[Xi^2] = -I.  Steps are truncated-Taylor (through at least Xi^4,
so the per-step mean matches the exact exponential to O(dt^2)) with
periodic re-unitarization and a final complex128 polar projection.  The
optional "euler2" scheme runs a coupled coarse grid (summed Gaussians,
doubled steps) and Richardson-extrapolates each sample, removing the
O(dt) weak bias.

Samples are independent streams: sample i draws everything from
default_rng([seed, i]) in a fixed order, so results are reproducible
regardless of chunking.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field as dc_field

import numpy as np

from .field import HolonomyContext, master_trace
from .geometry import Loop
from .levy import CharTriplet, bm_support

DEFAULT_STEPS_PER_INCREMENT = 200


class SimError(ValueError):
    pass


@dataclass
class SimConfig:
    N: int
    triplet: CharTriplet
    samples: int = 500
    seed: int = 0
    dt: float | None = None  # None: increment duration / 200
    reunitarize_every: int = 10
    scheme: str = "euler2"  # "euler" (plain) or "euler2" (two-grid extrapolation)
    precision: str = "auto"  # "auto": complex64 stepping for N >= 64

    def __post_init__(self):
        if self.N < 1:
            raise SimError("N must be at least 1")
        if self.samples < 1:
            raise SimError("samples must be at least 1")
        if self.dt is not None and self.dt <= 0:
            raise SimError("dt must be positive")
        if self.scheme not in ("euler", "euler2"):
            raise SimError(f"unknown scheme {self.scheme!r}")
        if self.precision not in ("auto", "c64", "c128"):
            raise SimError(f"unknown precision {self.precision!r}")

    def step_dtype(self):
        if self.precision == "c64" or (self.precision == "auto" and self.N >= 64):
            return np.complex64
        return np.complex128

    def dt_for(self, t: float) -> float:
        if self.dt is not None:
            return self.dt
        steps = DEFAULT_STEPS_PER_INCREMENT // 2 if self.scheme == "euler2" else DEFAULT_STEPS_PER_INCREMENT
        return t / steps


@dataclass
class TraceStats:
    mean: complex
    stderr: float
    samples: int
    exact: complex
    sigmas: float
    loop_id: str = ""
    N: int = 0
    wall_ms: float = 0.0


def haar_unitary(N: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary: QR of a complex Ginibre matrix with the
    R-diagonal phases pushed into the columns."""
    z = (rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def gauss_skew(N: int, rng: np.random.Generator) -> np.ndarray:
    """Standard Gaussian skew-Hermitian matrix, orthonormal coordinates
    under <X,Y> = N Tr(X*Y); satisfies E[Xi^2] = -I."""
    a = rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
    h = (a + a.conj().T) / (2.0 * np.sqrt(N))
    return 1j * h


def skew_basis(N: int) -> list[np.ndarray]:
    """The explicit orthonormal basis of the skew-Hermitian algebra:
    i E_kk/sqrt(N), (E_kl - E_lk)/sqrt(2N), i(E_kl + E_lk)/sqrt(2N)."""
    out = []
    for k in range(N):
        m = np.zeros((N, N), dtype=complex)
        m[k, k] = 1j / math.sqrt(N)
        out.append(m)
    for k in range(N):
        for l in range(k + 1, N):
            m = np.zeros((N, N), dtype=complex)
            m[k, l] = 1.0 / math.sqrt(2 * N)
            m[l, k] = -1.0 / math.sqrt(2 * N)
            out.append(m)
            m = np.zeros((N, N), dtype=complex)
            m[k, l] = 1j / math.sqrt(2 * N)
            m[l, k] = 1j / math.sqrt(2 * N)
            out.append(m)
    return out


def polar_project(U: np.ndarray) -> np.ndarray:
    """Nearest unitary (polar factor) via SVD; batched."""
    w, _s, vh = np.linalg.svd(U)
    return w @ vh


def _newton_schulz(U: np.ndarray, iters: int = 2) -> np.ndarray:
    """Cheap re-unitarization for U already near unitary."""
    eye = np.eye(U.shape[-1], dtype=U.dtype)
    for _ in range(iters):
        U = 0.5 * U @ (3.0 * eye - np.swapaxes(U.conj(), -1, -2) @ U)
    return U


def _taylor_terms(norm_bound: float, tol: float = 1e-6, kmin: int = 5, kmax: int = 14) -> int:
    k = kmin
    while k < kmax:
        err = norm_bound ** (k + 1) / math.factorial(k + 1)
        if err < tol:
            break
        k += 1
    return k


class _OpSchedule:
    """Per-sample timeline: jump ops and diffusion substep durations.

    Diffusion pieces between jumps are cut into an even number of equal
    substeps no longer than dt, so the coarse grid (pairs of substeps)
    aligns with jumps.
    """

    __slots__ = ("ops",)

    def __init__(self, t: float, dt: float, jumps: list[tuple[float, int]]):
        self.ops: list[tuple[str, float, int]] = []  # ("d", delta, _) or ("j", 0, atom)
        prev = 0.0
        for when, atom in jumps:
            self._add_piece(when - prev, dt)
            self.ops.append(("j", 0.0, atom))
            prev = when
        self._add_piece(t - prev, dt)

    def _add_piece(self, length: float, dt: float):
        if length <= 0:
            return
        k = max(1, math.ceil(length / dt))
        self.ops.extend(("d", length / k, 0) for _ in range(k))
        self.ops.append(("f", 0.0, 0))  # piece boundary: flush coarse pairing


def _draw_schedule(rng: np.random.Generator, triplet: CharTriplet, N: int,
                   t: float, dt: float) -> _OpSchedule:
    rate = N * triplet.jump_rate
    jumps: list[tuple[float, int]] = []
    if rate > 0:
        njump = int(rng.poisson(rate * t))
        times = np.sort(rng.uniform(0.0, t, size=njump))
        weights = np.array([w for _phi, w in triplet.atoms], dtype=float)
        weights /= weights.sum()
        atoms = rng.choice(len(weights), size=njump, p=weights)
        jumps = [(float(times[i]), int(atoms[i])) for i in range(njump)]
    return _OpSchedule(t, dt, jumps)


def _increment_batch(rngs, t: float, config: SimConfig, coupled: bool):
    """Sample one Levy increment of duration t per rng.

    Returns (fine, coarse): arrays (S, N, N) of complex128 unitaries;
    ``coarse`` is None unless ``coupled``.  The coarse grid applies the
    pairwise-summed Gaussians of consecutive fine substeps (double the
    step); an unpaired substep at a piece boundary is replayed on the
    coarse grid unchanged.
    """
    N = config.N
    S = len(rngs)
    dtype = config.step_dtype()
    dt = config.dt_for(t)
    alpha_eff = config.triplet.alpha - config.triplet.imag_compensator()
    b = config.triplet.b
    zetas = [complex(math.cos(phi), math.sin(phi)) for phi, _w in config.triplet.atoms]

    schedules = [_draw_schedule(rng, config.triplet, N, t, dt) for rng in rngs]
    max_ops = max(len(s.ops) for s in schedules)

    Uf = np.broadcast_to(np.eye(N, dtype=dtype), (S, N, N)).copy()
    Uc = Uf.copy() if coupled else None
    pending: list[tuple[float, np.ndarray] | None] = [None] * S

    steps_since_proj = 0
    for p in range(max_ops):
        deltas = np.zeros(S)
        pair_deltas = np.zeros(S)
        flush_deltas = np.zeros(S)
        Xi = Xc = Xflush = None
        jumpers: list[tuple[int, int]] = []
        for i, sched in enumerate(schedules):
            if p >= len(sched.ops):
                continue
            kind, delta, atom = sched.ops[p]
            if kind == "j":
                jumpers.append((i, atom))
                continue
            if kind == "f":
                if coupled and pending[i] is not None:
                    d0, x0 = pending[i]
                    pending[i] = None
                    flush_deltas[i] = d0
                    if x0 is not None:
                        if Xflush is None:
                            Xflush = np.zeros((S, N, N), dtype=dtype)
                        Xflush[i] = x0
                continue
            deltas[i] = delta
            xi = None
            if b > 0:
                a = rngs[i].standard_normal((2, N, N))
                # i(H + H*)/(2 sqrt N) for H = a0 + i a1, done in real parts
                xi = ((a[1].T - a[1]) + 1j * (a[0] + a[0].T)) * (0.5 / math.sqrt(N))
                if Xi is None:
                    Xi = np.zeros((S, N, N), dtype=dtype)
                Xi[i] = xi.astype(dtype, copy=False)
            if coupled:
                if pending[i] is None:
                    pending[i] = (delta, xi)
                else:
                    d0, x0 = pending[i]
                    pending[i] = None
                    pair_deltas[i] = d0 + delta
                    if b > 0:
                        if Xc is None:
                            Xc = np.zeros((S, N, N), dtype=dtype)
                        Xc[i] = ((x0 + xi) / math.sqrt(2.0)).astype(dtype, copy=False)

        if deltas.any():
            Uf = _diffuse(Uf, Xi, deltas, b, alpha_eff, N, dtype)
            steps_since_proj += 1
        if coupled and pair_deltas.any():
            Uc = _diffuse(Uc, Xc, pair_deltas, b, alpha_eff, N, dtype)
        if coupled and flush_deltas.any():
            Uc = _diffuse(Uc, Xflush, flush_deltas, b, alpha_eff, N, dtype)

        for i, atom in jumpers:
            v = rngs[i].standard_normal(N) + 1j * rngs[i].standard_normal(N)
            v = (v / np.linalg.norm(v)).astype(dtype)
            row = v.conj() @ Uf[i]
            Uf[i] += (zetas[atom] - 1) * np.outer(v, row)
            if coupled:
                row = v.conj() @ Uc[i]
                Uc[i] += (zetas[atom] - 1) * np.outer(v, row)

        if steps_since_proj >= config.reunitarize_every:
            Uf = _newton_schulz(Uf)
            if coupled:
                Uc = _newton_schulz(Uc)
            steps_since_proj = 0

    Uf = _finalize(Uf, dtype)
    if coupled:
        Uc = _finalize(Uc, dtype)
    return Uf, Uc


def _diffuse(U, Xi, deltas, b, alpha_eff, N, dtype):
    if b > 0:
        return _apply_exp(U, Xi, deltas, b, alpha_eff, N, dtype)
    phase = np.exp(1j * alpha_eff * deltas).astype(dtype)
    return U * phase[:, None, None]


def _apply_exp(U, Xi, deltas, b, alpha_eff, N, dtype):
    """U <- U exp(A), A = i alpha_eff delta I + sqrt(b delta) Xi, via a
    Taylor sum applied directly to U (keeps at least the Xi^4 term)."""
    if N == 1:
        a = 1j * alpha_eff * deltas + np.sqrt(b * deltas) * Xi[:, 0, 0]
        return U * np.exp(a.astype(np.complex128)).astype(dtype)[:, None, None]
    scale = np.sqrt(b * deltas).astype(dtype)
    A = Xi * scale[:, None, None]
    if alpha_eff != 0:
        drift = (1j * alpha_eff * deltas).astype(dtype)
        idx = np.arange(N)
        A[:, idx, idx] += drift[:, None]
    dmax = float(deltas.max())
    norm_bound = math.sqrt(b * dmax) * (2.5 + 8.0 / math.sqrt(N)) + abs(alpha_eff) * dmax
    K = _taylor_terms(max(norm_bound, 1e-12))
    term = U
    acc = U.copy()
    for k in range(1, K + 1):
        term = (term @ A) * dtype(1.0 / k)
        acc += term
    return acc


def _finalize(U, dtype) -> np.ndarray:
    U128 = U.astype(np.complex128)
    gram = np.swapaxes(U128.conj(), -1, -2) @ U128
    eye = np.eye(U.shape[-1])
    drift = float(np.max(np.abs(gram - eye)))
    limit = 1e-6 if dtype == np.complex128 else 1e-3
    if drift > limit:
        warnings.warn(f"unitarity drift {drift:.2e} before final projection")
    return polar_project(U128)


def levy_increment(config: SimConfig, t: float, rng: np.random.Generator) -> np.ndarray:
    """One sampled increment Y_t (complex128, unitary to machine precision)."""
    if t <= 0:
        raise SimError("increment duration must be positive")
    fine, _ = _increment_batch([rng], t, config, coupled=False)
    return fine[0]


# -- holonomy sampling -----------------------------------------------------------


def _word_product(mats: list[np.ndarray], word) -> np.ndarray:
    """Batched product over the reversed word (holonomies compose in
    reverse of concatenation order)."""
    S, N = mats[0].shape[0], mats[0].shape[-1]
    out = np.broadcast_to(np.eye(N, dtype=np.complex128), (S, N, N)).copy()
    for g, e in reversed(list(word)):
        M = mats[g]
        P = M if e > 0 else np.swapaxes(M.conj(), -1, -2)
        for _ in range(abs(e)):
            out = out @ P
    return out


def sample_holonomy_trace(ctx: HolonomyContext, loop: Loop, config: SimConfig,
                          rng: np.random.Generator) -> complex:
    """One Monte-Carlo sample of (1/N) Tr of the loop holonomy: independent
    increments per face, multiplied along the decomposed word."""
    w = ctx.facial_word(loop)
    letters = [(g, s) for g, s in w.letters]
    if not letters:
        return 1.0 + 0j
    mats = []
    for area in ctx.areas:
        fine, _ = _increment_batch([rng], area, config, coupled=False)
        mats.append(fine)
    prod = _word_product(mats, letters)
    return complex(np.trace(prod[0]) / config.N)


def mc_compare(ctx: HolonomyContext, loop: Loop, config: SimConfig,
               chunk: int | None = None) -> TraceStats:
    """Monte-Carlo mean of the loop trace versus the exact engine."""
    import time

    t0 = time.perf_counter()
    w = ctx.facial_word(loop)
    letters = [(g, s) for g, s in w.letters]
    exact = master_trace(ctx, loop)
    coupled = config.scheme == "euler2"
    N, S = config.N, config.samples
    if chunk is None:
        chunk = max(1, min(256, int(4_000_000 / (N * N))))
    vals = np.empty(S, dtype=complex)
    for lo in range(0, S, chunk):
        hi = min(lo + chunk, S)
        rngs = [np.random.default_rng([config.seed, i]) for i in range(lo, hi)]
        fine_mats, coarse_mats = [], []
        for area in ctx.areas:
            fine, coarse = _increment_batch(rngs, area, config, coupled=coupled)
            fine_mats.append(fine)
            coarse_mats.append(coarse)
        if letters:
            tf = np.trace(_word_product(fine_mats, letters), axis1=-2, axis2=-1) / N
            if coupled:
                tc = np.trace(_word_product(coarse_mats, letters), axis1=-2, axis2=-1) / N
                vals[lo:hi] = 2.0 * tf - tc
            else:
                vals[lo:hi] = tf
        else:
            vals[lo:hi] = 1.0
    mean = complex(vals.mean())
    if S >= 2:
        stderr = float(np.sqrt(np.mean(np.abs(vals - mean) ** 2) / (S - 1)))
    else:
        stderr = 0.0
    dev = abs(mean - exact)
    sigmas = dev / stderr if stderr > 0 else (0.0 if dev == 0 else math.inf)
    return TraceStats(
        mean=mean, stderr=stderr, samples=S, exact=exact, sigmas=sigmas,
        N=N, wall_ms=(time.perf_counter() - t0) * 1000.0,
    )


@dataclass
class SupportReport:
    theta: float
    outlier_fraction: float
    samples: int
    angles: np.ndarray = dc_field(repr=False, default=None)


def spectral_support_check(config: SimConfig, t: float) -> SupportReport:
    """Eigenvalue angles of simulated increments against the zero-jump
    support arc [alpha t - theta, alpha t + theta]."""
    trip = config.triplet
    if trip.atoms:
        raise SimError("support check needs an atom-free triplet")
    arc = bm_support(trip.alpha, trip.b, t)
    chunk = max(1, min(64, int(2_000_000 / (config.N * config.N))))
    all_angles = []
    for lo in range(0, config.samples, chunk):
        hi = min(lo + chunk, config.samples)
        rngs = [np.random.default_rng([config.seed, i]) for i in range(lo, hi)]
        fine, _ = _increment_batch(rngs, t, config, coupled=False)
        for U in fine:
            all_angles.append(np.angle(np.linalg.eigvals(U)))
    angles = np.concatenate(all_angles)
    center = trip.alpha * t
    dev = np.abs((angles - center + np.pi) % (2 * np.pi) - np.pi)
    frac = float(np.mean(dev > arc.theta))
    return SupportReport(theta=arc.theta, outlier_fraction=frac,
                         samples=config.samples, angles=angles)
