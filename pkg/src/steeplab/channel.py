"""Analog signal simulation: channel draws, the probing phase, and the echo.

Signal model, per probe index k (all noises circular complex Gaussian,
independent across k and across roles):

    probing (Alice -> everyone)
        y_B(k) = h_BA x_A(k) + w_B(k)                 at Bob
        e_A(k) = g_A x_A(k) + w_EA(k)                 at Eve, n_E antennas

    echo (Bob -> everyone, high-quality unit-gain return path)
        r(k)    = y_B(k) + s(k)                       Bob embeds his secret
        y_AB(k) = r(k) + v_A(k)                       at Alice
        y_EB(k) = r(k) + v_E(k)                       at Eve

The probing gains (h_AB, h_BA) are jointly Gaussian with unit variances and
cross-correlation rho; Eve's gain vectors g_A, g_B are i.i.d. CN(0, 1).  The
return path carries no fading: the echo is assumed to ride a strong channel
(e.g. beamformed or wired feedback), leaving only additive noise eps_A/eps_E.

Episodes are immutable value objects.  Identical ``(params, rng_seed)``
reproduce identical episodes bit for bit.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .params import ChannelRealization, ParamError, SystemParams, validate
from .seeds import stream

__all__ = [
    "SimulationError",
    "AnalogEpisode",
    "cnormal",
    "sample_channels",
    "sample_channel_batch",
    "run_probing",
    "run_echo",
    "simulate_episode",
    "episode_to_csv",
    "EPISODE_CSV_COLUMNS",
]


class SimulationError(RuntimeError):
    """A simulator was asked to run outside its physical preconditions."""


def cnormal(rng: np.random.Generator, shape, var: float) -> np.ndarray:
    """CN(0, var) samples: real and imaginary parts each of variance var/2."""
    scale = np.sqrt(var / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


# =====================================================================
# Channel sampling
# =====================================================================

def sample_channels(params: SystemParams, rng_seed: int) -> ChannelRealization:
    """Draw one joint realization of every channel gain.

    h_AB ~ CN(0,1) and h_BA = conj(rho) h_AB + sqrt(1-|rho|^2) w with
    w ~ CN(0,1), which gives E{h_AB conj(h_BA)} = rho exactly.
    """
    validate(params)
    rng = stream(rng_seed, "channels")
    h_AB = complex(cnormal(rng, (), 1.0))
    w = complex(cnormal(rng, (), 1.0))
    rho = complex(params.rho)
    h_BA = np.conj(rho) * h_AB + np.sqrt(1.0 - abs(rho) ** 2) * w
    g_A = cnormal(rng, (params.n_E,), 1.0)
    g_B = cnormal(rng, (params.n_E,), 1.0)
    return ChannelRealization(h_AB=h_AB, h_BA=complex(h_BA), g_A=g_A, g_B=g_B)


def sample_channel_batch(params: SystemParams, rng_seed: int, n_draws: int):
    """Vectorized channel draws for Monte Carlo averaging.

    Returns:
        tuple ``(h_AB, h_BA, g_A, g_B)`` with shapes (n,), (n,), (n, n_E),
        (n, n_E).  The batch for a given ``(params, rng_seed, n_draws)`` is
        deterministic.
    """
    validate(params)
    if n_draws < 1:
        raise ParamError(f"n_draws must be >= 1, got {n_draws}")
    rng = stream(rng_seed, "channels")
    h_AB = cnormal(rng, (n_draws,), 1.0)
    w = cnormal(rng, (n_draws,), 1.0)
    rho = complex(params.rho)
    h_BA = np.conj(rho) * h_AB + np.sqrt(1.0 - abs(rho) ** 2) * w
    g_A = cnormal(rng, (n_draws, params.n_E), 1.0)
    g_B = cnormal(rng, (n_draws, params.n_E), 1.0)
    return h_AB, h_BA, g_A, g_B


# =====================================================================
# Episodes
# =====================================================================

@dataclass(frozen=True, eq=False)
class AnalogEpisode:
    """All signals of one probe-echo run.

    ``run_probing`` fills the probing fields and leaves the echo fields
    ``None``; ``run_echo`` completes them.  Arrays indexed by probe k have
    length m_A; ``e_A`` has shape (n_E, m_A).
    """

    realization: ChannelRealization
    x_A: np.ndarray          # Alice's probes, i.i.d. CN(0, p_A)
    y_B: np.ndarray          # Bob's probing observation
    e_A: np.ndarray          # Eve's probing observation, one row per antenna
    s: np.ndarray | None = None      # Bob's secret sequence, CN(0, sigma_s2)
    r: np.ndarray | None = None      # Bob's echo y_B + s
    y_AB: np.ndarray | None = None   # Alice's return observation
    y_EB: np.ndarray | None = None   # Eve's return observation

    @property
    def m_A(self) -> int:
        return self.x_A.shape[0]

    @property
    def complete(self) -> bool:
        return self.y_AB is not None


def run_probing(params: SystemParams, realization: ChannelRealization,
                rng_seed: int) -> AnalogEpisode:
    """Phase 1: Alice sends m_A probes; Bob and Eve listen."""
    validate(params)
    realization.check_for(params)
    if params.m_A < 1:
        raise SimulationError("nothing to probe: m_A must be >= 1")
    m = params.m_A
    x_A = cnormal(stream(rng_seed, "probe"), (m,), params.p_A)
    w_B = cnormal(stream(rng_seed, "noise_b"), (m,), params.sigma_B2)
    y_B = realization.h_BA * x_A + w_B
    w_EA = cnormal(stream(rng_seed, "noise_ea"), (params.n_E, m), params.sigma_EA2)
    e_A = np.outer(realization.g_A, x_A) + w_EA
    return AnalogEpisode(realization=realization, x_A=x_A, y_B=y_B, e_A=e_A)


def run_echo(params: SystemParams, episode: AnalogEpisode,
             rng_seed: int) -> AnalogEpisode:
    """Phase 2: Bob echoes his probing observation with the secret added.

    Requires strictly positive return-path noise: eps_A = eps_E = 0 would be
    a noiseless feedback channel, which the model excludes.
    """
    validate(params)
    if episode.complete:
        raise SimulationError("episode already contains an echo phase")
    if not (params.eps_A > 0 and params.eps_E > 0):
        raise SimulationError("run_echo requires eps_A > 0 and eps_E > 0")
    m = episode.m_A
    s = cnormal(stream(rng_seed, "secret"), (m,), params.sigma_s2)
    r = episode.y_B + s
    v_A = cnormal(stream(rng_seed, "noise_va"), (m,), params.eps_A)
    v_E = cnormal(stream(rng_seed, "noise_ve"), (m,), params.eps_E)
    return replace(episode, s=s, r=r, y_AB=r + v_A, y_EB=r + v_E)


def simulate_episode(params: SystemParams, rng_seed: int) -> AnalogEpisode:
    """Sample channels, probe, and echo under one seed.

    Each stage derives its own role-tagged streams from ``rng_seed``, so the
    result is identical to calling the three stages with the same seed.
    """
    realization = sample_channels(params, rng_seed)
    episode = run_probing(params, realization, rng_seed)
    return run_echo(params, episode, rng_seed)


# =====================================================================
# Serialization
# =====================================================================

#: Fixed column order of the episode CSV.  One row per probe index k; complex
#: signals are split into _re/_im pairs; Eve's antennas appear as e_A{i}_re,
#: e_A{i}_im for i = 0 .. n_E-1 after the scalar signals.
EPISODE_CSV_COLUMNS = (
    "k",
    "x_A_re", "x_A_im",
    "y_B_re", "y_B_im",
    "s_re", "s_im",
    "r_re", "r_im",
    "y_AB_re", "y_AB_im",
    "y_EB_re", "y_EB_im",
)


def episode_to_csv(episode: AnalogEpisode, path: str | Path | None = None) -> str:
    """Render an episode as columnar CSV text (and optionally write it).

    Incomplete episodes leave the echo columns empty.  Floats use repr-level
    precision, so equal episodes serialize to byte-identical text.
    """
    n_e = np.asarray(episode.realization.g_A).shape[0]
    header = list(EPISODE_CSV_COLUMNS)
    for i in range(n_e):
        header += [f"e_A{i}_re", f"e_A{i}_im"]

    def cols(z: np.ndarray | None, k: int) -> list[str]:
        if z is None:
            return ["", ""]
        return [repr(float(z[k].real)), repr(float(z[k].imag))]

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for k in range(episode.m_A):
        row = [str(k)]
        for sig in (episode.x_A, episode.y_B, episode.s, episode.r,
                    episode.y_AB, episode.y_EB):
            row += cols(sig, k)
        for i in range(n_e):
            row += cols(episode.e_A[i], k)
        writer.writerow(row)
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text
