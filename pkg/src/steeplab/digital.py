"""Digital probe-echo key generation over binary symmetric channels.

Bit-level protocol.  Alice broadcasts probe bits b_A; Bob receives
b_BA = b_A xor w_BA and Eve receives b_EA = b_A xor w_EA.  Bob echoes
b_r = b_s xor b_BA, embedding his secret bits b_s; the echo reaches Alice as
b_AB = b_r xor w_AB and Eve as b_EB = b_r xor w_EB.  Each side folds in what
it knows:

    bbar_AB = b_AB xor b_A  = b_s xor w_BA xor w_AB      (Alice's view)
    bbar_EB = b_EB xor b_EA = b_s xor w_EA xor w_BA xor w_EB  (Eve's view)

so both views are b_s through an effective BSC.  With the binary convolution
p * q = p(1-q) + q(1-p):

    P_A|B = P_BA * P_AB            (~ P_BA when the return channel is clean)
    P_E|B = P_EA * P_BA * P_EB     (~ P_BA + P_EA (1 - 2 P_BA))

and the per-bit secrecy rate is xi = f(P_E|B) - f(P_A|B) with f the binary
entropy in bits.  The same number is both the lower and the upper
secret-key bound for the probing data sets, which ``mac_bounds_digital``
demonstrates from an independent joint-PMF enumeration.

Lost probe packets are modeled before reordering as bits with crossover
exactly 1/2; ``reorder_bits`` then applies a shared-seed permutation so the
surviving randomness is spread uniformly and the channel can be treated as
memoryless afterwards.

``reconcile_and_amplify`` turns an episode into identical keys: Bob
discloses the syndrome of b_s under a public LDPC matrix (see
``steeplab.codes``), Alice decodes her error pattern, and both sides
Toeplitz-hash down to the target length.  Disclosure accounting: the rate
xi already charges the ideal reconciliation cost m_A f(P_A|B), so the
leakage that must come out of the key budget is the *excess* of the
disclosed syndrome bits over that ideal, and the distillable length is

    max_key_len = floor((m_A xi - leak_bits) (1 - safety_margin)).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .codes import (LdpcCode, decode_syndrome, make_ldpc, pack_bit_record,
                    syndrome_of, toeplitz_hash, unpack_bit_record)
from .params import ParamError
from .seeds import stream, subseed

__all__ = [
    "BscParams",
    "DigitalEpisode",
    "ReconcilePlan",
    "ReconcileResult",
    "validate_bsc",
    "binary_entropy",
    "bsc_convolve",
    "effective_error_rates",
    "xi_digital",
    "mac_bounds_digital",
    "run_digital_episode",
    "reorder_bits",
    "reconcile_plan",
    "reconcile_and_amplify",
]


# =====================================================================
# Parameters and elementary rate algebra
# =====================================================================

@dataclass(frozen=True)
class BscParams:
    """Crossover rates of the four binary symmetric channels plus m_A.

    P = 1/2 is allowed (it models lost packets before reordering) but the
    secrecy formulas require the effective rates to stay below 1/2.
    """

    P_BA: float = 0.1   # probing, Alice -> Bob
    P_EA: float = 0.2   # probing, Alice -> Eve
    P_AB: float = 0.0   # return, Bob -> Alice
    P_EB: float = 0.0   # return, Bob -> Eve
    m_A: int = 10_000   # probe bits per episode


def validate_bsc(bsc: BscParams) -> BscParams:
    for name in ("P_BA", "P_EA", "P_AB", "P_EB"):
        v = getattr(bsc, name)
        if not (isinstance(v, (int, float)) and math.isfinite(v) and 0.0 <= v <= 0.5):
            raise ParamError(f"{name} must lie in [0, 0.5], got {v!r}")
    if not (isinstance(bsc.m_A, (int, np.integer)) and bsc.m_A >= 1):
        raise ParamError(f"m_A must be an integer >= 1, got {bsc.m_A!r}")
    return bsc


def binary_entropy(p):
    """f(p) = -p log2 p - (1-p) log2 (1-p), elementwise, with f(0)=f(1)=0."""
    arr = np.asarray(p, dtype=np.float64)
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise ParamError("binary_entropy needs probabilities in [0, 1]")
    inner = np.where((arr > 0.0) & (arr < 1.0), arr, 0.5)
    out = np.where(
        (arr > 0.0) & (arr < 1.0),
        -(inner * np.log2(inner) + (1.0 - inner) * np.log2(1.0 - inner)),
        0.0,
    )
    return float(out) if np.isscalar(p) or np.ndim(p) == 0 else out


def bsc_convolve(p: float, q: float) -> float:
    """Crossover of two BSCs in series: p * q = p(1-q) + q(1-p)."""
    return p * (1.0 - q) + q * (1.0 - p)


def effective_error_rates(bsc: BscParams, mode: str = "exact") -> tuple[float, float]:
    """End-to-end crossover rates (P_A|B, P_E|B) of the two effective BSCs.

    ``mode="exact"`` composes all hops with the binary convolution.
    ``mode="approx"`` uses the clean-return-channel forms P_A|B = P_BA and
    P_E|B = P_BA + P_EA (1 - 2 P_BA), warning when the neglected return
    rates are not actually negligible next to P_BA.
    """
    validate_bsc(bsc)
    if mode == "exact":
        p_ab = bsc_convolve(bsc.P_BA, bsc.P_AB)
        p_eb = bsc_convolve(bsc_convolve(bsc.P_EA, bsc.P_BA), bsc.P_EB)
    elif mode == "approx":
        floor = max(bsc.P_BA, 1e-12) / 100.0
        if bsc.P_AB > floor or bsc.P_EB > floor:
            warnings.warn(
                "return-channel rates are not negligible next to P_BA; the "
                "approximate effective rates drop them, use mode='exact'",
                stacklevel=2,
            )
        p_ab = bsc.P_BA
        p_eb = bsc.P_BA + bsc.P_EA * (1.0 - 2.0 * bsc.P_BA)
    else:
        raise ParamError(f"mode must be 'exact' or 'approx', got {mode!r}")
    return float(p_ab), float(p_eb)


def xi_digital(bsc: BscParams, mode: str = "exact") -> float:
    """Per-bit secrecy rate xi = f(P_E|B) - f(P_A|B), in bits.

    Raises when P_E|B reaches 1/2 (Eve's view pure noise only happens on
    the degenerate boundary where the formula's premises fail).
    """
    p_ab, p_eb = effective_error_rates(bsc, mode=mode)
    if p_eb >= 0.5:
        raise ParamError("secrecy formula outside stated regime: P_E|B >= 1/2")
    return float(binary_entropy(p_eb) - binary_entropy(p_ab))


def mac_bounds_digital(bsc: BscParams) -> tuple[float, float]:
    """Lower and upper secret-key bounds for the probing data sets.

    The probing phase alone gives Alice b_A, Bob b_B = b_A xor w_BA, Eve
    b_EA = b_A xor w_EA.  The lower bound is computed from the closed form
    f(P_BA * P_EA) - f(P_BA); the upper bound H(b_B | b_EA) -
    H(b_B | b_A, b_EA) is evaluated by exact enumeration of the joint PMF
    over (b_A, b_B, b_EA), an independent code path.  The two coincide for
    every valid parameter set.
    """
    validate_bsc(bsc)
    xi_l = float(binary_entropy(bsc_convolve(bsc.P_BA, bsc.P_EA))
                 - binary_entropy(bsc.P_BA))

    # joint PMF over (b_A, b_B, b_EA) by direct summation
    pmf = np.zeros((2, 2, 2))
    for a in (0, 1):
        for w1 in (0, 1):
            for w2 in (0, 1):
                p = 0.5
                p *= bsc.P_BA if w1 else (1.0 - bsc.P_BA)
                p *= bsc.P_EA if w2 else (1.0 - bsc.P_EA)
                pmf[a, a ^ w1, a ^ w2] += p

    def _cond_entropy(joint: np.ndarray, target_axis: int) -> float:
        # H(target | rest) = H(all) - H(rest)
        def _h(q: np.ndarray) -> float:
            q = q[q > 0.0]
            return float(-np.sum(q * np.log2(q)))
        return _h(joint) - _h(joint.sum(axis=target_axis))

    h_b_given_ea = _cond_entropy(pmf.sum(axis=0), target_axis=0)   # over (b_B, b_EA)
    h_b_given_a_ea = _cond_entropy(pmf, target_axis=1)
    xi_u = h_b_given_ea - h_b_given_a_ea
    return xi_l, float(xi_u)


# =====================================================================
# Episodes
# =====================================================================

@dataclass(frozen=True, eq=False)
class DigitalEpisode:
    """Every bit stream of one digital run, plus keys once distilled."""

    b_A: np.ndarray      # Alice's probe bits
    b_BA: np.ndarray     # Bob's copy of the probes
    b_EA: np.ndarray     # Eve's copy of the probes
    b_s: np.ndarray      # Bob's secret bits
    b_r: np.ndarray      # Bob's echo b_s xor b_BA
    b_AB: np.ndarray     # Alice's copy of the echo
    b_EB: np.ndarray     # Eve's copy of the echo
    bbar_AB: np.ndarray  # Alice's folded view of b_s
    bbar_EB: np.ndarray  # Eve's folded view of b_s
    key_A: np.ndarray | None = None
    key_B: np.ndarray | None = None

    @property
    def m_A(self) -> int:
        return self.b_A.shape[0]

    _FIELDS = ("b_A", "b_BA", "b_EA", "b_s", "b_r", "b_AB", "b_EB",
               "bbar_AB", "bbar_EB", "key_A", "key_B")

    def to_bytes(self) -> bytes:
        """Length-prefixed binary transcript; field order is ``_FIELDS``."""
        return b"".join(pack_bit_record(getattr(self, f)) for f in self._FIELDS)

    @classmethod
    def from_bytes(cls, buf: bytes) -> "DigitalEpisode":
        fields = {}
        offset = 0
        for name in cls._FIELDS:
            bits, offset = unpack_bit_record(buf, offset)
            fields[name] = bits
        if offset != len(buf):
            raise ParamError("trailing bytes after digital episode transcript")
        for name in cls._FIELDS[:-2]:
            if fields[name] is None:
                raise ParamError(f"transcript is missing required stream {name}")
        return cls(**fields)


def _flips(rng_seed: int, role: str, n: int, p: float) -> np.ndarray:
    if p <= 0.0:
        return np.zeros(n, dtype=np.uint8)
    return (stream(rng_seed, role).random(n) < p).astype(np.uint8)


def run_digital_episode(bsc: BscParams, rng_seed: int) -> DigitalEpisode:
    """Simulate all five bit streams; deterministic in (bsc, rng_seed)."""
    validate_bsc(bsc)
    m = bsc.m_A
    b_a = stream(rng_seed, "bits_a").integers(0, 2, size=m, dtype=np.uint8)
    b_s = stream(rng_seed, "bits_s").integers(0, 2, size=m, dtype=np.uint8)
    b_ba = b_a ^ _flips(rng_seed, "w_ba", m, bsc.P_BA)
    b_ea = b_a ^ _flips(rng_seed, "w_ea", m, bsc.P_EA)
    b_r = b_s ^ b_ba
    b_ab = b_r ^ _flips(rng_seed, "w_ab", m, bsc.P_AB)
    b_eb = b_r ^ _flips(rng_seed, "w_eb", m, bsc.P_EB)
    return DigitalEpisode(
        b_A=b_a, b_BA=b_ba, b_EA=b_ea, b_s=b_s, b_r=b_r,
        b_AB=b_ab, b_EB=b_eb, bbar_AB=b_ab ^ b_a, bbar_EB=b_eb ^ b_ea,
    )


def reorder_bits(bits: np.ndarray, lost_mask: np.ndarray | None,
                 shared_seed: int,
                 fill_seed: int | None = None) -> np.ndarray:
    """Fill lost positions with fair coins, then permute by a shared seed.

    The permutation depends only on ``shared_seed``, so every party applies
    the same one.  The coin fill must differ between parties; pass each
    party its own ``fill_seed`` (required whenever anything was lost).
    ``lost_mask=None`` means nothing was lost.
    """
    bits = np.asarray(bits, dtype=np.uint8)
    if lost_mask is None:
        lost_mask = np.zeros(bits.shape, dtype=bool)
    lost = np.asarray(lost_mask, dtype=bool)
    if bits.shape != lost.shape:
        raise ParamError("bits and lost_mask must have identical shape")
    filled = bits.copy()
    n_lost = int(lost.sum())
    if n_lost:
        if fill_seed is None:
            raise ParamError("fill_seed is required when packets were lost; "
                             "each party must flip its own coins")
        filled[lost] = stream(fill_seed, "fill").integers(0, 2, size=n_lost,
                                                          dtype=np.uint8)
    perm = stream(shared_seed, "perm").permutation(bits.shape[0])
    return filled[perm]


# =====================================================================
# Reconciliation and privacy amplification
# =====================================================================

@dataclass(frozen=True)
class ReconcilePlan:
    """Disclosure accounting for one (bsc, m_A) operating point.

    ``syndrome_bits`` is what Bob will publish; ``ideal_bits`` is the
    Slepian-Wolf floor m_A f(P_A|B) already charged inside xi; ``leak_bits``
    is their difference, the only part that comes out of the key budget.
    """

    p_a_given_b: float
    p_e_given_b: float
    xi: float
    syndrome_bits: int
    ideal_bits: float
    leak_bits: float
    max_key_len: int


def reconcile_plan(bsc: BscParams, efficiency: float = 1.6,
                   safety_margin: float = 0.2) -> ReconcilePlan:
    """Size the syndrome and the distillable key for an operating point.

    ``efficiency`` multiplies the ideal disclosure f(P_A|B) per bit (1.6
    leaves the sum-product decoder far under its threshold at desk scale);
    ``safety_margin`` shrinks the final key below the information-theoretic
    budget m_A xi - leak_bits.
    """
    validate_bsc(bsc)
    if not efficiency >= 1.0:
        raise ParamError(f"efficiency must be >= 1, got {efficiency}")
    if not 0.0 <= safety_margin < 1.0:
        raise ParamError(f"safety_margin must lie in [0, 1), got {safety_margin}")
    p_ab, p_eb = effective_error_rates(bsc, mode="exact")
    xi = xi_digital(bsc, mode="exact")
    ideal = bsc.m_A * binary_entropy(p_ab)
    if p_ab == 0.0:
        syndrome_bits = 0
    else:
        syndrome_bits = min(bsc.m_A - 1, math.ceil(efficiency * ideal))
    leak = max(0.0, syndrome_bits - ideal)
    budget = bsc.m_A * xi - leak
    max_key = max(0, math.floor(budget * (1.0 - safety_margin)))
    return ReconcilePlan(
        p_a_given_b=p_ab, p_e_given_b=p_eb, xi=xi,
        syndrome_bits=syndrome_bits, ideal_bits=float(ideal),
        leak_bits=float(leak), max_key_len=max_key,
    )


@dataclass(frozen=True, eq=False)
class ReconcileResult:
    """Outcome of reconciliation plus privacy amplification."""

    key_A: np.ndarray
    key_B: np.ndarray
    leak_bits: float          # excess disclosure charged to the key budget
    syndrome_bits: int        # raw published syndrome length
    max_key_len: int
    decoder_converged: bool
    success: bool             # keys identical; failure is reported, not retried

    def keys_agree(self) -> bool:
        return bool(np.array_equal(self.key_A, self.key_B))


def reconcile_and_amplify(episode: DigitalEpisode, bsc: BscParams,
                          target_len: int, rng_seed: int,
                          efficiency: float = 1.6,
                          safety_margin: float = 0.2) -> ReconcileResult:
    """Distill identical ``target_len``-bit keys from a digital episode.

    Bob's secret b_s is the reference string.  Bob publishes its LDPC
    syndrome; Alice decodes her folded view bbar_AB against it and both
    sides hash with a public Toeplitz seed.  A key mismatch is reported via
    ``success=False``, never silently retried.
    """
    validate_bsc(bsc)
    if episode.m_A != bsc.m_A:
        raise ParamError("episode length does not match bsc.m_A")
    plan = reconcile_plan(bsc, efficiency=efficiency, safety_margin=safety_margin)
    if target_len < 1:
        raise ParamError(f"target_len must be >= 1, got {target_len}")
    if target_len > plan.max_key_len:
        raise ParamError(
            f"target_len {target_len} exceeds the distillable maximum "
            f"{plan.max_key_len} for this operating point"
        )

    if plan.syndrome_bits == 0:
        corrected = episode.bbar_AB.copy()
        converged = True
    else:
        code = make_ldpc(bsc.m_A, plan.syndrome_bits,
                         subseed(rng_seed, "ldpc"))
        syn_b = syndrome_of(code, episode.b_s)
        syn_a = syndrome_of(code, episode.bbar_AB)
        err, converged = decode_syndrome(code, syn_a ^ syn_b,
                                         plan.p_a_given_b)
        corrected = episode.bbar_AB ^ err

    hash_seed = subseed(rng_seed, "toeplitz")
    key_b = toeplitz_hash(episode.b_s, target_len, hash_seed)
    key_a = toeplitz_hash(corrected, target_len, hash_seed)
    return ReconcileResult(
        key_A=key_a, key_B=key_b,
        leak_bits=plan.leak_bits, syndrome_bits=plan.syndrome_bits,
        max_key_len=plan.max_key_len, decoder_converged=converged,
        success=bool(np.array_equal(key_a, key_b)),
    )
