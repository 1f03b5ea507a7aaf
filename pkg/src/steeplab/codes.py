"""Bit-level machinery: syndrome code, Toeplitz hashing, bit serialization.

Reconciliation uses a systematic linear block code in syndrome form: Bob
publishes H b_s for a sparse parity-check matrix H, Alice XORs in the
syndrome of her own copy and decodes the resulting error-pattern syndrome
under a memoryless BSC prior.  The default H is a column-weight-3 regular
LDPC decoded by sum-product message passing; its check count (hence the
disclosure) is set by the caller from the target crossover rate.

Privacy amplification is seeded binary Toeplitz hashing: key = T bits mod 2
with T[i, j] = seed_bits[i - j + n - 1], a universal-hash family, applied
identically by both sides from a public seed.

Serialized bit material uses one layout everywhere: a record is a 1-byte
presence flag, and if present a little-endian uint32 bit count followed by
ceil(count / 8) bytes packed LSB-first.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .params import ParamError
from .seeds import stream

__all__ = [
    "LdpcCode",
    "make_ldpc",
    "syndrome_of",
    "decode_syndrome",
    "toeplitz_hash",
    "pack_bit_record",
    "unpack_bit_record",
    "hexdump",
]


# =====================================================================
# LDPC syndrome code
# =====================================================================

@dataclass(frozen=True, eq=False)
class LdpcCode:
    """Sparse parity-check matrix in edge-list form, sorted by check.

    ``chk[e]`` / ``var[e]`` give the check and variable of edge e; edges are
    grouped by check and ``ptr`` holds the first edge of each check, so
    per-check reductions run via ``reduceat``.
    """

    n_bits: int
    n_checks: int
    chk: np.ndarray
    var: np.ndarray
    ptr: np.ndarray


def make_ldpc(n_bits: int, n_checks: int, rng_seed: int,
              col_weight: int = 3) -> LdpcCode:
    """Random regular-column-weight LDPC with near-uniform check degrees.

    Columns never repeat a check (no double edges), which removes the
    dominant short-cycle failure mode at desk scale.
    """
    if not (1 <= n_checks < n_bits):
        raise ParamError(f"need 1 <= n_checks < n_bits, got {n_checks}, {n_bits}")
    if col_weight > n_checks:
        raise ParamError("col_weight cannot exceed n_checks")
    rng = stream(rng_seed, "code")
    total = col_weight * n_bits
    base, extra = divmod(total, n_checks)
    row_w = np.full(n_checks, base, dtype=np.int64)
    row_w[:extra] += 1
    sockets = np.repeat(np.arange(n_checks, dtype=np.int64), row_w)
    rng.shuffle(sockets)
    cols = sockets.reshape(n_bits, col_weight)

    # repair columns that drew the same check twice by swapping sockets
    # with a random other column until all columns are duplicate-free
    for _ in range(200):
        srt = np.sort(cols, axis=1)
        bad = np.flatnonzero(np.any(srt[:, 1:] == srt[:, :-1], axis=1))
        if bad.size == 0:
            break
        for j in bad:
            row = cols[j]
            seen: set[int] = set()
            for slot in range(col_weight):
                if int(row[slot]) in seen:
                    k = int(rng.integers(n_bits))
                    other = int(rng.integers(col_weight))
                    row[slot], cols[k, other] = cols[k, other], row[slot]
                else:
                    seen.add(int(row[slot]))
    else:
        raise ParamError("could not build a duplicate-free parity structure; "
                         "lower col_weight or raise n_checks")

    var = np.repeat(np.arange(n_bits, dtype=np.int64), col_weight)
    chk = cols.reshape(-1)
    order = np.argsort(chk, kind="stable")
    chk, var = chk[order], var[order]
    counts = np.bincount(chk, minlength=n_checks)
    ptr = np.concatenate(([0], np.cumsum(counts)))[:-1]
    return LdpcCode(n_bits=n_bits, n_checks=n_checks, chk=chk, var=var, ptr=ptr)


def syndrome_of(code: LdpcCode, bits: np.ndarray) -> np.ndarray:
    """H bits mod 2 as a uint8 vector of length n_checks."""
    bits = np.asarray(bits, dtype=np.int64)
    sums = np.bincount(code.chk, weights=bits[code.var].astype(np.float64),
                       minlength=code.n_checks)
    return (sums.astype(np.int64) & 1).astype(np.uint8)


def decode_syndrome(code: LdpcCode, syndrome: np.ndarray, p: float,
                    max_iter: int = 100) -> tuple[np.ndarray, bool]:
    """Sum-product estimate of the error pattern with H e = syndrome.

    ``p`` is the BSC crossover prior on each error bit.  Returns the
    hard-decision pattern and a flag telling whether it reproduces the
    syndrome (the usual convergence criterion).
    """
    if not 0.0 < p < 0.5:
        raise ParamError(f"decoder prior must lie in (0, 0.5), got {p}")
    syndrome = np.asarray(syndrome, dtype=np.uint8)
    if syndrome.shape != (code.n_checks,):
        raise ParamError("syndrome length does not match the code")
    llr0 = float(np.log((1.0 - p) / p))
    sgn_syn = (1.0 - 2.0 * syndrome.astype(np.float64))[code.chk]
    m_v2c = np.full(code.var.shape[0], llr0)
    e_hat = np.zeros(code.n_bits, dtype=np.uint8)
    for it in range(max_iter):
        t = np.tanh(np.clip(m_v2c, -30.0, 30.0) / 2.0)
        sign = np.where(t >= 0.0, 1.0, -1.0)
        t = sign * np.clip(np.abs(t), 1e-12, 1.0 - 1e-15)
        prod = np.multiply.reduceat(t, code.ptr)
        ext = np.clip(prod[code.chk] / t, -(1.0 - 1e-15), 1.0 - 1e-15)
        m_c2v = 2.0 * np.arctanh(ext) * sgn_syn
        post = llr0 + np.bincount(code.var, weights=m_c2v, minlength=code.n_bits)
        m_v2c = post[code.var] - m_c2v
        e_hat = (post < 0.0).astype(np.uint8)
        if np.array_equal(syndrome_of(code, e_hat), syndrome):
            return e_hat, True
    return e_hat, False


# =====================================================================
# Toeplitz hashing
# =====================================================================

def toeplitz_hash(bits: np.ndarray, out_len: int, hash_seed: int) -> np.ndarray:
    """Compress ``bits`` to ``out_len`` bits with a seeded Toeplitz matrix.

    T[i, j] = seed_bits[i - j + n - 1] over n + out_len - 1 fair seed bits,
    key = T bits mod 2.  Same (bits, out_len, hash_seed) always gives the
    same key; over random seeds flipping any single input bit flips each
    output bit with probability 1/2.
    """
    bits = np.asarray(bits, dtype=np.uint8)
    n = bits.shape[0]
    if out_len < 0:
        raise ParamError(f"out_len must be >= 0, got {out_len}")
    if out_len == 0:
        return np.zeros(0, dtype=np.uint8)
    if n == 0:
        raise ParamError("cannot hash an empty bit vector to a nonzero length")
    if out_len > n:
        raise ParamError(f"hash must compress: out_len {out_len} exceeds "
                         f"input length {n}")
    seed_bits = stream(hash_seed, "hash").integers(0, 2, size=n + out_len - 1,
                                                   dtype=np.uint8)
    # row i of T is seed_bits[i : i + n] reversed; build all rows as one
    # strided window then take the parity of the weighted row sums
    windows = np.lib.stride_tricks.sliding_window_view(seed_bits, n)[:out_len]
    acc = windows[:, ::-1].astype(np.float64) @ bits.astype(np.float64)
    return (acc.astype(np.int64) & 1).astype(np.uint8)


# =====================================================================
# Bit-array serialization
# =====================================================================

def pack_bit_record(bits: np.ndarray | None) -> bytes:
    """One serialized record: presence byte, uint32 bit count, packed bits."""
    if bits is None:
        return b"\x00"
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.ndim != 1:
        raise ParamError("bit records are one-dimensional")
    packed = np.packbits(bits, bitorder="little").tobytes()
    return b"\x01" + struct.pack("<I", bits.shape[0]) + packed


def unpack_bit_record(buf: bytes, offset: int = 0) -> tuple[np.ndarray | None, int]:
    """Inverse of ``pack_bit_record``; returns (bits, next_offset)."""
    if offset >= len(buf):
        raise ParamError("truncated bit record: missing presence byte")
    flag = buf[offset]
    offset += 1
    if flag == 0:
        return None, offset
    if flag != 1:
        raise ParamError(f"bad presence byte {flag!r} in bit record")
    if offset + 4 > len(buf):
        raise ParamError("truncated bit record: missing length")
    (count,) = struct.unpack_from("<I", buf, offset)
    offset += 4
    nbytes = (count + 7) // 8
    if offset + nbytes > len(buf):
        raise ParamError("truncated bit record: missing payload")
    raw = np.frombuffer(buf, dtype=np.uint8, count=nbytes, offset=offset)
    bits = np.unpackbits(raw, count=count, bitorder="little").astype(np.uint8)
    return bits, offset + nbytes


def hexdump(data: bytes, width: int = 32) -> str:
    """Plain hex rendering, ``width`` bytes per line."""
    hexstr = data.hex()
    step = 2 * width
    return "\n".join(hexstr[i:i + step] for i in range(0, len(hexstr), step))
