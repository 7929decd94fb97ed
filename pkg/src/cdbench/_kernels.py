"""Numba kernels for in-place statevector work.

All state arrays are flat complex128, little-endian: bit k of the basis
index is qubit k. Rotation kernels implement exp(-i*angle*P/2) products
directly on index pairs/strides; no operator matrices are ever formed.

Fused variants apply a run of mutually commuting rotations in one pass:
a diagonal run (Z-only generators) or a run whose generators all flip the
same qubit. The per-element rotation angle is the signed sum of the gate
angles, which is exact because commuting generators act in the same
two-amplitude plane. Phase tables for those sums are built by doubling
over the participating bits so the hot loops stay trig-free.
"""

import numba
import numpy as np


@numba.njit(inline="always")
def _parity(v):
    # parity of a mask-limited int (n <= 30 bits)
    v ^= v >> 16
    v ^= v >> 8
    v ^= v >> 4
    v ^= v >> 2
    v ^= v >> 1
    return v & 1


@numba.njit(cache=True)
def rot_diag(psi, zmasks, angles):
    """Apply prod_k exp(-i*angles[k]*P_k/2) for diagonal P_k = Z...Z on zmasks[k].

    General fallback: per-element parity against every mask. Fine for a few
    gates; the engine uses diag_pair_block for large all-pair cost blocks.
    """
    n_states = psi.size
    n_gates = zmasks.size
    for z in range(n_states):
        t = 0.0
        for k in range(n_gates):
            if _parity(z & zmasks[k]):
                t -= angles[k]
            else:
                t += angles[k]
        half = 0.5 * t
        psi[z] *= complex(np.cos(half), -np.sin(half))


@numba.njit(cache=True)
def rot_flip(psi, flip_bit, is_y, zmasks, angles):
    """General commuting run of rotations that all flip flip_bit.

    Generator k is (Y if is_y else X) on flip_bit times Z on zmasks[k]
    (zmasks[k] excludes flip_bit). Amplitude pairs differ in flip_bit only.
    """
    stride = np.int64(1) << flip_bit
    n_states = psi.size
    n_gates = zmasks.size
    for base in range(0, n_states, 2 * stride):
        for off in range(stride):
            za = base + off
            zb = za + stride
            t = 0.0
            for k in range(n_gates):
                if _parity(za & zmasks[k]):
                    t -= angles[k]
                else:
                    t += angles[k]
            half = 0.5 * t
            c = np.cos(half)
            s = np.sin(half)
            a = psi[za]
            b = psi[zb]
            if is_y:
                psi[za] = c * a - s * b
                psi[zb] = s * a + c * b
            else:
                psi[za] = c * a - 1j * (s * b)
                psi[zb] = c * b - 1j * (s * a)


@numba.njit(cache=True)
def rot_flip_high(psi, n, flip_bit, is_y, hi_bits, angles):
    """Fast path of rot_flip when every Z tail sits on bits above flip_bit.

    Gate k is (Y|X)_flip_bit * Z_{hi_bits[k]} with hi_bits[k] > flip_bit
    (hi_bits sorted ascending; an empty hi_bits means one bare rotation with
    angles[0]). The summed rotation angle only depends on the bits above
    flip_bit, so cos/sin come from a doubling-built table with one complex
    entry per high-bit pattern and the sweep itself is trig-free.
    """
    stride = np.int64(1) << flip_bit
    n_states = psi.size
    n_gates = hi_bits.size
    if n_gates == 0:
        half = 0.5 * angles[0]
        c0 = np.cos(half)
        s0 = np.sin(half)
        for base in range(0, n_states, 2 * stride):
            for off in range(stride):
                za = base + off
                zb = za + stride
                a = psi[za]
                b = psi[zb]
                if is_y:
                    psi[za] = c0 * a - s0 * b
                    psi[zb] = s0 * a + c0 * b
                else:
                    psi[za] = c0 * a - 1j * (s0 * b)
                    psi[zb] = c0 * b - 1j * (s0 * a)
        return

    # W[h] = exp(i/2 * sum_k angles[k] * s_{hi_bits[k]}), h = bits above flip_bit
    n_hi = n - flip_bit - 1
    table = np.empty(np.int64(1) << n_hi, dtype=np.complex128)
    table[0] = 1.0 + 0.0j
    cur = np.int64(1)
    g = 0
    for bit in range(flip_bit + 1, n):
        if g < n_gates and hi_bits[g] == bit:
            half = 0.5 * angles[g]
            u = complex(np.cos(half), np.sin(half))
            g += 1
            for h in range(cur):
                w = table[h]
                table[cur + h] = w * np.conj(u)
                table[h] = w * u
        else:
            for h in range(cur):
                table[cur + h] = table[h]
        cur <<= 1

    for base in range(0, n_states, 2 * stride):
        w = table[base >> (flip_bit + 1)]
        c = w.real
        s = w.imag
        for off in range(stride):
            za = base + off
            zb = za + stride
            a = psi[za]
            b = psi[zb]
            if is_y:
                psi[za] = c * a - s * b
                psi[zb] = s * a + c * b
            else:
                psi[za] = c * a - 1j * (s * b)
                psi[zb] = c * b - 1j * (s * a)


@numba.njit(cache=True)
def diag_pair_block(psi, n, right_ptr, lefts, angles):
    """Apply prod_k exp(-i*angles[k]*Z_i Z_j / 2) for a block of pair couplings.

    CSR layout by the higher qubit: pairs with right qubit r occupy
    lefts[right_ptr[r]:right_ptr[r+1]] (left qubit) and the matching angles.
    The summed angle table T(z) is built by doubling over qubits, then the
    diagonal phase cis(-T/2) is applied in one pass.
    """
    n_states = psi.size
    t_table = np.zeros(n_states, dtype=np.float64)
    cur = np.int64(1)
    for r in range(n):
        lo = right_ptr[r]
        hi = right_ptr[r + 1]
        if hi > lo:
            for h in range(cur):
                acc = 0.0
                for k in range(lo, hi):
                    if (h >> lefts[k]) & 1:
                        acc -= angles[k]
                    else:
                        acc += angles[k]
                t_table[cur + h] = t_table[h] - acc
                t_table[h] += acc
        else:
            for h in range(cur):
                t_table[cur + h] = t_table[h]
        cur <<= 1
    for z in range(n_states):
        half = 0.5 * t_table[z]
        psi[z] *= complex(np.cos(half), -np.sin(half))


@numba.njit(cache=True)
def apply_pauli_kernel(src, dst, xmask, pmask):
    """dst = P src up to the constant i**n_y factor (applied by the caller).

    P maps |z> to phase(z)|z ^ xmask> with
    phase(z) = i**n_y * (-1)**parity(z & pmask), pmask = ymask | zmask.
    """
    n_states = src.size
    for z in range(n_states):
        if _parity(z & pmask):
            dst[z ^ xmask] = -src[z]
        else:
            dst[z ^ xmask] = src[z]


@numba.njit(cache=True)
def bilinear_pauli(lam, psi, xmask, pmask):
    """<lam|P|psi> up to the i**n_y factor (applied by the caller)."""
    n_states = psi.size
    acc = 0.0j
    for z in range(n_states):
        term = np.conj(lam[z ^ xmask]) * psi[z]
        if _parity(z & pmask):
            acc -= term
        else:
            acc += term
    return acc


@numba.njit(cache=True)
def sk_energies(n, left, right, coupling):
    """Classical energies -sum J_ij s_i s_j for every bitstring, spin +1 for bit 0."""
    n_states = np.int64(1) << n
    n_pairs = left.size
    out = np.empty(n_states, dtype=np.float64)
    for z in range(n_states):
        e = 0.0
        for k in range(n_pairs):
            if ((z >> left[k]) ^ (z >> right[k])) & 1:
                e += coupling[k]
            else:
                e -= coupling[k]
        out[z] = e
    return out


@numba.njit(cache=True)
def zz_expectation(psi, left, right, coupling):
    """<psi| -sum J_ij Z_i Z_j |psi> in one pass, no 2**n energy table."""
    n_pairs = left.size
    acc = 0.0
    for z in range(psi.size):
        a = psi[z]
        prob = a.real * a.real + a.imag * a.imag
        e = 0.0
        for k in range(n_pairs):
            if ((z >> left[k]) ^ (z >> right[k])) & 1:
                e += coupling[k]
            else:
                e -= coupling[k]
        acc += prob * e
    return acc


@numba.njit(cache=True)
def diag_expectation(diag, psi):
    """sum_z diag[z] * |psi[z]|^2."""
    acc = 0.0
    for z in range(psi.size):
        a = psi[z]
        acc += diag[z] * (a.real * a.real + a.imag * a.imag)
    return acc
