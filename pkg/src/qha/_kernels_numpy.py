"""Pure-numpy kernel implementations (FFT-based, O(N^2 log N)).

All three kernels exploit that time-frequency shift conjugation acts on an
operator matrix as an index shift along the main diagonal plus a phase twist
depending only on the diagonal offset d = (row - col) mod N. Reducing to
per-diagonal cyclic correlations turns the nominally O(N^4) contractions into
batched FFTs.
"""
import numpy as np


def diag_reduce(s: np.ndarray, tch: np.ndarray) -> np.ndarray:
    """G[m, d] = sum_v tch[(v+d)%N, v] * s[(v+m)%N, (v+d+m)%N].

    The trace tr(S alpha_z(Tch)) at z=(m,n) equals sum_d G[m,d] e^{2 pi i n d/N};
    the caller applies that final transform.
    """
    n = s.shape[0]
    v = np.arange(n)
    d = v[:, None]
    bmat = tch[(v[None, :] + d) % n, v[None, :]]  # bmat[d, v]
    cmat = s[v[None, :], (v[None, :] + d) % n]    # cmat[d, u] = s[u, (u+d)%N]
    brev = bmat[:, (-v) % n]
    g = np.fft.ifft(np.fft.fft(brev, axis=1) * np.fft.fft(cmat, axis=1), axis=1)
    return np.ascontiguousarray(g.T)


def weighted_shifts(fhat: np.ndarray, s: np.ndarray) -> np.ndarray:
    """out[a, b] = (1/N) sum_m fhat[m, (a-b)%N] * s[(a-m)%N, (b-m)%N].

    fhat[m, d] = sum_n f(m, n) e^{2 pi i n d/N} is the per-row inverse
    transform of the phase-space function, precomputed by the caller.
    """
    n = s.shape[0]
    idx = np.arange(n)
    sd = s[idx[None, :], (idx[None, :] - idx[:, None]) % n]  # sd[d, u] = s[u, (u-d)%N]
    conv = np.fft.ifft(np.fft.fft(fhat, axis=0) * np.fft.fft(sd, axis=1).T, axis=0)
    out = np.empty((n, n), dtype=np.complex128)
    cols = (idx[:, None] - idx[None, :]) % n
    out[idx[:, None], cols] = conv / n
    return out


def mask_autocorr(mask: np.ndarray) -> np.ndarray:
    """Integer counts A[u] = #{z : z in mask and z-u in mask} on the torus.

    Computed by FFT and rounded; the counts are integers and the float error
    stays many orders below 0.5, so the rounding is exact.
    """
    f = np.fft.fft2(mask.astype(np.float64))
    c = np.fft.ifft2(f * np.conj(f)).real
    return np.rint(c).astype(np.int64)
