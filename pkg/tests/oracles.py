"""Independent brute-force reference implementations.

Everything here is written as plain loops (or, for the DFT, the literal
transform definition) so the library's vectorized paths can be checked
against a second, independently derived answer on small images.
"""

import math
from collections import deque

import numpy as np


def _clamp(i: int, lo: int, hi: int) -> int:
    return max(lo, min(hi, i))


def gray_oracle(rgb: np.ndarray) -> np.ndarray:
    h, w, _ = rgb.shape
    out = np.zeros((h, w), dtype=np.uint8)
    for r in range(h):
        for c in range(w):
            rr, gg, bb = (float(v) for v in rgb[r, c])
            y = 0.299 * rr + 0.587 * gg + 0.114 * bb
            out[r, c] = _clamp(int(math.floor(y + 0.5)), 0, 255)
    return out


def convolve3_oracle(gray: np.ndarray, kernel) -> np.ndarray:
    h, w = gray.shape
    k = [[float(kernel[i][j]) for j in range(3)] for i in range(3)]
    out = np.zeros((h, w), dtype=np.float64)
    for r in range(h):
        for c in range(w):
            acc = 0.0
            for i in range(3):
                for j in range(3):
                    acc += k[i][j] * float(
                        gray[_clamp(r + i - 1, 0, h - 1), _clamp(c + j - 1, 0, w - 1)]
                    )
            out[r, c] = acc
    return out


def median3_oracle(gray: np.ndarray) -> np.ndarray:
    h, w = gray.shape
    out = np.zeros((h, w), dtype=np.uint8)
    for r in range(h):
        for c in range(w):
            window = sorted(
                gray[_clamp(r + i, 0, h - 1), _clamp(c + j, 0, w - 1)]
                for i in (-1, 0, 1)
                for j in (-1, 0, 1)
            )
            out[r, c] = window[4]
    return out


def erode_oracle(gray: np.ndarray, side: int) -> np.ndarray:
    h, w = gray.shape
    half = side // 2
    out = np.zeros((h, w), dtype=np.uint8)
    for r in range(h):
        for c in range(w):
            out[r, c] = min(
                gray[_clamp(r + i, 0, h - 1), _clamp(c + j, 0, w - 1)]
                for i in range(-half, half + 1)
                for j in range(-half, half + 1)
            )
    return out


def histogram_oracle(gray: np.ndarray) -> np.ndarray:
    counts = np.zeros(256, dtype=np.int64)
    for v in gray.ravel():
        counts[int(v)] += 1
    return counts


def dft_magnitude_oracle(gray: np.ndarray) -> np.ndarray:
    # Literal transform definition, evaluated as two matrix products.
    m, n = gray.shape
    u = np.arange(m).reshape(-1, 1)
    k = np.arange(m).reshape(1, -1)
    left = np.exp(-2j * np.pi * u * k / m)
    l_idx = np.arange(n).reshape(-1, 1)
    v = np.arange(n).reshape(1, -1)
    right = np.exp(-2j * np.pi * l_idx * v / n)
    return np.abs(left @ gray.astype(np.float64) @ right)


LAPLACIAN = ((0.0, 1.0, 0.0), (1.0, -4.0, 1.0), (0.0, 1.0, 0.0))
SOBEL_X = ((-1.0, 0.0, 1.0), (-2.0, 0.0, 2.0), (-1.0, 0.0, 1.0))
SOBEL_Y = ((-1.0, -2.0, -1.0), (0.0, 0.0, 0.0), (1.0, 2.0, 1.0))


def lapvar_oracle(gray: np.ndarray) -> float:
    resp = convolve3_oracle(gray, LAPLACIAN)
    values = resp.ravel().tolist()
    mean = sum(values) / len(values)
    return sum((v - mean) ** 2 for v in values) / (len(values) - 1)


def tenengrad_oracle(gray: np.ndarray) -> float:
    gx = convolve3_oracle(gray, SOBEL_X)
    gy = convolve3_oracle(gray, SOBEL_Y)
    total = 0.0
    for a, b in zip(gx.ravel().tolist(), gy.ravel().tolist()):
        total += a * a + b * b
    return total / gray.size


def fft_energy_oracle(gray: np.ndarray) -> float:
    mag = dft_magnitude_oracle(gray)
    return float(sum(math.log1p(v) for v in mag.ravel().tolist()) / gray.size)


def noise_oracle(gray: np.ndarray) -> float:
    med = median3_oracle(gray)
    total = 0.0
    for a, b in zip(gray.ravel().tolist(), med.ravel().tolist()):
        total += (float(a) - float(b)) ** 2
    return math.sqrt(total / gray.size)


def exposure_oracle(gray: np.ndarray, t_under: int = 30, t_over: int = 225):
    counts = histogram_oracle(gray)
    n = gray.size
    under = 100.0 * sum(int(counts[k]) for k in range(0, t_under)) / n
    over = 100.0 * sum(int(counts[k]) for k in range(t_over + 1, 256)) / n
    return under, over


def haze_oracle(rgb: np.ndarray, side: int = 15) -> float:
    h, w, _ = rgb.shape
    dark = np.zeros((h, w), dtype=np.uint8)
    for r in range(h):
        for c in range(w):
            dark[r, c] = min(int(rgb[r, c, 0]), int(rgb[r, c, 1]), int(rgb[r, c, 2]))
    eroded = erode_oracle(dark, side)
    return float(sum(int(v) for v in eroded.ravel()) / eroded.size)


def _gauss5_kernel():
    vals = [math.exp(-(d * d) / 2.0) for d in (-2, -1, 0, 1, 2)]
    k = [[a * b for b in vals] for a in vals]
    total = sum(sum(row) for row in k)
    return [[v / total for v in row] for row in k]


def edge_density_oracle(gray: np.ndarray, t_low: float = 100.0, t_high: float = 200.0) -> float:
    """Loop-based Canny: 5x5 Gaussian (sigma 1), Sobel, L2 magnitude,
    4-direction NMS with ties kept, double threshold (strict >), BFS
    hysteresis over 8-neighbours."""
    h, w = gray.shape

    k5 = _gauss5_kernel()
    smoothed = np.zeros((h, w), dtype=np.float64)
    for r in range(h):
        for c in range(w):
            acc = 0.0
            for i in range(5):
                for j in range(5):
                    acc += k5[i][j] * float(
                        gray[_clamp(r + i - 2, 0, h - 1), _clamp(c + j - 2, 0, w - 1)]
                    )
            smoothed[r, c] = acc

    gx = np.zeros((h, w))
    gy = np.zeros((h, w))
    for r in range(h):
        for c in range(w):
            ax = ay = 0.0
            for i in range(3):
                for j in range(3):
                    val = smoothed[_clamp(r + i - 1, 0, h - 1), _clamp(c + j - 1, 0, w - 1)]
                    ax += SOBEL_X[i][j] * val
                    ay += SOBEL_Y[i][j] * val
            gx[r, c] = ax
            gy[r, c] = ay

    mag = np.sqrt(gx * gx + gy * gy)
    nms = np.zeros((h, w))
    for r in range(h):
        for c in range(w):
            angle = math.degrees(math.atan2(gy[r, c], gx[r, c])) % 180.0
            if angle < 22.5 or angle >= 157.5:
                d1, d2 = (0, 1), (0, -1)
            elif angle < 67.5:
                d1, d2 = (1, 1), (-1, -1)
            elif angle < 112.5:
                d1, d2 = (1, 0), (-1, 0)
            else:
                d1, d2 = (1, -1), (-1, 1)
            n1 = mag[_clamp(r + d1[0], 0, h - 1), _clamp(c + d1[1], 0, w - 1)]
            n2 = mag[_clamp(r + d2[0], 0, h - 1), _clamp(c + d2[1], 0, w - 1)]
            if mag[r, c] >= n1 and mag[r, c] >= n2:
                nms[r, c] = mag[r, c]

    candidate = nms > t_low
    strong = nms > t_high
    edges = np.zeros((h, w), dtype=bool)
    queue = deque((r, c) for r in range(h) for c in range(w) if strong[r, c])
    edges[strong] = True
    while queue:
        r, c = queue.popleft()
        for dr in (-1, 0, 1):
            for dc in (-1, 0, 1):
                rr, cc = r + dr, c + dc
                if 0 <= rr < h and 0 <= cc < w and candidate[rr, cc] and not edges[rr, cc]:
                    edges[rr, cc] = True
                    queue.append((rr, cc))
    return float(edges.sum() / edges.size)


def gaussian_blur_oracle(rgb: np.ndarray, sigma: float) -> np.ndarray:
    """Direct (non-separable) 2-D Gaussian sum with replicated borders."""
    radius = math.ceil(3.0 * sigma)
    taps = range(-radius, radius + 1)
    k = [
        [math.exp(-(i * i + j * j) / (2.0 * sigma * sigma)) for j in taps]
        for i in taps
    ]
    total = sum(sum(row) for row in k)
    k = [[v / total for v in row] for row in k]
    h, w, ch = rgb.shape
    out = np.zeros((h, w, ch), dtype=np.uint8)
    for r in range(h):
        for c in range(w):
            for b in range(ch):
                acc = 0.0
                for i, row in zip(taps, k):
                    for j, kv in zip(taps, row):
                        acc += kv * float(
                            rgb[_clamp(r + i, 0, h - 1), _clamp(c + j, 0, w - 1), b]
                        )
                out[r, c, b] = _clamp(int(math.floor(acc + 0.5)), 0, 255)
    return out
