"""Geometry-based beam prediction and multi-beam power-transfer evaluation.

Channel vectors are predicted per image source from estimated geometry,
combined into maximum-ratio beams, and the relative phases of the beams
are tuned against channel feedback to maximize the delivered path gain.
A reciprocity-style benchmark (conjugate weights on the true channel)
provides the upper bound.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .channel import (ISOTROPIC, AntennaModel, DegenerateGeometryError,
                      channel_vector, db10, path_gain_db, received_phasor,
                      smc_channel_vector)
from .geometry import MirrorSource, as_point

_INVPHI = (np.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class PredictedChannel:
    """Per-source channel vectors and their superposition at one frequency."""

    h_total: np.ndarray
    per_smc: tuple
    f_c: float
    ue: np.ndarray

    def __post_init__(self):
        total = np.asarray(self.h_total, dtype=complex)
        parts = tuple(np.asarray(h, dtype=complex) for h in self.per_smc)
        if not parts:
            raise ValueError("need at least one per-source vector")
        s = parts[0].copy()
        for h in parts[1:]:
            s = s + h
        if np.linalg.norm(total - s) > 1e-12 * max(np.linalg.norm(total), 1e-300):
            raise ValueError("h_total must equal the sum of the per-source vectors")
        object.__setattr__(self, "h_total", total)
        object.__setattr__(self, "per_smc", parts)

    @property
    def n_sources(self) -> int:
        return len(self.per_smc)


@dataclass(frozen=True)
class BeamWeights:
    """Composed unit beamforming weights plus the per-source beams."""

    w: np.ndarray
    per_smc_w: tuple

    def __post_init__(self):
        w = np.asarray(self.w, dtype=complex)
        if abs(np.linalg.norm(w) - 1.0) > 1e-9:
            raise ValueError("composed weights must be unit norm")
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "per_smc_w",
                           tuple(np.asarray(v, dtype=complex) for v in self.per_smc_w))


@dataclass(frozen=True)
class WptReport:
    """Phasors and path gains of one power-transfer evaluation.

    ``alpha_hat`` are the per-beam phasors before phase tuning and
    ``alpha_tilde`` after; gains are in dB. ``phases`` holds the tuned
    relative phases of beams 2..K (beam 1 stays fixed).
    """

    alpha_hat: tuple
    alpha_tilde: tuple
    pg_predicted_db: float
    pg_optimized_db: float
    pg_perfect_db: float
    phases: np.ndarray


def predicted_channel(sources: Sequence[MirrorSource], ue, f_c: float,
                      tx_model: AntennaModel = ISOTROPIC,
                      rx_model: AntennaModel = ISOTROPIC) -> PredictedChannel:
    """Predict the channel at ``ue`` from (estimated) mirror sources.

    Uses the same per-source model as channel synthesis, so exact geometry
    reproduces the synthesized channel.
    """
    if len(sources) < 1:
        raise ValueError("at least one source is required")
    parts = [smc_channel_vector(src, ue, f_c, tx_model, rx_model)
             for src in sources]
    total = parts[0].copy()
    for h in parts[1:]:
        total = total + h
    return PredictedChannel(h_total=total, per_smc=tuple(parts),
                            f_c=float(f_c), ue=as_point(ue))


def geometry_weights(pc: PredictedChannel) -> BeamWeights:
    """Maximum-ratio beams from the predicted channel.

    Each per-source beam is the conjugated source vector divided by the
    norm of the full predicted channel (the common scale cancels in the
    final normalization but fixes the per-beam phasor amplitudes); the
    composed weight is the normalized beam sum.
    """
    denom = float(np.linalg.norm(pc.h_total))
    if denom == 0.0:
        raise ValueError("predicted channel is zero")
    per = [np.conj(h) / denom for h in pc.per_smc]
    s = per[0].copy()
    for wk in per[1:]:
        s = s + wk
    n = float(np.linalg.norm(s))
    if n == 0.0:
        raise ValueError("per-source beams cancel; composed weight undefined")
    return BeamWeights(w=s / n, per_smc_w=tuple(per))


def smc_phasors(h_true: np.ndarray, weights: BeamWeights,
                pt: float = 1.0) -> list[complex]:
    """Per-beam received phasors h^T w_k sqrt(Pt) on the feedback channel."""
    h = np.asarray(h_true, dtype=complex)
    out = []
    for wk in weights.per_smc_w:
        if wk.shape != h.shape:
            raise ValueError("weight length does not match channel length")
        out.append(complex(np.dot(h, wk) * np.sqrt(pt)))
    return out


def perfect_csi_pg(h_true: np.ndarray, pt: float = 1.0) -> float:
    """Path gain in dB of conjugate beamforming on the true channel."""
    h = np.asarray(h_true, dtype=complex)
    nh = float(np.linalg.norm(h))
    if nh == 0.0:
        raise ValueError("channel is zero")
    if not pt > 0:
        raise ValueError("transmit power must be positive")
    return db10(nh ** 2)


def _compose(per_smc_w, phases_full) -> np.ndarray:
    s = np.exp(1j * phases_full[0]) * per_smc_w[0]
    for k in range(1, len(per_smc_w)):
        s = s + np.exp(1j * phases_full[k]) * per_smc_w[k]
    n = float(np.linalg.norm(s))
    if n == 0.0:
        raise ValueError("phased beams cancel; composed weight undefined")
    return s / n


def _golden_max(fun, lo: float, hi: float, iters: int = 60):
    """Golden-section maximization over [lo, hi]."""
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = fun(c), fun(d)
    for _ in range(iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = fun(d)
    return (c, fc) if fc >= fd else (d, fd)


def optimize_phases(h_true: np.ndarray, weights: BeamWeights, pt: float = 1.0,
                    max_sweeps: int = 100, rel_tol: float = 1e-10,
                    bracket: float = np.pi / 8):
    """Tune per-beam phases so the delivered path gain is maximized.

    The objective is PG(phi) with the composed weight
    w(phi) = sum_k exp(j phi_k) w_k, renormalized to unit power; phi_1 is
    pinned to zero. Starting from the better of the all-zero phases and
    the closed-form alignment phi_k = arg(a_1) - arg(a_k), cyclic
    coordinate ascent refines each phase by golden-section search over a
    +-``bracket`` window until the relative gain improvement per sweep
    drops below ``rel_tol`` or ``max_sweeps`` is reached. New coordinates
    are accepted only on strict improvement, so the result never falls
    below either starting candidate.

    Returns (phases in [0, 2 pi), optimized BeamWeights, path gain in dB).
    """
    h = np.asarray(h_true, dtype=complex)
    kk = len(weights.per_smc_w)
    if kk == 1:
        pg = path_gain_db(received_phasor(h, weights.w, pt), pt)
        return np.zeros(0), weights, pg

    # reduced objective: PG = |a^H-free sum|^2 / (e^H C e), O(K^2) per eval
    a = np.array([np.dot(h, wk) for wk in weights.per_smc_w])
    wmat = np.stack(weights.per_smc_w, axis=1)
    cmat = wmat.conj().T @ wmat

    def pg_lin(phases_full: np.ndarray) -> float:
        e = np.exp(1j * phases_full)
        num = abs(np.dot(a, e)) ** 2
        den = float(np.real(e.conj() @ cmat @ e))
        if den <= 0.0:
            return 0.0
        return num / den

    zero = np.zeros(kk)
    init = np.zeros(kk)
    init[1:] = np.angle(a[0]) - np.angle(a[1:])
    # the closed-form alignment is preferred on ties with the zero start
    phases, pg = (init, pg_lin(init)) if pg_lin(init) >= pg_lin(zero) \
        else (zero, pg_lin(zero))
    phases = phases.copy()

    for _ in range(max_sweeps):
        pg_before = pg
        for k in range(1, kk):
            def fun(t, _k=k):
                cand = phases.copy()
                cand[_k] = t
                return pg_lin(cand)

            t_best, pg_best = _golden_max(fun, phases[k] - bracket,
                                          phases[k] + bracket)
            # the margin keeps float jitter on flat objectives from
            # dragging phases away from the starting point
            if pg_best > pg * (1.0 + 1e-14):
                phases[k] = t_best
                pg = pg_best
        if pg_before > 0 and (pg - pg_before) / pg_before < rel_tol:
            break
        if pg_before == 0.0 and pg == 0.0:
            break

    phases = np.mod(phases, 2.0 * np.pi)
    phases[0] = 0.0
    w_opt = _compose(weights.per_smc_w, phases)
    rotated = tuple(np.exp(1j * phases[k]) * weights.per_smc_w[k]
                    for k in range(kk))
    pg_db = path_gain_db(received_phasor(h, w_opt, pt), pt)
    return phases[1:], BeamWeights(w=w_opt, per_smc_w=rotated), pg_db


def pg_sweep(weights: BeamWeights, eval_points, true_sources, f_c: float,
             pt: float = 1.0,
             tx_model: AntennaModel = ISOTROPIC,
             rx_model: AntennaModel = ISOTROPIC) -> np.ndarray:
    """Path gain in dB delivered by fixed weights across evaluation points.

    The true channel is synthesized per point; degenerate points yield NaN
    and the sweep continues.
    """
    out = np.empty(len(eval_points))
    for i, p in enumerate(eval_points):
        try:
            h = channel_vector(true_sources, p, f_c, tx_model, rx_model)
            out[i] = path_gain_db(received_phasor(h, weights.w, pt), pt)
        except DegenerateGeometryError:
            out[i] = np.nan
    return out


def evaluate_wpt(h_true: np.ndarray, pc: PredictedChannel, pt: float = 1.0,
                 feedback: bool = True) -> WptReport:
    """Full power-transfer evaluation of predicted beams on a true channel.

    With ``feedback`` the phase tuning observes the true channel; without
    it the tuning only sees the predicted channel (ablation mode) and the
    resulting weights are then applied to the true channel.
    """
    h = np.asarray(h_true, dtype=complex)
    weights = geometry_weights(pc)
    alpha_hat = smc_phasors(h, weights, pt)
    pg_pred = path_gain_db(received_phasor(h, weights.w, pt), pt)
    fb = h if feedback else pc.h_total
    phases, w_opt, pg_opt = optimize_phases(fb, weights, pt)
    if not feedback:
        pg_opt = path_gain_db(received_phasor(h, w_opt.w, pt), pt)
    alpha_tilde = smc_phasors(h, w_opt, pt)
    return WptReport(alpha_hat=tuple(alpha_hat), alpha_tilde=tuple(alpha_tilde),
                     pg_predicted_db=pg_pred, pg_optimized_db=pg_opt,
                     pg_perfect_db=perfect_csi_pg(h, pt),
                     phases=phases)
