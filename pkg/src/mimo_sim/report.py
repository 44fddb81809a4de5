"""Render sweep results to BER and sum-rate figures on disk."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _label(config):
    return (
        f"{config.algorithm}, K={config.users}, M_k={config.rx_per_user}, "
        f"M_T={config.resolved_tx_antennas} (L_C={config.loading_coefficient:.3g})"
    )


def render_ber_figure(result, path):
    """Semilog BER curve over the Eb/N0 grid; zero-BER points are left out."""
    ebn0 = np.array([p.ebn0_db for p in result.points])
    ber = np.array([p.ber for p in result.points], dtype=float)
    ber[ber == 0.0] = np.nan
    fig, ax = plt.subplots(figsize=(7, 5))
    ax.semilogy(ebn0, ber, "o-", label=_label(result.config))
    ax.set_xlabel("Eb/N0 (dB)")
    ax.set_ylabel("BER")
    ax.set_title(f"Uncoded QPSK BER, {result.config.trials} trials per point")
    ax.grid(True, which="both", alpha=0.4)
    ax.legend()
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path


def render_sum_rate_figure(result, path):
    """Mean sum rate over the Eb/N0 grid."""
    ebn0 = [p.ebn0_db for p in result.points]
    rate = [p.sum_rate_bps_hz for p in result.points]
    fig, ax = plt.subplots(figsize=(7, 5))
    ax.plot(ebn0, rate, "s-", label=_label(result.config))
    ax.set_xlabel("Eb/N0 (dB)")
    ax.set_ylabel("Sum rate (bits/s/Hz)")
    ax.set_title(f"Mean sum rate, {result.config.trials} trials per point")
    ax.grid(True, alpha=0.4)
    ax.legend()
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path


def render_figures(result, out_prefix):
    """Write <prefix>_ber.png and <prefix>_sum_rate.png; returns the paths."""
    prefix = str(out_prefix)
    return [
        render_ber_figure(result, f"{prefix}_ber.png"),
        render_sum_rate_figure(result, f"{prefix}_sum_rate.png"),
    ]
