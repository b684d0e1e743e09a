"""
Online latent-space maintenance.
Provides the anchor and replay banks, the boundary maintenance pass and
drift diagnostics.
"""

from .banks import AnchorBank, ReplayBank, Banks, ANCHOR_CAPACITY, REPLAY_CAPACITY, ANCHOR_THRESHOLD
from .drift import drift_metrics
from .boundary import (
    MaintenanceConfig,
    MaintenanceReport,
    boundary_maintenance,
    bootstrap_normalizer,
    sample_refit_bank,
)

__all__ = [
    # Banks
    'AnchorBank',
    'ReplayBank',
    'Banks',
    'ANCHOR_CAPACITY',
    'REPLAY_CAPACITY',
    'ANCHOR_THRESHOLD',

    # Drift
    'drift_metrics',

    # Maintenance
    'MaintenanceConfig',
    'MaintenanceReport',
    'boundary_maintenance',
    'bootstrap_normalizer',
    'sample_refit_bank',
]

__version__ = '1.0.0'
