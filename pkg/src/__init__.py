"""
telapa-lab: continual reinforcement learning with per-task quality-diversity
policy archives in a shared, maintained latent behavior space.
"""

__version__ = '1.0.0'
