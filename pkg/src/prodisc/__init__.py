"""Discrete projective minimal surfaces: evolution, frames and verification."""
