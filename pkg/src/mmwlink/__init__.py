"""Deterministic link-level simulator for mmWave backhaul with two-level
spatial multiplexing: a handful of widely separated subarrays multiplex over
the spherical-wave structure of a LoS + ground-reflection channel, while each
subarray steers analog beams onto the individual propagation paths."""

__version__ = "0.1.0"
