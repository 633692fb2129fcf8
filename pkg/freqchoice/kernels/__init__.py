"""Per-observation probability kernels.

Every function here is pure and broadcasts over leading observation axes;
the trailing axis indexes frequency categories 0..C.
"""
