"""Finite fields, matrix groups, racks, Weyl data and tori. No I/O."""
